#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfsim/json_io.hpp"
#include "wfsim/rng.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

enum class TaskKind { ServiceTask, UserTask };

inline std::string_view to_string(TaskKind kind) {
  return kind == TaskKind::ServiceTask ? "service" : "user";
}

inline TaskKind task_kind_from_string(std::string_view s) {
  if (s == "service") return TaskKind::ServiceTask;
  if (s == "user") return TaskKind::UserTask;
  throw std::invalid_argument("unknown task kind: " + std::string(s));
}

struct Task {
  std::string id;
  TaskKind kind = TaskKind::ServiceTask;
  SecurityRequirement requirement;
  std::set<AdaptationKind> allowed_actions;
  std::set<std::string> predecessors;  // control-flow dependencies
  std::set<std::string> data_inputs;   // data-flow dependencies
};

struct Workflow {
  std::string id;
  std::string tenant_id;
  std::vector<Task> tasks;
  WeightVector weights;

  const Task* find_task(const std::string& task_id) const {
    for (const Task& t : tasks) {
      if (t.id == task_id) return &t;
    }
    return nullptr;
  }
};

enum class SizeCategory { Small, Medium, Large };

struct TaskCountRange {
  int lo = 0;
  int hi = 0;
};

inline TaskCountRange task_count_range(SizeCategory category) {
  switch (category) {
    case SizeCategory::Small:
      return {3, 10};
    case SizeCategory::Medium:
      return {10, 50};
    case SizeCategory::Large:
      return {50, 100};
  }
  throw std::logic_error("unknown size category");
}

inline std::string_view to_string(SizeCategory category) {
  switch (category) {
    case SizeCategory::Small:
      return "small";
    case SizeCategory::Medium:
      return "medium";
    case SizeCategory::Large:
      return "large";
  }
  throw std::logic_error("unknown size category");
}

inline SizeCategory size_category_from_string(std::string_view s) {
  if (s == "small") return SizeCategory::Small;
  if (s == "medium") return SizeCategory::Medium;
  if (s == "large") return SizeCategory::Large;
  throw std::invalid_argument("unknown size category: " + std::string(s));
}

// Tasks this critical on confidentiality or integrity never get Skip.
inline constexpr double kSkipExclusionThreshold = 0.9;

// Fraction of generated tasks outsourced to cloud services.
inline constexpr double kServiceTaskRatio = 0.9;

/// Fills in the task's feasible adaptation set: ReExecute always, the other
/// kinds with probability 1/2 each, except that Skip is withheld from tasks
/// with a critical confidentiality or integrity requirement.
inline Task assign_allowed_actions(Task task, Rng& rng) {
  std::set<AdaptationKind> actions{AdaptationKind::ReExecute};
  const bool critical =
      task.requirement.confidentiality >= kSkipExclusionThreshold ||
      task.requirement.integrity >= kSkipExclusionThreshold;
  for (AdaptationKind kind :
       {AdaptationKind::Late, AdaptationKind::Skip, AdaptationKind::Redundancy,
        AdaptationKind::Reconfig}) {
    const bool include = rng.bernoulli(0.5);  // drawn even when withheld
    if (!include) continue;
    if (kind == AdaptationKind::Skip && critical) continue;
    actions.insert(kind);
  }
  task.allowed_actions = std::move(actions);
  return task;
}

/// Generates a random layered DAG workflow for the given size category.
///
/// Tasks are split into ceil(sqrt(n)) contiguous layers; every task outside
/// the first layer draws 1-3 predecessors from earlier layers, so the graph
/// is acyclic by construction and only first-layer tasks are roots. Each
/// predecessor also feeds data forward with probability 1/2.
inline Workflow generate_workflow(SizeCategory category,
                                  const std::string& tenant_id,
                                  const WeightVector& weights, Rng& rng,
                                  const std::string& workflow_id = "workflow0") {
  if (!weights.valid()) {
    throw std::invalid_argument("generate_workflow: invalid weight vector");
  }
  const TaskCountRange range = task_count_range(category);
  const int n = static_cast<int>(rng.uniform_int(range.lo, range.hi));
  const int layers = static_cast<int>(std::ceil(std::sqrt(n)));
  auto layer_start = [&](int layer) {
    return static_cast<int>(static_cast<long long>(layer) * n / layers);
  };

  Workflow wf;
  wf.id = workflow_id;
  wf.tenant_id = tenant_id;
  wf.weights = weights;
  wf.tasks.reserve(n);

  int layer = 0;
  for (int i = 0; i < n; ++i) {
    while (layer + 1 < layers && i >= layer_start(layer + 1)) ++layer;

    Task task;
    task.kind = rng.bernoulli(kServiceTaskRatio) ? TaskKind::ServiceTask
                                                 : TaskKind::UserTask;
    task.id = (task.kind == TaskKind::ServiceTask ? "serviceTask" : "userTask") +
              std::to_string(i);
    task.requirement = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
    task = assign_allowed_actions(std::move(task), rng);

    const int pool_size = layer_start(layer);  // tasks in earlier layers
    if (pool_size > 0) {
      const int want = static_cast<int>(
          rng.uniform_int(1, std::min(3, pool_size)));
      std::vector<int> pool(pool_size);
      for (int p = 0; p < pool_size; ++p) pool[p] = p;
      for (int k = 0; k < want; ++k) {
        const int j = k + static_cast<int>(rng.uniform_index(pool.size() - k));
        std::swap(pool[k], pool[j]);
        const std::string& pred = wf.tasks[pool[k]].id;
        task.predecessors.insert(pred);
        if (rng.bernoulli(0.5)) task.data_inputs.insert(pred);
      }
    }
    wf.tasks.push_back(std::move(task));
  }
  return wf;
}

namespace detail {

// Successor adjacency over the union of control and data edges.
inline std::map<std::string, std::set<std::string>> successor_edges(
    const Workflow& wf) {
  std::map<std::string, std::set<std::string>> succ;
  for (const Task& t : wf.tasks) succ[t.id];
  for (const Task& t : wf.tasks) {
    for (const std::string& p : t.predecessors) succ[p].insert(t.id);
    for (const std::string& p : t.data_inputs) succ[p].insert(t.id);
  }
  return succ;
}

// Returns the node set of some cycle, if any. Iterative DFS; deterministic
// because tasks and successor sets are iterated in sorted order.
inline std::optional<std::set<std::string>> find_cycle(const Workflow& wf) {
  const auto succ = successor_edges(wf);
  std::map<std::string, int> color;  // 0 white, 1 on stack, 2 done
  std::vector<std::string> stack;

  for (const auto& [start, unused] : succ) {
    if (color[start] != 0) continue;

    std::vector<std::pair<std::string, std::set<std::string>::const_iterator>>
        frames;
    color[start] = 1;
    stack.push_back(start);
    frames.emplace_back(start, succ.at(start).begin());
    while (!frames.empty()) {
      auto& [node, it] = frames.back();
      if (it == succ.at(node).end()) {
        color[node] = 2;
        stack.pop_back();
        frames.pop_back();
        continue;
      }
      const std::string& next = *it++;
      if (color[next] == 1) {
        // Back edge: everything from `next` to the stack top is the cycle.
        std::set<std::string> cycle;
        for (auto rit = stack.rbegin(); rit != stack.rend(); ++rit) {
          cycle.insert(*rit);
          if (*rit == next) break;
        }
        return cycle;
      }
      if (color[next] == 0) {
        color[next] = 1;
        stack.push_back(next);
        frames.emplace_back(next, succ.at(next).begin());
      }
    }
  }
  return std::nullopt;
}

}  // namespace detail

/// Checks every structural invariant and returns human-readable violations;
/// an empty result means the workflow is well-formed. Never throws.
inline std::vector<std::string> validate(const Workflow& wf) {
  std::vector<std::string> violations;
  std::set<std::string> ids;
  for (const Task& t : wf.tasks) {
    if (!ids.insert(t.id).second) {
      violations.push_back("duplicate task id: " + t.id);
    }
  }
  if (!wf.weights.valid()) {
    violations.push_back("invalid weights: components must be >= 0 with a positive sum");
  }
  for (const Task& t : wf.tasks) {
    if (!t.requirement.in_unit_range()) {
      violations.push_back("task " + t.id + ": requirement outside [0,1]");
    }
    if (t.kind == TaskKind::ServiceTask && t.allowed_actions.empty()) {
      violations.push_back("task " + t.id + ": service task with empty allowed_actions");
    }
    for (const std::string& ref : t.predecessors) {
      if (ref == t.id) violations.push_back("task " + t.id + ": self-referencing predecessor");
      else if (!ids.count(ref)) violations.push_back("task " + t.id + ": unknown predecessor '" + ref + "'");
    }
    for (const std::string& ref : t.data_inputs) {
      if (ref == t.id) violations.push_back("task " + t.id + ": self-referencing data input");
      else if (!ids.count(ref)) violations.push_back("task " + t.id + ": unknown data input '" + ref + "'");
    }
  }
  if (violations.empty()) {
    if (auto cycle = detail::find_cycle(wf)) {
      std::string names;
      for (const std::string& id : *cycle) {
        if (!names.empty()) names += ",";
        names += id;
      }
      violations.push_back("cycle: " + names);
    }
  }
  return violations;
}

/// Kahn topological order over the union of control and data edges, ready
/// tasks ordered by id. Returns nullopt when the graph has a cycle.
inline std::optional<std::vector<const Task*>> topological_order(
    const Workflow& wf) {
  const auto succ = detail::successor_edges(wf);
  std::map<std::string, int> indegree;
  std::map<std::string, const Task*> by_id;
  for (const Task& t : wf.tasks) {
    indegree[t.id] = 0;
    by_id[t.id] = &t;
  }
  for (const auto& [from, tos] : succ) {
    for (const std::string& to : tos) ++indegree[to];
  }
  std::priority_queue<std::string, std::vector<std::string>, std::greater<>>
      ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<const Task*> order;
  order.reserve(wf.tasks.size());
  while (!ready.empty()) {
    const std::string id = ready.top();
    ready.pop();
    order.push_back(by_id.at(id));
    for (const std::string& next : succ.at(id)) {
      if (--indegree[next] == 0) ready.push(next);
    }
  }
  if (order.size() != wf.tasks.size()) return std::nullopt;
  return order;
}

inline json workflow_to_json(const Workflow& wf) {
  json j;
  j["id"] = wf.id;
  j["tenant_id"] = wf.tenant_id;
  j["weights"] = {{"time", wf.weights.time},
                  {"price", wf.weights.price},
                  {"security", wf.weights.security}};
  json tasks = json::array();
  for (const Task& t : wf.tasks) {
    json jt;
    jt["id"] = t.id;
    jt["kind"] = std::string(to_string(t.kind));
    jt["requirement"] = {{"c", t.requirement.confidentiality},
                         {"i", t.requirement.integrity},
                         {"a", t.requirement.availability}};
    json actions = json::array();
    for (AdaptationKind k : t.allowed_actions) actions.push_back(std::string(to_string(k)));
    jt["allowed_actions"] = std::move(actions);
    jt["predecessors"] = t.predecessors;
    jt["data_inputs"] = t.data_inputs;
    tasks.push_back(std::move(jt));
  }
  j["tasks"] = std::move(tasks);
  return j;
}

inline Workflow workflow_from_json(const json& j) {
  Workflow wf;
  wf.id = require_string(j, "workflow", "id");
  wf.tenant_id = require_string(j, "workflow", "tenant_id");
  const json& jw = require_field(j, "workflow", "weights");
  wf.weights = {require_number(jw, "weights", "time"),
                require_number(jw, "weights", "price"),
                require_number(jw, "weights", "security")};
  const json& jtasks = require_array(j, "workflow", "tasks");
  for (std::size_t i = 0; i < jtasks.size(); ++i) {
    const std::string ctx = "task[" + std::to_string(i) + "]";
    const json& jt = jtasks[i];
    Task t;
    t.id = require_string(jt, ctx, "id");
    t.kind = task_kind_from_string(require_string(jt, ctx, "kind"));
    const json& jr = require_field(jt, ctx, "requirement");
    t.requirement = {require_number(jr, ctx + ".requirement", "c"),
                     require_number(jr, ctx + ".requirement", "i"),
                     require_number(jr, ctx + ".requirement", "a")};
    for (const json& a : require_array(jt, ctx, "allowed_actions")) {
      if (!a.is_string()) throw std::runtime_error(ctx + ".allowed_actions: expected strings");
      t.allowed_actions.insert(adaptation_kind_from_string(a.get<std::string>()));
    }
    for (const json& p : require_array(jt, ctx, "predecessors")) {
      if (!p.is_string()) throw std::runtime_error(ctx + ".predecessors: expected strings");
      t.predecessors.insert(p.get<std::string>());
    }
    for (const json& p : require_array(jt, ctx, "data_inputs")) {
      if (!p.is_string()) throw std::runtime_error(ctx + ".data_inputs: expected strings");
      t.data_inputs.insert(p.get<std::string>());
    }
    wf.tasks.push_back(std::move(t));
  }
  return wf;
}

inline void save_workflow(const Workflow& wf, const std::string& path) {
  save_json_file(workflow_to_json(wf), path);
}

/// Loads and validates; a malformed file or a structurally invalid workflow
/// (e.g. a cycle) is rejected with a diagnostic naming the problem.
inline Workflow load_workflow(const std::string& path) {
  Workflow wf = workflow_from_json(load_json_file(path));
  const std::vector<std::string> violations = validate(wf);
  if (!violations.empty()) {
    std::string msg = path + ": invalid workflow";
    for (const std::string& v : violations) msg += "; " + v;
    throw std::runtime_error(msg);
  }
  return wf;
}

}  // namespace wfsim
