#pragma once

#include <atomic>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "wfsim/adaptation.hpp"
#include "wfsim/cloudenv.hpp"
#include "wfsim/detection.hpp"
#include "wfsim/model.hpp"
#include "wfsim/rng.hpp"
#include "wfsim/scheduler.hpp"
#include "wfsim/trust.hpp"

namespace wfsim {

enum class TaskStatus {
  Pending,
  Running,
  Completed,
  Skipped,
  TaintedInput,
  ResidualRisk,
};

inline std::string_view to_string(TaskStatus status) {
  switch (status) {
    case TaskStatus::Pending:
      return "pending";
    case TaskStatus::Running:
      return "running";
    case TaskStatus::Completed:
      return "completed";
    case TaskStatus::Skipped:
      return "skipped";
    case TaskStatus::TaintedInput:
      return "tainted-input";
    case TaskStatus::ResidualRisk:
      return "residual-risk";
  }
  throw std::logic_error("unknown task status");
}

enum class EventKind {
  MonitorOk,
  AttackDetected,
  Adaptation,
  TaskDone,
  TrustUpdate,
  IdsAlert,
};

inline std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::MonitorOk:
      return "MONITOR_OK";
    case EventKind::AttackDetected:
      return "ATTACK_DETECTED";
    case EventKind::Adaptation:
      return "ADAPTATION";
    case EventKind::TaskDone:
      return "TASK_DONE";
    case EventKind::TrustUpdate:
      return "TRUST_UPDATE";
    case EventKind::IdsAlert:
      return "IDS_ALERT";
  }
  throw std::logic_error("unknown event kind");
}

struct LogEntry {
  double sim_time = 0.0;
  std::string tenant_id;
  std::string instance_id;
  std::string task_id;
  EventKind kind = EventKind::MonitorOk;
  std::optional<AttackType> attack_type;
  std::string service_id;
  std::string action;
};

// Simulated-clock stamp, one time unit per second.
inline std::string format_mmss(double sim_time) {
  const long long total =
      static_cast<long long>(sim_time < 0.0 ? 0.0 : sim_time);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%02lld:%02lld", total / 60, total % 60);
  return buf;
}

// One entry per line, tab separated:
// <mm:ss> <tenant> <instance> <task> <EVENT> <attack|-> <service|-> <action|->
inline std::string format_log_entry(const LogEntry& e) {
  auto or_dash = [](const std::string& s) { return s.empty() ? "-" : s; };
  std::string line = format_mmss(e.sim_time);
  line += '\t';
  line += or_dash(e.tenant_id);
  line += '\t';
  line += or_dash(e.instance_id);
  line += '\t';
  line += or_dash(e.task_id);
  line += '\t';
  line += to_string(e.kind);
  line += '\t';
  line += e.attack_type ? std::string(to_string(*e.attack_type)) : "-";
  line += '\t';
  line += or_dash(e.service_id);
  line += '\t';
  line += or_dash(e.action);
  return line;
}

inline std::string render_log(const std::vector<LogEntry>& entries) {
  std::string out;
  for (const LogEntry& e : entries) {
    out += format_log_entry(e);
    out += '\n';
  }
  return out;
}

struct TaskState {
  TaskStatus status = TaskStatus::Pending;
  bool tainted = false;
  int adaptations = 0;
  std::string service_id;  // service that produced the final result
};

struct ChargeRecord {
  std::string task_id;
  double amount = 0.0;
};

struct InstanceState {
  std::string instance_id;
  std::string workflow_id;
  std::string tenant_id;
  double start_time = 0.0;
  double clock = 0.0;
  double accumulated_price = 0.0;
  double mitigation_sum = 0.0;
  int attacks_detected = 0;
  std::map<std::string, TaskState> tasks;
  std::vector<ChargeRecord> charges;  // chronological, base + adaptation
  std::vector<LogEntry> log;
};

struct RunRecord {
  int run_id = 0;
  double time = 0.0;
  double price = 0.0;
  double mitigation = 0.0;
};

/// Scripted attack injections for reproducing scenarios: attempt 0 is the
/// initial execution of a task, attempt k its k-th adaptation re-run. When a
/// plan is set, stochastic injection is disabled entirely.
struct AttackPlan {
  std::map<std::pair<std::string, int>, AttackType> forced;

  std::optional<AttackType> lookup(const std::string& task_id,
                                   int attempt) const {
    auto it = forced.find({task_id, attempt});
    if (it == forced.end()) return std::nullopt;
    return it->second;
  }
};

struct EngineOptions {
  double attack_rate = 0.0;
  double p_detect = 1.0;
  double p_false_positive = 0.0;
  int max_readapt = 3;
  double trust_beta = kDefaultPenaltyBeta;
  double trust_alpha = kDefaultRewardAlpha;
  double user_task_time = 1.0;
  int user_access_threshold = 100;
  ActionCatalog actions;
  std::optional<AttackPlan> attack_plan;
};

struct InstanceResult {
  InstanceState state;
  RunRecord record;
  std::vector<TrustOp> trust_ops;
};

namespace detail {

class InstanceRunner {
 public:
  InstanceRunner(const Workflow& wf, const Catalog& catalog,
                 const EngineOptions& opts, const TrustRegistry& trust_base,
                 Rng& rng, std::string instance_id, double start_time)
      : wf_(wf),
        catalog_(catalog),
        opts_(opts),
        trust_(trust_base),
        rng_(rng) {
    state_.instance_id = std::move(instance_id);
    state_.workflow_id = wf.id;
    state_.tenant_id = wf.tenant_id;
    state_.start_time = start_time;
    state_.clock = start_time;
    for (const Task& t : wf.tasks) state_.tasks[t.id];
  }

  InstanceResult run() {
    const std::vector<std::string> violations = validate(wf_);
    if (!violations.empty()) {
      throw std::invalid_argument("run_instance: workflow does not validate: " +
                                  violations.front());
    }
    const auto order = topological_order(wf_);
    if (!order) {
      throw std::invalid_argument("run_instance: workflow graph has a cycle");
    }
    for (const Task* task : *order) {
      if (task->kind == TaskKind::UserTask) {
        run_user_task(*task);
      } else {
        run_service_task(*task);
      }
      const TaskStatus status = state_.tasks.at(task->id).status;
      if (status != TaskStatus::Completed && status != TaskStatus::Skipped &&
          status != TaskStatus::ResidualRisk) {
        throw std::logic_error("run_instance: task " + task->id +
                               " left in non-terminal status");
      }
    }
    InstanceResult result;
    result.record = RunRecord{0, state_.clock - state_.start_time,
                              state_.accumulated_price, state_.mitigation_sum};
    result.trust_ops = trust_.ops();
    result.state = std::move(state_);
    return result;
  }

 private:
  void run_user_task(const Task& task) {
    TaskState& ts = state_.tasks.at(task.id);
    ts.status = TaskStatus::Running;
    state_.clock += opts_.user_task_time;
    const UserEvent event{wf_.tenant_id, "user0", task.id, 0};
    const UserVerdict verdict =
        monitor_user(event, opts_.user_access_threshold);
    if (verdict == UserVerdict::Benign) {
      log(EventKind::MonitorOk, task.id);
    }
    ts.status = TaskStatus::Completed;
    log(EventKind::TaskDone, task.id);
  }

  void run_service_task(const Task& task) {
    TaskState& ts = state_.tasks.at(task.id);
    ts.status = TaskStatus::Running;

    const Service* current = &schedule(task, wf_, catalog_, trust_);
    const SchedulingRequest request = anonymize(task, wf_.weights);
    if (!request.anonymized) {
      throw std::logic_error("dispatching a non-anonymized request");
    }

    // Initial execution. Under a scripted plan the stochastic injector is
    // disabled and the plan decides per attempt.
    const double rate = opts_.attack_plan ? 0.0 : opts_.attack_rate;
    ExecutionOutcome outcome = execute(task, *current, rate, rng_,
                                       state_.instance_id, state_.clock);
    state_.clock += outcome.elapsed;
    add_charge(task.id, outcome.charged);
    if (opts_.attack_plan) {
      if (auto forced = opts_.attack_plan->lookup(task.id, 0)) {
        outcome.attack = AttackEvent{*forced, task.id, current->id,
                                     state_.instance_id, state_.clock};
      }
    }
    if (outcome.attack) outcome.attack->sim_time = state_.clock;

    const Service* ran_on = current;
    while (true) {
      if (outcome.attack && ts.adaptations >= opts_.max_readapt) {
        // Adaptation budget exhausted: the task settles and the last attack
        // goes unhandled.
        ts.status = TaskStatus::ResidualRisk;
        break;
      }
      const auto alert = monitor_service(outcome, opts_.p_detect, rng_,
                                         state_.clock, opts_.p_false_positive);
      if (!alert) {
        log(EventKind::MonitorOk, task.id, std::nullopt, ran_on->id);
        reward_clean_run(*ran_on);
        ts.status = TaskStatus::Completed;
        break;
      }

      const double detected_at = alert->detected_at;
      const AttackType attack = alert->attack.attack_type;
      ++state_.attacks_detected;
      log_at(detected_at, EventKind::AttackDetected, task.id, attack,
             ran_on->id);

      const Service* backup = nullptr;
      if (catalog_.services.size() > 1) {
        backup = &backup_service(*ran_on, task, catalog_, trust_, wf_.weights);
      }
      AdaptationContext ctx;
      ctx.task_time = ran_on->response_time;
      ctx.task_price = ran_on->price;
      if (backup) {
        ctx.backup_time = backup->response_time;
        ctx.backup_price = backup->price;
        ctx.backup_service_id = backup->id;
      }

      const AdaptationDecision decision =
          decide(task, attack, ctx, wf_.weights, opts_.actions);
      AdaptationKind chosen = decision.chosen;
      if (requires_backup(chosen) && !backup) {
        // Backup-dependent choice with no backup source: degrade to a
        // same-service reconfiguration.
        chosen = AdaptationKind::Reconfig;
      }
      const AdaptationActionSpec& spec = opts_.actions.spec(chosen);
      const TimePrice tp = adapt_time_price(spec, ctx);
      const double mitigation =
          mitigation_score(spec, task.requirement, attack);
      state_.mitigation_sum += mitigation;

      const Service* target = requires_backup(chosen) ? backup : ran_on;
      log_at(detected_at, EventKind::Adaptation, task.id, attack, target->id,
             std::string(to_string(chosen)));

      trust_.penalize(TrustSubject::Service, ran_on->id, attack,
                      opts_.trust_beta, detected_at, state_.instance_id);
      log_at(detected_at, EventKind::TrustUpdate, task.id, attack, ran_on->id);
      trust_.penalize(TrustSubject::Provider, ran_on->provider_id, attack,
                      opts_.trust_beta / 2.0, detected_at, state_.instance_id);
      log_at(detected_at, EventKind::TrustUpdate, task.id, attack,
             ran_on->provider_id);

      ++ts.adaptations;

      if (chosen == AdaptationKind::Skip) {
        ts.status = TaskStatus::Skipped;
        taint_dependents(task);
        return;  // no time or price, no re-run
      }

      state_.clock += tp.time;
      add_charge(task.id, tp.price);
      current = target;

      // The adaptation re-run draws a fresh injection and is monitored in
      // the next loop iteration.
      std::optional<AttackType> next_attack;
      if (opts_.attack_plan) {
        next_attack = opts_.attack_plan->lookup(task.id, ts.adaptations);
      } else {
        next_attack = draw_attack(opts_.attack_rate, rng_);
      }
      outcome = ExecutionOutcome{task.id, current->id, tp.time, tp.price,
                                 std::nullopt};
      if (next_attack) {
        outcome.attack = AttackEvent{*next_attack, task.id, current->id,
                                     state_.instance_id, state_.clock};
      }
      ran_on = current;
    }

    ts.service_id = ran_on->id;
    log(EventKind::TaskDone, task.id, std::nullopt, ran_on->id);
  }

  void reward_clean_run(const Service& service) {
    trust_.reward(TrustSubject::Service, service.id, opts_.trust_alpha,
                  state_.clock, state_.instance_id);
    trust_.reward(TrustSubject::Provider, service.provider_id,
                  opts_.trust_alpha / 2.0, state_.clock, state_.instance_id);
  }

  void taint_dependents(const Task& skipped) {
    for (const Task& t : wf_.tasks) {
      if (!t.data_inputs.count(skipped.id)) continue;
      TaskState& ts = state_.tasks.at(t.id);
      ts.tainted = true;
      if (ts.status == TaskStatus::Pending) {
        ts.status = TaskStatus::TaintedInput;
      }
    }
  }

  void add_charge(const std::string& task_id, double amount) {
    state_.charges.push_back({task_id, amount});
    state_.accumulated_price += amount;
  }

  void log(EventKind kind, const std::string& task_id,
           std::optional<AttackType> attack = std::nullopt,
           std::string service_id = {}, std::string action = {}) {
    log_at(state_.clock, kind, task_id, attack, std::move(service_id),
           std::move(action));
  }

  void log_at(double sim_time, EventKind kind, const std::string& task_id,
              std::optional<AttackType> attack = std::nullopt,
              std::string service_id = {}, std::string action = {}) {
    state_.log.push_back(LogEntry{sim_time, wf_.tenant_id, state_.instance_id,
                                  task_id, kind, attack, std::move(service_id),
                                  std::move(action)});
  }

  const Workflow& wf_;
  const Catalog& catalog_;
  const EngineOptions& opts_;
  TrustView trust_;
  Rng& rng_;
  InstanceState state_;
};

}  // namespace detail

/// Executes one workflow instance: tasks in topological order (ties by id),
/// service tasks through schedule -> anonymize -> execute -> monitor, with
/// detected attacks driving the decide/apply/penalize adaptation loop.
/// Trust reads come from `trust_base` overlaid with this instance's own
/// updates; the updates are returned for deterministic merging.
inline InstanceResult run_instance(const Workflow& workflow,
                                   const Catalog& catalog,
                                   const EngineOptions& options,
                                   const TrustRegistry& trust_base, Rng& rng,
                                   const std::string& instance_id,
                                   double start_time = 0.0) {
  if (catalog.services.empty()) {
    throw std::invalid_argument("run_instance: empty service catalog");
  }
  detail::InstanceRunner runner(workflow, catalog, options, trust_base, rng,
                                instance_id, start_time);
  return runner.run();
}

struct NormalizedMetrics {
  double avg_time = 0.0;
  double avg_price = 0.0;
  double avg_mitigation = 0.0;
};

/// Normalizes batch averages against a comparison set: min-max for time and
/// price, division by the maximum for the mitigation score. A degenerate
/// comparison set (min == max, or all-zero mitigation) maps to 0.
inline NormalizedMetrics normalize_metrics(
    const std::vector<RunRecord>& own,
    const std::vector<RunRecord>& comparison) {
  NormalizedMetrics nm;
  if (own.empty() || comparison.empty()) return nm;
  double mean_time = 0.0, mean_price = 0.0, mean_mit = 0.0;
  for (const RunRecord& r : own) {
    mean_time += r.time;
    mean_price += r.price;
    mean_mit += r.mitigation;
  }
  mean_time /= own.size();
  mean_price /= own.size();
  mean_mit /= own.size();

  double min_time = comparison.front().time, max_time = min_time;
  double min_price = comparison.front().price, max_price = min_price;
  double max_mit = 0.0;
  for (const RunRecord& r : comparison) {
    min_time = std::min(min_time, r.time);
    max_time = std::max(max_time, r.time);
    min_price = std::min(min_price, r.price);
    max_price = std::max(max_price, r.price);
    max_mit = std::max(max_mit, r.mitigation);
  }
  nm.avg_time =
      max_time == min_time ? 0.0 : (mean_time - min_time) / (max_time - min_time);
  nm.avg_price = max_price == min_price
                     ? 0.0
                     : (mean_price - min_price) / (max_price - min_price);
  nm.avg_mitigation = max_mit == 0.0 ? 0.0 : mean_mit / max_mit;
  return nm;
}

struct BatchOptions {
  SizeCategory category = SizeCategory::Small;
  int runs = 100;
  WeightVector weights{0.1, 0.1, 0.8};
  std::uint64_t seed = 42;
  int threads = 1;
  std::string tenant_id = "tenant0";
  EngineOptions engine;
  std::vector<TenantRule> ids_rules;
  TrustRegistry initial_trust;
};

struct BatchResult {
  std::vector<RunRecord> records;  // executed runs, in run order
  std::vector<LogEntry> log;
  TrustRegistry trust;
  NormalizedMetrics normalized;  // against this batch's own records
  int batch_size = 0;
};

/// Runs `runs` instances over freshly generated workflows. Every instance
/// draws its workflow and execution streams from seeds pre-split off the
/// master seed, reads the batch-start trust snapshot, and records its trust
/// updates; the updates are replayed into the registry in (detection time,
/// instance id, seq) order once all instances finish. Sequential and
/// threaded execution therefore produce identical output.
inline BatchResult run_batch(const BatchOptions& opts, const Catalog& catalog) {
  if (opts.runs < 1) {
    throw std::invalid_argument("run_batch: runs must be >= 1");
  }
  BatchResult result;
  result.batch_size = opts.runs;
  TrustRegistry registry = opts.initial_trust;

  // Submission pre-pass: tenant-tier gating and IDS checks, in run order.
  struct Slot {
    bool blocked = false;
    double start = 0.0;
    std::vector<LogEntry> ids_log;
  };
  std::vector<Slot> slots(opts.runs);
  std::vector<Submission> submissions;
  double isolation_window = 1.0;
  for (const TenantRule& rule : opts.ids_rules) {
    if (rule.tenant_id == opts.tenant_id) {
      isolation_window = std::max(isolation_window, rule.window);
    }
  }
  for (int i = 0; i < opts.runs; ++i) {
    const std::string instance_id = "instance" + std::to_string(i);
    double t = static_cast<double>(i);
    const TenantResponse tier =
        tenant_response(registry.score(TrustSubject::Tenant, opts.tenant_id));
    if (tier == TenantResponse::BlockActivity) {
      slots[i].blocked = true;
      continue;
    }
    if (tier == TenantResponse::IsolateResources) t += isolation_window;
    slots[i].start = t;
    submissions.push_back({opts.tenant_id, instance_id, t});
    if (tier == TenantResponse::IgnoreAlerts) continue;
    for (const TenantRule& rule : opts.ids_rules) {
      if (rule.tenant_id != opts.tenant_id) continue;
      if (tenant_ids_check(rule, submissions, t)) {
        slots[i].ids_log.push_back(LogEntry{t, opts.tenant_id, instance_id, "",
                                            EventKind::IdsAlert, std::nullopt,
                                            "", ""});
        registry.penalize(TrustSubject::Tenant, opts.tenant_id, AttackType::DoS,
                          opts.engine.trust_beta);
        slots[i].ids_log.push_back(LogEntry{t, opts.tenant_id, instance_id, "",
                                            EventKind::TrustUpdate,
                                            std::nullopt, "", ""});
      }
    }
  }

  // Instance runs; the registry is read-only from here until the merge.
  std::vector<std::optional<InstanceResult>> results(opts.runs);
  auto run_one = [&](int i) {
    if (slots[i].blocked) return;
    Rng workflow_rng(derive_seed(opts.seed, kStreamWorkflow, i));
    const Workflow wf =
        generate_workflow(opts.category, opts.tenant_id, opts.weights,
                          workflow_rng, "workflow" + std::to_string(i));
    Rng exec_rng(derive_seed(opts.seed, kStreamExecution, i));
    results[i] = run_instance(wf, catalog, opts.engine, registry, exec_rng,
                              "instance" + std::to_string(i), slots[i].start);
  };
  if (opts.threads <= 1) {
    for (int i = 0; i < opts.runs; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    const int n_workers = std::min(opts.threads, opts.runs);
    workers.reserve(n_workers);
    for (int w = 0; w < n_workers; ++w) {
      workers.emplace_back([&] {
        for (int i = next.fetch_add(1); i < opts.runs; i = next.fetch_add(1)) {
          run_one(i);
        }
      });
    }
    for (std::thread& t : workers) t.join();
  }

  std::vector<TrustOp> all_ops;
  for (int i = 0; i < opts.runs; ++i) {
    for (LogEntry& e : slots[i].ids_log) result.log.push_back(std::move(e));
    if (!results[i]) continue;
    InstanceResult& r = *results[i];
    r.record.run_id = i;
    result.records.push_back(r.record);
    for (LogEntry& e : r.state.log) result.log.push_back(std::move(e));
    for (TrustOp& op : r.trust_ops) all_ops.push_back(std::move(op));
  }
  std::stable_sort(all_ops.begin(), all_ops.end(),
                   [](const TrustOp& a, const TrustOp& b) {
                     if (a.sim_time != b.sim_time) return a.sim_time < b.sim_time;
                     if (a.instance_id != b.instance_id) {
                       return a.instance_id < b.instance_id;
                     }
                     return a.seq < b.seq;
                   });
  for (const TrustOp& op : all_ops) registry.apply(op);

  result.trust = std::move(registry);
  result.normalized = normalize_metrics(result.records, result.records);
  return result;
}

}  // namespace wfsim
