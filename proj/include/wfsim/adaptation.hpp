#pragma once

#include <array>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "wfsim/json_io.hpp"
#include "wfsim/model.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

struct ActionMultipliers {
  double late_time = 1.5;      // delayed re-run time factor
  double reconfig_time = 1.2;  // re-parameterized re-run time factor
  double reconfig_price = 1.2; // re-parameterized re-run price factor
};

/// Parameters of one adaptation action: its CIA mitigation impact, the
/// attack types it counters, and cost knobs. Overheads default to zero so
/// the cost model reduces to the action's base time/price unless tuned.
struct AdaptationActionSpec {
  AdaptationKind kind = AdaptationKind::ReExecute;
  SecurityRequirement mitigation_impact;
  std::set<AttackType> mitigates;
  double time_overhead = 0.0;
  double price_overhead = 0.0;
  ActionMultipliers multipliers;
};

/// Response time / price context of the task being adapted: the service it
/// ran on, and the backup source when one could be selected.
struct AdaptationContext {
  double task_time = 0.0;   // response time of the service the task ran on
  double task_price = 0.0;  // its price
  std::optional<double> backup_time;
  std::optional<double> backup_price;
  std::string backup_service_id;

  bool has_backup() const {
    return backup_time.has_value() && backup_price.has_value();
  }
};

inline bool requires_backup(AdaptationKind kind) {
  return kind == AdaptationKind::ReExecute || kind == AdaptationKind::Redundancy;
}

/// The built-in action catalog plus optional per-kind overrides loaded from
/// a JSON file.
class ActionCatalog {
 public:
  ActionCatalog() {
    auto make = [](AdaptationKind kind, SecurityRequirement impact,
                   std::set<AttackType> mitigates) {
      AdaptationActionSpec spec;
      spec.kind = kind;
      spec.mitigation_impact = impact;
      spec.mitigates = std::move(mitigates);
      return spec;
    };
    using AK = AdaptationKind;
    using AT = AttackType;
    specs_[index(AK::Late)] = make(AK::Late, {0.7, 0.6, 0.8}, {AT::DoS});
    specs_[index(AK::Skip)] = make(AK::Skip, {0.5, 0.4, 0.6}, {AT::Probe});
    specs_[index(AK::ReExecute)] = make(
        AK::ReExecute, {0.8, 0.9, 0.7}, {AT::DoS, AT::Probe, AT::U2R, AT::R2L});
    specs_[index(AK::Redundancy)] =
        make(AK::Redundancy, {0.9, 0.8, 0.9}, {AT::DoS, AT::U2R});
    specs_[index(AK::Reconfig)] = make(
        AK::Reconfig, {0.6, 0.7, 0.5}, {AT::DoS, AT::Probe, AT::U2R, AT::R2L});
  }

  const AdaptationActionSpec& spec(AdaptationKind kind) const {
    return specs_[index(kind)];
  }
  AdaptationActionSpec& spec(AdaptationKind kind) { return specs_[index(kind)]; }

  /// Overrides: JSON object keyed by kind name; each entry may set
  /// mitigation_impact {c,i,a}, mitigates [...], time_overhead,
  /// price_overhead, and multipliers {t_late,t_reconfig,p_reconfig}.
  /// Omitted fields keep their defaults.
  static ActionCatalog from_json(const json& j) {
    ActionCatalog catalog;
    if (!j.is_object()) {
      throw std::runtime_error("action file: expected a top-level object");
    }
    for (const auto& [key, jv] : j.items()) {
      AdaptationActionSpec& spec =
          catalog.spec(adaptation_kind_from_string(key));
      if (jv.contains("mitigation_impact")) {
        const json& ji = jv["mitigation_impact"];
        spec.mitigation_impact = {require_number(ji, key + ".mitigation_impact", "c"),
                                  require_number(ji, key + ".mitigation_impact", "i"),
                                  require_number(ji, key + ".mitigation_impact", "a")};
      }
      if (jv.contains("mitigates")) {
        spec.mitigates.clear();
        for (const json& ja : jv["mitigates"]) {
          spec.mitigates.insert(attack_type_from_string(ja.get<std::string>()));
        }
      }
      if (jv.contains("time_overhead")) spec.time_overhead = jv["time_overhead"].get<double>();
      if (jv.contains("price_overhead")) spec.price_overhead = jv["price_overhead"].get<double>();
      if (jv.contains("multipliers")) {
        const json& jm = jv["multipliers"];
        if (jm.contains("t_late")) spec.multipliers.late_time = jm["t_late"].get<double>();
        if (jm.contains("t_reconfig")) spec.multipliers.reconfig_time = jm["t_reconfig"].get<double>();
        if (jm.contains("p_reconfig")) spec.multipliers.reconfig_price = jm["p_reconfig"].get<double>();
      }
    }
    return catalog;
  }

  static ActionCatalog load(const std::string& path) {
    return from_json(load_json_file(path));
  }

 private:
  static std::size_t index(AdaptationKind kind) {
    return static_cast<std::size_t>(kind);
  }
  std::array<AdaptationActionSpec, 5> specs_;
};

struct TimePrice {
  double time = 0.0;
  double price = 0.0;
};

/// Time and price of carrying out an adaptation action:
///   Late       -> (T * t_late, P)
///   Skip       -> (0, 0)
///   ReExecute  -> (T_backup, P_backup)
///   Redundancy -> (T_backup, P + P_backup)
///   Reconfig   -> (T * t_reconfig, P * p_reconfig)
inline TimePrice adapt_time_price(const AdaptationActionSpec& action,
                                  const AdaptationContext& ctx) {
  if (requires_backup(action.kind) && !ctx.has_backup()) {
    throw std::runtime_error(
        "adapt_time_price: no backup service in context for " +
        std::string(to_string(action.kind)));
  }
  switch (action.kind) {
    case AdaptationKind::Late:
      return {ctx.task_time * action.multipliers.late_time, ctx.task_price};
    case AdaptationKind::Skip:
      return {0.0, 0.0};
    case AdaptationKind::ReExecute:
      return {*ctx.backup_time, *ctx.backup_price};
    case AdaptationKind::Redundancy:
      return {*ctx.backup_time, ctx.task_price + *ctx.backup_price};
    case AdaptationKind::Reconfig:
      return {ctx.task_time * action.multipliers.reconfig_time,
              ctx.task_price * action.multipliers.reconfig_price};
  }
  throw std::logic_error("unknown adaptation kind");
}

/// How well the action offsets the attack given the task's requirements:
/// sum over CIA of (1 - requirement * attack_impact) * mitigation_impact.
inline double mitigation_score(const AdaptationActionSpec& action,
                               const SecurityRequirement& task_req,
                               AttackType attack) {
  const SecurityRequirement impact = attack_impact(attack);
  auto term = [](double obj_t, double obj_ai, double obj_aa) {
    return (1.0 - obj_t * obj_ai) * obj_aa;
  };
  return term(task_req.confidentiality, impact.confidentiality,
              action.mitigation_impact.confidentiality) +
         term(task_req.integrity, impact.integrity,
              action.mitigation_impact.integrity) +
         term(task_req.availability, impact.availability,
              action.mitigation_impact.availability);
}

/// Weighted cost of an applicable action; decisions take the minimum.
///   w_price * (AdaptPrice + PriceOverhead)
/// + w_time  * (AdaptTime + TimeOverhead)
/// - w_security * MitigationScore
inline double adaptation_cost(const AdaptationActionSpec& action,
                              const SecurityRequirement& task_req,
                              AttackType attack, const AdaptationContext& ctx,
                              const WeightVector& weights) {
  if (!action.mitigates.count(attack)) {
    throw std::invalid_argument(std::string(to_string(action.kind)) +
                                " does not mitigate " +
                                std::string(to_string(attack)));
  }
  const TimePrice tp = adapt_time_price(action, ctx);
  return weights.price * (tp.price + action.price_overhead) +
         weights.time * (tp.time + action.time_overhead) -
         weights.security * mitigation_score(action, task_req, attack);
}

struct CandidateEvaluation {
  AdaptationKind kind = AdaptationKind::ReExecute;
  double adapt_time = 0.0;
  double adapt_price = 0.0;
  double mitigation = 0.0;
  double cost = 0.0;
};

struct AdaptationDecision {
  AdaptationKind chosen = AdaptationKind::ReExecute;
  double cost = 0.0;
  double mitigation = 0.0;
  std::vector<CandidateEvaluation> candidates;
  bool fallback = false;  // no costable candidate; ReExecute chosen by default
};

/// Picks the minimum-cost action among those the task allows and that
/// mitigate the attack. Ties break on higher mitigation score, then on kind
/// order. With no viable candidate the decision falls back to ReExecute;
/// without a backup source in the context its cost cannot be evaluated and
/// is reported as NaN (callers then degrade to Reconfig when applying).
inline AdaptationDecision decide(const Task& task, AttackType attack,
                                 const AdaptationContext& ctx,
                                 const WeightVector& weights,
                                 const ActionCatalog& catalog = {}) {
  AdaptationDecision decision;
  for (AdaptationKind kind : kAllAdaptationKinds) {
    if (!task.allowed_actions.count(kind)) continue;
    const AdaptationActionSpec& spec = catalog.spec(kind);
    if (!spec.mitigates.count(attack)) continue;
    if (requires_backup(kind) && !ctx.has_backup()) continue;
    const TimePrice tp = adapt_time_price(spec, ctx);
    const double mit = mitigation_score(spec, task.requirement, attack);
    const double cost = weights.price * (tp.price + spec.price_overhead) +
                        weights.time * (tp.time + spec.time_overhead) -
                        weights.security * mit;
    decision.candidates.push_back({kind, tp.time, tp.price, mit, cost});
  }

  if (decision.candidates.empty()) {
    decision.fallback = true;
    decision.chosen = AdaptationKind::ReExecute;
    const AdaptationActionSpec& spec = catalog.spec(AdaptationKind::ReExecute);
    decision.mitigation = mitigation_score(spec, task.requirement, attack);
    decision.cost = ctx.has_backup()
                        ? adaptation_cost(spec, task.requirement, attack, ctx, weights)
                        : std::numeric_limits<double>::quiet_NaN();
    return decision;
  }

  const CandidateEvaluation* best = &decision.candidates.front();
  for (const CandidateEvaluation& c : decision.candidates) {
    if (c.cost < best->cost ||
        (c.cost == best->cost && c.mitigation > best->mitigation)) {
      best = &c;  // kind-order tie-break is implicit: candidates are in order
    }
  }
  decision.chosen = best->kind;
  decision.cost = best->cost;
  decision.mitigation = best->mitigation;
  return decision;
}

}  // namespace wfsim
