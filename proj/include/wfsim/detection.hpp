#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wfsim/cloudenv.hpp"
#include "wfsim/json_io.hpp"
#include "wfsim/rng.hpp"

namespace wfsim {

enum class AlertSource { ServiceMonitor, TenantIDS, UserMonitor };

struct DetectionAlert {
  AttackEvent attack;
  double detected_at = 0.0;
  AlertSource source = AlertSource::ServiceMonitor;
};

/// Rule-based IDS threshold for tenant workload: more than `threshold`
/// submissions inside a trailing `window` raises an alert.
struct TenantRule {
  enum class Metric { SubmissionsPerWindow };
  std::string tenant_id;
  Metric metric = Metric::SubmissionsPerWindow;
  double window = 0.0;
  int threshold = 0;
};

struct Submission {
  std::string tenant_id;
  std::string instance_id;
  double time = 0.0;
};

struct UserEvent {
  std::string tenant_id;
  std::string user_id;
  std::string task_id;
  int access_count = 0;
};

enum class UserVerdict { Benign, Malicious };

/// Middleware-side service monitoring. An attacked outcome is detected with
/// probability `p_detect`; a clean outcome raises a (synthetic) alert only
/// when a nonzero false-positive rate is configured. The detector itself
/// stands in for the trained service model: its hit rate is the knob.
inline std::optional<DetectionAlert> monitor_service(
    const ExecutionOutcome& outcome, double p_detect, Rng& rng,
    double completed_at, double p_false_positive = 0.0) {
  if (outcome.attack) {
    if (!rng.bernoulli(p_detect)) return std::nullopt;
    return DetectionAlert{*outcome.attack, completed_at,
                          AlertSource::ServiceMonitor};
  }
  if (p_false_positive > 0.0 && rng.bernoulli(p_false_positive)) {
    const AttackType type =
        kAllAttackTypes[rng.uniform_index(kAllAttackTypes.size())];
    return DetectionAlert{
        AttackEvent{type, outcome.task_id, outcome.service_id, "", completed_at},
        completed_at, AlertSource::ServiceMonitor};
  }
  return std::nullopt;
}

/// Checks a tenant rule against the submission log. Counts the tenant's
/// submissions in (now - window, now]; strictly exceeding the threshold
/// raises the alert. Flooding is reported as a DoS-class event.
inline std::optional<DetectionAlert> tenant_ids_check(
    const TenantRule& rule, const std::vector<Submission>& submissions,
    double now) {
  int count = 0;
  const Submission* latest = nullptr;
  for (const Submission& s : submissions) {
    if (s.tenant_id != rule.tenant_id) continue;
    if (s.time <= now - rule.window || s.time > now) continue;
    ++count;
    if (!latest || s.time >= latest->time) latest = &s;
  }
  if (count <= rule.threshold) return std::nullopt;
  AttackEvent event;
  event.attack_type = AttackType::DoS;
  event.instance_id = latest ? latest->instance_id : "";
  event.sim_time = now;
  return DetectionAlert{event, now, AlertSource::TenantIDS};
}

/// Tenant-side user monitoring over a single thresholded feature.
inline UserVerdict monitor_user(const UserEvent& event, int threshold) {
  return event.access_count > threshold ? UserVerdict::Malicious
                                        : UserVerdict::Benign;
}

inline std::vector<TenantRule> rules_from_json(const json& j) {
  if (!j.is_array()) {
    throw std::runtime_error("rules file: expected a top-level array");
  }
  std::vector<TenantRule> rules;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string ctx = "rule[" + std::to_string(i) + "]";
    const json& jr = j[i];
    TenantRule rule;
    rule.tenant_id = require_string(jr, ctx, "tenant_id");
    const std::string metric = require_string(jr, ctx, "metric");
    if (metric != "SubmissionsPerWindow") {
      throw std::runtime_error(ctx + ".metric: unknown metric '" + metric + "'");
    }
    rule.window = require_number(jr, ctx, "window");
    rule.threshold = static_cast<int>(require_number(jr, ctx, "threshold"));
    if (rule.window <= 0 || rule.threshold <= 0) {
      throw std::runtime_error(ctx + ": window and threshold must be positive");
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

inline std::vector<TenantRule> load_rules(const std::string& path) {
  return rules_from_json(load_json_file(path));
}

}  // namespace wfsim
