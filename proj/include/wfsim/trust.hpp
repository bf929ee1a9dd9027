#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wfsim/json_io.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

enum class TrustSubject { Provider, Service, Tenant };

inline std::string_view to_string(TrustSubject subject) {
  switch (subject) {
    case TrustSubject::Provider:
      return "provider";
    case TrustSubject::Service:
      return "service";
    case TrustSubject::Tenant:
      return "tenant";
  }
  throw std::logic_error("unknown trust subject");
}

struct TrustScore {
  double value = 1.0;
  TrustSubject subject = TrustSubject::Provider;
  std::string subject_id;
};

/// Escalating responses to a tenant whose trust has degraded.
enum class TenantResponse { None, IgnoreAlerts, IsolateResources, BlockActivity };

inline constexpr double kDefaultPenaltyBeta = 0.5;
inline constexpr double kDefaultRewardAlpha = 0.01;

// Tenant response tier boundaries (inclusive at the lower edge).
inline constexpr double kTenantTierNone = 0.6;
inline constexpr double kTenantTierIgnore = 0.4;
inline constexpr double kTenantTierIsolate = 0.2;

/// Severity of an attack: mean of its CIA impact vector.
inline double severity(AttackType attack) {
  const SecurityRequirement impact = attack_impact(attack);
  return (impact.confidentiality + impact.integrity + impact.availability) / 3.0;
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

/// Multiplicative penalty scaled by attack severity; clamped to [0, 1].
inline TrustScore penalize(TrustScore score, AttackType attack,
                           double beta = kDefaultPenaltyBeta) {
  score.value = clamp_unit(score.value * (1.0 - beta * severity(attack)));
  return score;
}

/// Slow additive recovery toward full trust; clamped to [0, 1].
inline TrustScore reward(TrustScore score, double alpha = kDefaultRewardAlpha) {
  score.value = clamp_unit(score.value + alpha * (1.0 - score.value));
  return score;
}

inline TenantResponse tenant_response(const TrustScore& score) {
  if (score.subject != TrustSubject::Tenant) {
    throw std::invalid_argument("tenant_response: subject must be a tenant");
  }
  if (score.value >= kTenantTierNone) return TenantResponse::None;
  if (score.value >= kTenantTierIgnore) return TenantResponse::IgnoreAlerts;
  if (score.value >= kTenantTierIsolate) return TenantResponse::IsolateResources;
  return TenantResponse::BlockActivity;
}

/// A single recorded trust mutation. Batches replay ops in deterministic
/// (sim_time, instance_id, seq) order; penalize/reward do not commute, so
/// the order is part of the output contract.
struct TrustOp {
  enum class Kind { Penalize, Reward };
  Kind kind = Kind::Penalize;
  TrustSubject subject = TrustSubject::Service;
  std::string subject_id;
  std::optional<AttackType> attack;  // set for penalties
  double param = 0.0;                // beta or alpha
  double sim_time = 0.0;
  std::string instance_id;
  int seq = 0;
};

/// Single-writer trust store. Unknown subjects start fully trusted.
class TrustRegistry {
 public:
  double get(TrustSubject subject, const std::string& id) const {
    auto it = values_.find({subject, id});
    return it == values_.end() ? 1.0 : it->second;
  }

  void set(TrustSubject subject, const std::string& id, double value) {
    values_[{subject, id}] = clamp_unit(value);
  }

  TrustScore score(TrustSubject subject, const std::string& id) const {
    return TrustScore{get(subject, id), subject, id};
  }

  void penalize(TrustSubject subject, const std::string& id, AttackType attack,
                double beta = kDefaultPenaltyBeta) {
    set(subject, id, wfsim::penalize(score(subject, id), attack, beta).value);
  }

  void reward(TrustSubject subject, const std::string& id,
              double alpha = kDefaultRewardAlpha) {
    set(subject, id, wfsim::reward(score(subject, id), alpha).value);
  }

  void apply(const TrustOp& op) {
    if (op.kind == TrustOp::Kind::Penalize) {
      penalize(op.subject, op.subject_id, *op.attack, op.param);
    } else {
      reward(op.subject, op.subject_id, op.param);
    }
  }

  json snapshot_json() const {
    json j = json::array();
    for (const auto& [key, value] : values_) {
      j.push_back({{"subject", std::string(to_string(key.first))},
                   {"subject_id", key.second},
                   {"value", value}});
    }
    return j;
  }

  void save_snapshot(const std::string& path) const {
    save_json_file(snapshot_json(), path);
  }

 private:
  std::map<std::pair<TrustSubject, std::string>, double> values_;
};

/// Read snapshot of a registry plus instance-local updates. Each workflow
/// instance sees the batch-start trust plus its own penalties/rewards; the
/// recorded ops are merged into the registry once the batch completes.
class TrustView {
 public:
  TrustView() = default;
  explicit TrustView(const TrustRegistry& base) : base_(&base) {}

  double get(TrustSubject subject, const std::string& id) const {
    auto it = local_.find({subject, id});
    if (it != local_.end()) return it->second;
    return base_ ? base_->get(subject, id) : 1.0;
  }

  void penalize(TrustSubject subject, const std::string& id, AttackType attack,
                double beta, double sim_time, const std::string& instance_id) {
    TrustScore s{get(subject, id), subject, id};
    local_[{subject, id}] = wfsim::penalize(s, attack, beta).value;
    ops_.push_back(TrustOp{TrustOp::Kind::Penalize, subject, id, attack, beta,
                           sim_time, instance_id,
                           static_cast<int>(ops_.size())});
  }

  void reward(TrustSubject subject, const std::string& id, double alpha,
              double sim_time, const std::string& instance_id) {
    TrustScore s{get(subject, id), subject, id};
    local_[{subject, id}] = wfsim::reward(s, alpha).value;
    ops_.push_back(TrustOp{TrustOp::Kind::Reward, subject, id, std::nullopt,
                           alpha, sim_time, instance_id,
                           static_cast<int>(ops_.size())});
  }

  const std::vector<TrustOp>& ops() const { return ops_; }

 private:
  const TrustRegistry* base_ = nullptr;
  std::map<std::pair<TrustSubject, std::string>, double> local_;
  std::vector<TrustOp> ops_;
};

}  // namespace wfsim
