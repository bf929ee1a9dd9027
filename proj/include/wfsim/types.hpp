#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wfsim {

/// Confidentiality / integrity / availability triple, each in [0, 1].
/// Used for task requirements, service strengths, attack impacts, and
/// adaptation mitigation impacts alike.
struct SecurityRequirement {
  double confidentiality = 0.0;
  double integrity = 0.0;
  double availability = 0.0;

  bool in_unit_range() const {
    auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
    return ok(confidentiality) && ok(integrity) && ok(availability);
  }

  bool operator==(const SecurityRequirement&) const = default;
};

/// Tenant preference weights for time, price, and security.
struct WeightVector {
  double time = 0.0;
  double price = 0.0;
  double security = 0.0;

  bool valid() const {
    return time >= 0.0 && price >= 0.0 && security >= 0.0 &&
           time + price + security > 0.0;
  }

  bool operator==(const WeightVector&) const = default;
};

enum class AttackType { DoS, Probe, U2R, R2L };

inline constexpr std::array<AttackType, 4> kAllAttackTypes{
    AttackType::DoS, AttackType::Probe, AttackType::U2R, AttackType::R2L};

/// Per-attack CIA impact vector.
inline SecurityRequirement attack_impact(AttackType type) {
  switch (type) {
    case AttackType::DoS:
      return {0.56, 0.56, 0.56};
    case AttackType::Probe:
      return {0.22, 0.22, 0.0};
    case AttackType::U2R:
      return {0.56, 0.22, 0.22};
    case AttackType::R2L:
      return {0.56, 0.56, 0.22};
  }
  throw std::logic_error("unknown attack type");
}

inline std::string_view to_string(AttackType type) {
  switch (type) {
    case AttackType::DoS:
      return "DoS";
    case AttackType::Probe:
      return "Probe";
    case AttackType::U2R:
      return "U2R";
    case AttackType::R2L:
      return "R2L";
  }
  throw std::logic_error("unknown attack type");
}

inline AttackType attack_type_from_string(std::string_view s) {
  for (AttackType t : kAllAttackTypes) {
    if (to_string(t) == s) return t;
  }
  throw std::invalid_argument("unknown attack type: " + std::string(s));
}

/// Runtime responses to a detected violation. Enum order doubles as the
/// final tie-break when decision costs and mitigation scores are equal.
enum class AdaptationKind { Late, Skip, ReExecute, Redundancy, Reconfig };

inline constexpr std::array<AdaptationKind, 5> kAllAdaptationKinds{
    AdaptationKind::Late, AdaptationKind::Skip, AdaptationKind::ReExecute,
    AdaptationKind::Redundancy, AdaptationKind::Reconfig};

inline std::string_view to_string(AdaptationKind kind) {
  switch (kind) {
    case AdaptationKind::Late:
      return "Late";
    case AdaptationKind::Skip:
      return "Skip";
    case AdaptationKind::ReExecute:
      return "ReExecute";
    case AdaptationKind::Redundancy:
      return "Redundancy";
    case AdaptationKind::Reconfig:
      return "Reconfig";
  }
  throw std::logic_error("unknown adaptation kind");
}

inline AdaptationKind adaptation_kind_from_string(std::string_view s) {
  for (AdaptationKind k : kAllAdaptationKinds) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown adaptation kind: " + std::string(s));
}

}  // namespace wfsim
