#pragma once

#include <algorithm>
#include <stdexcept>

#include "wfsim/cloudenv.hpp"
#include "wfsim/model.hpp"
#include "wfsim/trust.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

inline constexpr double kSecurityFitEpsilon = 1e-6;

/// What the middleware sees of a task: requirement and weights only. No
/// tenant, workflow, or task identity crosses this boundary.
struct SchedulingRequest {
  SecurityRequirement requirement;
  WeightVector weights;
  bool anonymized = false;

  bool operator==(const SchedulingRequest&) const = default;
};

inline SchedulingRequest anonymize(const Task& task,
                                   const WeightVector& weights) {
  return SchedulingRequest{task.requirement, weights, true};
}

/// How well the service's offered CIA levels cover the requirement: per
/// objective the ratio strength/requirement capped at 1, averaged.
inline double security_fit(const SecurityRequirement& strength,
                           const SecurityRequirement& requirement) {
  auto fit = [](double offered, double required) {
    return std::min(1.0, offered / std::max(required, kSecurityFitEpsilon));
  };
  return (fit(strength.confidentiality, requirement.confidentiality) +
          fit(strength.integrity, requirement.integrity) +
          fit(strength.availability, requirement.availability)) /
         3.0;
}

/// Weighted service score; lower is better. Time and price are normalized by
/// the catalog attribute ranges so scores stay comparable across catalogs;
/// the security term discounts the claimed CIA strength by the trust placed
/// in the service.
inline double score(const Service& service, const SchedulingRequest& request,
                    double trust) {
  const double norm_time = (service.response_time - kResponseTimeMin) /
                           (kResponseTimeMax - kResponseTimeMin);
  const double norm_price =
      (service.price - kPriceMin) / (kPriceMax - kPriceMin);
  return request.weights.time * norm_time +
         request.weights.price * norm_price -
         request.weights.security *
             security_fit(service.strength, request.requirement) * trust;
}

/// Trust placed in a service: the weaker of the service's own score and its
/// provider's.
inline double effective_trust(const Service& service, const TrustView& trust) {
  return std::min(trust.get(TrustSubject::Service, service.id),
                  trust.get(TrustSubject::Provider, service.provider_id));
}

namespace detail {

template <typename Filter>
inline const Service* best_service(const Catalog& catalog,
                                   const SchedulingRequest& request,
                                   const TrustView& trust, Filter&& keep) {
  const Service* best = nullptr;
  double best_score = 0.0;
  for (const Service& s : catalog.services) {
    if (!keep(s)) continue;
    const double sc = score(s, request, effective_trust(s, trust));
    if (!best || sc < best_score || (sc == best_score && s.id < best->id)) {
      best = &s;
      best_score = sc;
    }
  }
  return best;
}

}  // namespace detail

/// Picks the catalog-wide argmin of `score` for the task; ties break on the
/// lexicographically smaller service id.
inline const Service& schedule(const Task& task, const Workflow& workflow,
                               const Catalog& catalog, const TrustView& trust) {
  if (task.kind != TaskKind::ServiceTask) {
    throw std::invalid_argument("schedule: only service tasks are scheduled");
  }
  if (catalog.services.empty()) {
    throw std::runtime_error("schedule: empty service catalog");
  }
  const SchedulingRequest request = anonymize(task, workflow.weights);
  return *detail::best_service(catalog, request, trust,
                               [](const Service&) { return true; });
}

/// Picks the backup source for re-execution/redundancy after `failed` was
/// compromised: best-scoring service on a different provider when one
/// exists, otherwise any other service. A single-service catalog has no
/// backup to offer.
inline const Service& backup_service(const Service& failed, const Task& task,
                                     const Catalog& catalog,
                                     const TrustView& trust,
                                     const WeightVector& weights) {
  if (catalog.services.size() < 2) {
    throw std::runtime_error("backup_service: no backup service available");
  }
  const SchedulingRequest request = anonymize(task, weights);
  const Service* best = detail::best_service(
      catalog, request, trust, [&](const Service& s) {
        return s.id != failed.id && s.provider_id != failed.provider_id;
      });
  if (!best) {
    best = detail::best_service(catalog, request, trust, [&](const Service& s) {
      return s.id != failed.id;
    });
  }
  return *best;
}

}  // namespace wfsim
