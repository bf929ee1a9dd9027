#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wfsim/json_io.hpp"
#include "wfsim/model.hpp"
#include "wfsim/rng.hpp"
#include "wfsim/types.hpp"

namespace wfsim {

// Attribute ranges of simulated cloud services (abstract units).
inline constexpr double kResponseTimeMin = 1.0;
inline constexpr double kResponseTimeMax = 50.0;
inline constexpr double kPriceMin = 0.1;
inline constexpr double kPriceMax = 10.0;

struct Service {
  std::string id;
  std::string provider_id;
  double response_time = 0.0;
  double price = 0.0;
  SecurityRequirement strength;  // CIA level the service offers
};

struct Provider {
  std::string id;
  std::vector<std::string> services;
};

struct Catalog {
  std::vector<Provider> providers;
  std::vector<Service> services;

  const Service* find_service(const std::string& id) const {
    for (const Service& s : services) {
      if (s.id == id) return &s;
    }
    return nullptr;
  }

  const Service& service(const std::string& id) const {
    const Service* s = find_service(id);
    if (!s) throw std::invalid_argument("unknown service: " + id);
    return *s;
  }
};

struct AttackEvent {
  AttackType attack_type = AttackType::DoS;
  std::string task_id;
  std::string service_id;
  std::string instance_id;
  double sim_time = 0.0;
};

struct ExecutionOutcome {
  std::string task_id;
  std::string service_id;
  double elapsed = 0.0;
  double charged = 0.0;
  std::optional<AttackEvent> attack;
};

/// Builds the multi-cloud offering: `n_providers` providers with
/// `services_per_provider` services each, attributes sampled uniformly from
/// the ranges above. Ids are deterministic: provider0.., service0.. numbered
/// across the whole catalog.
inline Catalog generate_catalog(int n_providers, int services_per_provider,
                                Rng& rng) {
  if (n_providers < 1 || services_per_provider < 1) {
    throw std::invalid_argument("generate_catalog: counts must be >= 1");
  }
  Catalog catalog;
  int service_index = 0;
  for (int p = 0; p < n_providers; ++p) {
    Provider provider;
    provider.id = "provider" + std::to_string(p);
    for (int s = 0; s < services_per_provider; ++s) {
      Service service;
      service.id = "service" + std::to_string(service_index++);
      service.provider_id = provider.id;
      service.response_time = rng.uniform(kResponseTimeMin, kResponseTimeMax);
      service.price = rng.uniform(kPriceMin, kPriceMax);
      service.strength = {rng.uniform01(), rng.uniform01(), rng.uniform01()};
      provider.services.push_back(service.id);
      catalog.services.push_back(std::move(service));
    }
    catalog.providers.push_back(std::move(provider));
  }
  return catalog;
}

/// One Bernoulli(attack_rate) trial; on a hit the attack type is drawn
/// uniformly from the four types.
inline std::optional<AttackType> draw_attack(double attack_rate, Rng& rng) {
  if (!rng.bernoulli(attack_rate)) return std::nullopt;
  return kAllAttackTypes[rng.uniform_index(kAllAttackTypes.size())];
}

/// Runs a service task on a cloud service. Elapsed time and charge are the
/// service's response time and price; with probability `attack_rate` the
/// execution is hit by an attack. `instance_id` and `completed_at` stamp the
/// attack event for downstream bookkeeping.
inline ExecutionOutcome execute(const Task& task, const Service& service,
                                double attack_rate, Rng& rng,
                                const std::string& instance_id = {},
                                double completed_at = 0.0) {
  if (task.kind != TaskKind::ServiceTask) {
    throw std::invalid_argument(
        "execute: user tasks are not dispatched to cloud services");
  }
  ExecutionOutcome outcome;
  outcome.task_id = task.id;
  outcome.service_id = service.id;
  outcome.elapsed = service.response_time;
  outcome.charged = service.price;
  if (auto attack = draw_attack(attack_rate, rng)) {
    outcome.attack = AttackEvent{*attack, task.id, service.id, instance_id,
                                 completed_at};
  }
  return outcome;
}

inline json catalog_to_json(const Catalog& catalog) {
  json j;
  json providers = json::array();
  for (const Provider& p : catalog.providers) {
    json jp;
    jp["id"] = p.id;
    json services = json::array();
    for (const std::string& sid : p.services) {
      const Service& s = catalog.service(sid);
      services.push_back({{"id", s.id},
                          {"response_time", s.response_time},
                          {"price", s.price},
                          {"strength",
                           {{"c", s.strength.confidentiality},
                            {"i", s.strength.integrity},
                            {"a", s.strength.availability}}}});
    }
    jp["services"] = std::move(services);
    providers.push_back(std::move(jp));
  }
  j["providers"] = std::move(providers);
  return j;
}

inline Catalog catalog_from_json(const json& j) {
  Catalog catalog;
  for (const json& jp : require_array(j, "catalog", "providers")) {
    Provider provider;
    provider.id = require_string(jp, "provider", "id");
    const std::string ctx = "provider '" + provider.id + "'";
    for (const json& js : require_array(jp, ctx, "services")) {
      Service s;
      s.id = require_string(js, ctx + ".service", "id");
      s.provider_id = provider.id;
      s.response_time = require_number(js, s.id, "response_time");
      s.price = require_number(js, s.id, "price");
      const json& strength = require_field(js, s.id, "strength");
      s.strength = {require_number(strength, s.id + ".strength", "c"),
                    require_number(strength, s.id + ".strength", "i"),
                    require_number(strength, s.id + ".strength", "a")};
      provider.services.push_back(s.id);
      catalog.services.push_back(std::move(s));
    }
    catalog.providers.push_back(std::move(provider));
  }
  return catalog;
}

inline void save_catalog(const Catalog& catalog, const std::string& path) {
  save_json_file(catalog_to_json(catalog), path);
}

inline Catalog load_catalog(const std::string& path) {
  return catalog_from_json(load_json_file(path));
}

}  // namespace wfsim
