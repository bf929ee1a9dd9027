#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace wfsim {

using json = nlohmann::ordered_json;

// Field accessors that name the offending field on failure, so load errors
// read like "task[3].requirement: missing field 'c'".

inline const json& require_field(const json& obj, const std::string& context,
                                 const std::string& name) {
  if (!obj.is_object()) {
    throw std::runtime_error(context + ": expected an object");
  }
  auto it = obj.find(name);
  if (it == obj.end()) {
    throw std::runtime_error(context + ": missing field '" + name + "'");
  }
  return *it;
}

inline double require_number(const json& obj, const std::string& context,
                             const std::string& name) {
  const json& v = require_field(obj, context, name);
  if (!v.is_number()) {
    throw std::runtime_error(context + "." + name + ": expected a number");
  }
  return v.get<double>();
}

inline std::string require_string(const json& obj, const std::string& context,
                                  const std::string& name) {
  const json& v = require_field(obj, context, name);
  if (!v.is_string()) {
    throw std::runtime_error(context + "." + name + ": expected a string");
  }
  return v.get<std::string>();
}

inline const json& require_array(const json& obj, const std::string& context,
                                 const std::string& name) {
  const json& v = require_field(obj, context, name);
  if (!v.is_array()) {
    throw std::runtime_error(context + "." + name + ": expected an array");
  }
  return v;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": parse error: " + e.what());
  }
}

inline void save_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  out << j.dump(2) << '\n';
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

}  // namespace wfsim
