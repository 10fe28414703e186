#pragma once

// JSON report building blocks for the command-line tool. Every report is one
// object: {schema_version, command, inputs, parameters, result, wall_time_ms}.

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "probisim/epsilon.hpp"
#include "probisim/galois_sim.hpp"
#include "probisim/pts.hpp"

namespace probisim::report {

inline constexpr int kSchemaVersion = 1;

using nlohmann::ordered_json;

/// 64-bit FNV-1a of the raw bytes, as 16 hex digits.
inline std::string fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

inline ordered_json input(std::string_view path, std::string_view content) {
  return ordered_json{{"path", std::string(path)}, {"fnv1a64", fnv1a64(content)}, {"bytes", content.size()}};
}

inline ordered_json skeleton(std::string_view command) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = std::string(command);
  j["inputs"] = ordered_json::array();
  j["parameters"] = ordered_json::object();
  j["result"] = ordered_json::object();
  return j;
}

inline ordered_json blocks(const Partition& p, const std::vector<std::string>& names) {
  ordered_json out = ordered_json::array();
  for (const auto& b : p.blocks()) {
    ordered_json block = ordered_json::array();
    for (auto s : b) block.push_back(names[s]);
    out.push_back(block);
  }
  return out;
}

/// {"state": class, ...} in state order.
inline ordered_json classification(const Classification& c, const std::vector<std::string>& names) {
  ordered_json out = ordered_json::object();
  for (std::size_t s = 0; s < c.n(); ++s) out[names[s]] = c[s];
  return out;
}

inline ordered_json matrix(const Matrix& m) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    out.push_back(row);
  }
  return out;
}

inline ordered_json system(const LabelledPTS& p) {
  ordered_json out = ordered_json::object();
  out["states"] = p.n;
  ordered_json trans = ordered_json::object();
  for (const auto& [a, m] : p.trans) trans[a] = matrix(m);
  out["transitions"] = trans;
  return out;
}

/// JSON has no infinity; an unbounded epsilon is reported as null.
inline ordered_json epsilon(const EpsilonResult& r, const std::vector<std::string>& names1,
                            const std::vector<std::string>& names2) {
  ordered_json out;
  out["epsilon"] = r.found() ? ordered_json(r.epsilon) : ordered_json(nullptr);
  out["found"] = r.found();
  out["norm"] = std::string(to_string(r.options.norm));
  out["aggregation"] = std::string(to_string(r.options.aggregation));
  out["witnesses"] = std::string(to_string(r.options.policy));
  out["method"] = std::string(to_string(r.method));
  out["optimal"] = r.optimal;
  out["evaluated"] = r.evaluated;
  if (r.found()) {
    out["classes"] = r.k1->m();
    out["k1"] = classification(*r.k1, names1);
    out["k2"] = classification(*r.k2, names2);
  }
  return out;
}

inline ordered_json state_set(StateSet s, const std::vector<std::string>& names) {
  ordered_json out = ordered_json::array();
  for (auto c : members(s)) out.push_back(names[c]);
  return out;
}

}  // namespace probisim::report
