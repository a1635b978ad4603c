#pragma once

// Named residual entries and their JSON serialization.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "chiral/model.hpp"

namespace chiral {

using Json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "1.0.0";

/// JSON has no infinity or NaN; those values are written as the largest
/// finite double and flagged in the context.
inline double json_safe(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

inline Json point_json(SpacetimePoint x) {
  return Json{{"t", x.t()}, {"x", x.x()}, {"xplus", x.xplus}, {"xminus", x.xminus}};
}

struct ResidualEntry {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  Json context = Json::object();

  Json to_json() const {
    Json ctx = context;
    if (!std::isfinite(value)) ctx["non_finite"] = true;
    return Json{{"name", name},
                {"value", json_safe(value)},
                {"tolerance", json_safe(tolerance)},
                {"pass", pass},
                {"context", std::move(ctx)}};
  }
};

/// pass iff value <= tolerance (a NaN value fails).
inline ResidualEntry make_entry(std::string name, double value, double tolerance,
                                Json context = Json::object()) {
  const bool pass = value <= tolerance;
  return ResidualEntry{std::move(name), value, tolerance, pass, std::move(context)};
}

inline ResidualEntry make_entry(std::string name, const GridMax& m, double tolerance,
                                Json context = Json::object()) {
  if (m.seen) context["at"] = point_json(m.at);
  return make_entry(std::move(name), m.value, tolerance, std::move(context));
}

/// A construction or evaluation error turned into a failed entry.
inline ResidualEntry error_entry(std::string name, const std::string& what) {
  return ResidualEntry{std::move(name), std::numeric_limits<double>::infinity(), 0.0, false,
                       Json{{"error", what}}};
}

class ResidualReport {
public:
  void add(ResidualEntry e) { entries_.push_back(std::move(e)); }
  void add_finding(ResidualEntry e) { findings_.push_back(std::move(e)); }

  const std::vector<ResidualEntry>& entries() const { return entries_; }
  const std::vector<ResidualEntry>& findings() const { return findings_; }

  /// Findings record disagreements with printed closed forms and do not
  /// affect the overall verdict.
  bool all_pass() const {
    return std::all_of(entries_.begin(), entries_.end(),
                       [](const ResidualEntry& e) { return e.pass; });
  }

  const ResidualEntry* find(const std::string& name) const {
    for (const auto* list : {&entries_, &findings_})
      for (const ResidualEntry& e : *list)
        if (e.name == name) return &e;
    return nullptr;
  }

  void sort() {
    auto by_name = [](const ResidualEntry& a, const ResidualEntry& b) { return a.name < b.name; };
    std::stable_sort(entries_.begin(), entries_.end(), by_name);
    std::stable_sort(findings_.begin(), findings_.end(), by_name);
  }

  Json to_json(Json config_echo) const {
    Json entries = Json::array();
    for (const ResidualEntry& e : entries_) entries.push_back(e.to_json());
    Json findings = Json::array();
    for (const ResidualEntry& e : findings_) findings.push_back(e.to_json());
    std::size_t failed = 0;
    for (const ResidualEntry& e : entries_) failed += e.pass ? 0 : 1;
    return Json{{"version", kVersion},
                {"pass", all_pass()},
                {"summary", {{"entries", entries_.size()}, {"failed", failed},
                             {"findings", findings_.size()}}},
                {"config_echo", std::move(config_echo)},
                {"entries", std::move(entries)},
                {"findings", std::move(findings)}};
  }

private:
  std::vector<ResidualEntry> entries_;
  std::vector<ResidualEntry> findings_;
};

}  // namespace chiral
