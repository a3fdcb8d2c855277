#include "osbm/report.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "osbm/verify.hpp"

namespace osbm {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

VerifyCase make_case(std::string name, double statistic, double threshold, Json details) {
  VerifyCase c;
  c.name = std::move(name);
  c.statistic = statistic;
  c.threshold = threshold;
  c.passed = std::isfinite(statistic) && statistic <= threshold;
  c.details = std::move(details);
  return c;
}

bool VerifyReport::all_passed() const noexcept {
  for (const auto& c : cases) {
    if (!c.passed) return false;
  }
  return true;
}

void VerifyReport::adjudicate(const std::string& key, const std::string& outcome) {
  for (auto& [k, v] : adjudications) {
    if (k == key) {
      v = outcome;
      return;
    }
  }
  adjudications.emplace_back(key, outcome);
}

namespace {

// JSON has no literal for non-finite numbers; they are written as strings.
Json number_or_string(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

}  // namespace

std::string report_json(const VerifyReport& report, int indent) {
  Json j;
  j["schema"] = 1;
  j["suite"] = report.suite;
  j["seed"] = report.seed;
  j["params"] = report.params;
  Json cases = Json::array();
  for (const auto& c : report.cases) {
    Json jc;
    jc["name"] = c.name;
    jc["statistic"] = number_or_string(c.statistic);
    jc["threshold"] = number_or_string(c.threshold);
    jc["passed"] = c.passed;
    jc["details"] = c.details;
    cases.push_back(std::move(jc));
  }
  j["cases"] = std::move(cases);
  Json adj = Json::object();
  for (const auto& [k, v] : report.adjudications) adj[k] = v;
  j["adjudications"] = std::move(adj);
  return j.dump(indent) + "\n";
}

}  // namespace osbm
