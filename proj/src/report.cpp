#include "dnspec/report.hpp"

namespace dnspec {

const char* const kTorusNote =
    "domain surrogate: 2pi-periodic torus lattice; frequency-local statements only";

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

void Report::merge_verdict(Verdict v) {
  if (v == Verdict::fail || verdict == Verdict::fail)
    verdict = Verdict::fail;
  else if (v == Verdict::inconclusive || verdict == Verdict::inconclusive)
    verdict = Verdict::inconclusive;
}

nlohmann::ordered_json Report::to_json() const {
  nlohmann::ordered_json j;
  j["name"] = name;
  j["verdict"] = to_string(verdict);
  j["config"] = config;
  j["constants"] = constants;
  j["tolerances"] = tolerances;
  j["grid_sizes"] = grid_sizes;
  j["seeds"] = seeds;
  j["notes"] = notes;
  return j;
}

std::string Report::summary() const {
  std::string s = name + ": " + to_string(verdict);
  for (auto it = constants.begin(); it != constants.end(); ++it)
    s += "  " + it.key() + "=" + it.value().dump();
  return s;
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::inconclusive: return 3;
  }
  return 1;
}

}  // namespace dnspec
