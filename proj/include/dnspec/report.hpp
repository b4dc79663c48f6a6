#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace dnspec {

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Verdict v);

/// Structured verification result. Serialization is deterministic: ordered
/// keys, insertion order fixed by the producing operation, no timestamps.
struct Report {
  std::string name;  // operation or theorem, e.g. "theorem1"
  Verdict verdict = Verdict::pass;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  nlohmann::ordered_json constants = nlohmann::ordered_json::object();
  nlohmann::ordered_json tolerances = nlohmann::ordered_json::object();
  std::vector<int> grid_sizes;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> notes;

  bool passed() const { return verdict == Verdict::pass; }

  void note(std::string text) { notes.push_back(std::move(text)); }
  /// Records a sub-verdict: fail dominates, then inconclusive.
  void merge_verdict(Verdict v);

  nlohmann::ordered_json to_json() const;
  std::string summary() const;  // single human-readable line
};

/// The lattice surrogate note attached to every report that depends on the
/// torus discretization.
extern const char* const kTorusNote;

int exit_code(Verdict v);  // pass 0, fail 1, inconclusive 3

}  // namespace dnspec
