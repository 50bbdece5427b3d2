#pragma once

#include <map>
#include <string>
#include <vector>

namespace lcs {

/// One named boolean outcome with an optional witness.
struct Check {
  std::string name;
  bool holds = true;
  std::string witness;
};

/// Checks, displayed subgroups and layer data of one degree.
struct DegreeReport {
  int degree = 0;
  std::vector<Check> checks;
  /// label -> formatted igs
  std::vector<std::pair<std::string, std::string>> terms;
  std::vector<std::pair<std::string, std::vector<std::string>>> divisors;
  std::vector<std::string> certificates;

  bool holds() const {
    for (const auto& c : checks)
      if (!c.holds) return false;
    return true;
  }
  void check(std::string name, bool ok, std::string witness = "") {
    checks.push_back({std::move(name), ok, std::move(witness)});
  }
};

/// Degree-by-degree verification of one statement.
struct TheoremReport {
  std::string theorem;
  std::string mode;
  int class_bound = 0;
  std::string exactness_note;
  std::vector<std::string> notes;
  std::vector<Check> global_checks;
  std::vector<DegreeReport> degrees;

  bool holds() const {
    for (const auto& c : global_checks)
      if (!c.holds) return false;
    for (const auto& d : degrees)
      if (!d.holds()) return false;
    return true;
  }
};

}  // namespace lcs
