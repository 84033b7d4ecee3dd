#pragma once

#include <string>
#include <vector>

namespace manismooth {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// manifold, smoothing, lemmas, solver, all.
const std::vector<std::string>& check_suite_names();

/// Runs a property suite with fixed internal seeds. Throws ConfigurationError
/// for an unknown suite name.
std::vector<PropertyResult> run_check_suite(const std::string& suite);

}  // namespace manismooth
