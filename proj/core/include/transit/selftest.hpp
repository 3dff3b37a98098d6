#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace transit::selftest {

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

// Loss and gradient oracles on desk-size instances; prints one line per
// check when `out` is given. Returns true when everything passed.
bool run_all(std::ostream* out = nullptr);
std::vector<CheckResult> run_checks();

}  // namespace transit::selftest
