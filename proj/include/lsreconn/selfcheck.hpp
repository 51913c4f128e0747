#pragma once

#include <string>
#include <vector>

namespace lsreconn {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Internal consistency checks: network jets against finite differences, the
/// reverse pass against a directional difference, cached assembly against a
/// direct pointwise assembly, Cholesky against SVD, angular exponents against
/// the transfer-matrix characteristic and cutoff identities.
std::vector<CheckResult> run_selfcheck();

}  // namespace lsreconn
