#pragma once

#include <vector>

namespace lsreconn {

struct GaussRule {
  std::vector<double> nodes;    ///< on [0, 1]
  std::vector<double> weights;  ///< sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1].
GaussRule gauss_legendre(int n);

}  // namespace lsreconn
