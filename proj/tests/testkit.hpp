#pragma once

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "lsreconn/composed_basis.hpp"
#include "lsreconn/cutoffs.hpp"
#include "lsreconn/geometry.hpp"
#include "lsreconn/ls_assembly.hpp"
#include "lsreconn/sampling.hpp"
#include "lsreconn/singular_basis.hpp"
#include "lsreconn/trainer.hpp"

namespace testkit {

using lsreconn::Point;

/// Small hand-rolled generator for property tests.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double normal() { return std::normal_distribution<double>()(rng); }

  /// Strictly increasing cuts inside (lo, hi) with a minimum gap.
  std::vector<double> cuts(int count, double lo, double hi) {
    std::vector<double> c;
    const double gap = (hi - lo) / (count + 1);
    for (int k = 0; k < count; ++k) c.push_back(lo + gap * (k + 1) + uniform(-0.3, 0.3) * gap);
    return c;
  }

  lsreconn::Geometry grid2d() {
    const double x0 = uniform(-2, 0), y0 = uniform(-2, 0);
    const double x1 = x0 + uniform(0.5, 3), y1 = y0 + uniform(0.5, 3);
    return lsreconn::Geometry::build_grid(2, cuts(integer(0, 3), x0, x1), cuts(integer(0, 3), y0, y1),
                                          {lsreconn::Interval{x0, x1}, lsreconn::Interval{y0, y1}});
  }

  std::vector<double> params(int n, double lo = 0.5, double hi = 10.0) {
    std::vector<double> p(n);
    for (auto& v : p) v = uniform(lo, hi);
    return p;
  }

  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = normal();
    return m;
  }
};

/// Distance in units in the last place between two doubles.
double ulp_distance(double a, double b);

/// 3x3 grid on (-1,1)^2 with a random network, its composed evaluation, the
/// epoch cache and singular sources for one parameter.
struct AssemblyFixture {
  lsreconn::Geometry geometry;
  lsreconn::CutoffLayout layout;
  lsreconn::QuadratureSet q;
  lsreconn::ComposedEvaluation eval;
  lsreconn::EpochCache cache;
  lsreconn::SingularBasis singular;
  Eigen::MatrixXd sources;
  std::vector<double> p;
};
AssemblyFixture make_assembly_fixture(std::uint64_t seed);

/// Matrix assembled point by point from the composed evaluation and the
/// geometry, without the epoch cache.
Eigen::MatrixXd direct_matrix(const AssemblyFixture& f, std::span<const double> p, double theta);

/// Small well-conditioned 1D problem (one subdomain) for gradient checks.
lsreconn::Problem toy_problem();

/// Measured quantities of the property suite.
struct JetDeviation {
  double grad = 0.0;       ///< max relative gradient deviation
  double laplacian = 0.0;  ///< max relative Laplacian deviation
};
JetDeviation network_jet_deviation(std::uint64_t seed);
double eta_c2_deviation();
double psi_slope_deviation();
double assembly_max_ulps(std::uint64_t seed);
double cholesky_svd_deviation(std::uint64_t seed);
struct DanskinCheck {
  double relative = 0.0;
  double condition = 0.0;  ///< cond(B^T B) of the first parameter's system
};
DanskinCheck danskin_deviation(std::uint64_t seed);
double affine_deviation(std::uint64_t seed);

}  // namespace testkit
