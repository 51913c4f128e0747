#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "lsreconn/angular_eigensolver.hpp"
#include "testkit.hpp"

using namespace lsreconn;
constexpr double pi = std::numbers::pi;

namespace {

AngularTrace trace_of(double a, double b, double c, double d) {
  AngularTrace t;
  t.value = {a, b, c, d};
  return t;
}

// Gauss-Legendre nodes on [0, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(pi * (i + 0.75) / (n + 0.5)), dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1 - z);
    w[i] = 1.0 / ((1 - z * z) * dp * dp);
  }
}

// Mass and stiffness integrals by high-order Gauss quadrature per sector.
void oracle_matrices(const AngularTrace& t, AngularMatrix& G, AngularMatrix& B) {
  G.setZero();
  B.setZero();
  std::vector<double> xs, ws;
  gauss_legendre(24, xs, ws);
  double phi[kAngularBasisSize], dphi[kAngularBasisSize];
  const double dth = pi / 2;
  for (int e = 0; e < 4; ++e) {
    for (std::size_t k = 0; k < xs.size(); ++k) {
      angular_basis(e, xs[k], phi, dphi);
      for (int i = 0; i < kAngularBasisSize; ++i) {
        for (int j = 0; j < kAngularBasisSize; ++j) {
          B(i, j) += ws[k] * t.value[e] * phi[i] * phi[j] * dth;
          G(i, j) += ws[k] * t.value[e] * (dphi[i] / dth) * (dphi[j] / dth) * dth;
        }
      }
    }
  }
}

double first_positive(const std::vector<EigenPair>& pairs) {
  for (const auto& p : pairs) {
    if (p.exponent > 1e-6) return p.exponent;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("assembly matches high-order Gauss quadrature") {
  for (const AngularTrace& t : {trace_of(1, 1, 1, 1), trace_of(1, 10, 1, 10), trace_of(2, 10, 7, 1)}) {
    AngularMatrix G, B;
    oracle_matrices(t, G, B);
    const EigenSystem sys = assemble_eigensystem(t);
    CHECK((sys.B - B).cwiseAbs().maxCoeff() <= 1e-12 * B.cwiseAbs().maxCoeff());
    CHECK((sys.G - G).cwiseAbs().maxCoeff() <= 1e-12 * G.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("hat block mass equals the trace times the hat coverage") {
  const double p = 3.0;
  const EigenSystem sys = assemble_eigensystem(trace_of(p, p, p, p));
  const double total = sys.B.bottomRightCorner(4, 4).sum();
  CHECK(total == doctest::Approx(p * 2 * pi / 16).epsilon(1e-13));
}

TEST_CASE("matrices are symmetric and scale linearly with the trace") {
  const EigenSystem a = assemble_eigensystem(trace_of(2, 10, 7, 1));
  const EigenSystem b = assemble_eigensystem(trace_of(6, 30, 21, 3));
  CHECK((a.G - a.G.transpose()).cwiseAbs().maxCoeff() <= 1e-15 * a.G.cwiseAbs().maxCoeff());
  CHECK((a.B - a.B.transpose()).cwiseAbs().maxCoeff() <= 1e-15 * a.B.cwiseAbs().maxCoeff());
  CHECK((b.G - 3.0 * a.G).cwiseAbs().maxCoeff() <= 1e-13 * b.G.cwiseAbs().maxCoeff());
  CHECK((b.B - 3.0 * a.B).cwiseAbs().maxCoeff() <= 1e-13 * b.B.cwiseAbs().maxCoeff());
  CHECK_THROWS(assemble_eigensystem(trace_of(1, 0, 1, 1)));
}

TEST_CASE("constant trace gives the Fourier exponents") {
  const auto pairs = solve_eigenpairs(assemble_eigensystem(trace_of(1, 1, 1, 1)));
  REQUIRE(pairs.size() == 16);
  CHECK(pairs[0].exponent < 1e-6);
  CHECK(std::abs(pairs[1].exponent - 1.0) <= 1e-6);
  CHECK(std::abs(pairs[2].exponent - 1.0) <= 1e-6);
  // Cubic elements resolve the Lambda = 2 pair only to about 1e-3.
  CHECK(std::abs(pairs[3].exponent - 2.0) <= 1e-3);
  CHECK(std::abs(pairs[4].exponent - 2.0) <= 1e-3);
  for (std::size_t k = 1; k < pairs.size(); ++k) CHECK(pairs[k].exponent >= pairs[k - 1].exponent);
}

TEST_CASE("checkerboard exponent matches the transfer-matrix oracle") {
  const AngularTrace t = trace_of(1, 10, 1, 10);
  const auto roots = semi_analytic_exponents(t);
  REQUIRE(!roots.empty());
  CHECK(roots.front() < 1.0);
  const auto pairs = solve_eigenpairs(assemble_eigensystem(t));
  CHECK(std::abs(first_positive(pairs) - roots.front()) <= 1e-4);
}

TEST_CASE("FE exponents track the oracle for random traces") {
  testkit::Gen gen(31);
  for (int trial = 0; trial < 15; ++trial) {
    const auto v = gen.params(4, 1.0, 100.0);
    const AngularTrace t = trace_of(v[0], v[1], v[2], v[3]);
    const auto roots = semi_analytic_exponents(t, 1.5);
    const auto pairs = solve_eigenpairs(assemble_eigensystem(t));
    REQUIRE(!roots.empty());
    CHECK(std::abs(first_positive(pairs) - roots.front()) <= 1e-4);
  }
}

TEST_CASE("exponents are invariant under trace scaling") {
  const auto a = solve_eigenpairs(assemble_eigensystem(trace_of(2, 10, 7, 1)));
  const auto b = solve_eigenpairs(assemble_eigensystem(trace_of(0.2, 1, 0.7, 0.1)));
  CHECK(std::abs(a[0].exponent - b[0].exponent) <= 1e-6);
  for (std::size_t k = 1; k < a.size(); ++k) CHECK(a[k].exponent == doctest::Approx(b[k].exponent).epsilon(1e-9));
}

TEST_CASE("eigenvectors are B-orthonormal with small residuals") {
  for (const AngularTrace& t : {trace_of(1, 1, 1, 1), trace_of(1, 10, 1, 10), trace_of(2, 10, 7, 1)}) {
    const EigenSystem sys = assemble_eigensystem(t);
    const auto pairs = solve_eigenpairs(sys);
    double worst = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      for (std::size_t j = 0; j < pairs.size(); ++j) {
        const double ip = pairs[i].rho_b.dot(sys.B * pairs[j].rho_b);
        worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
      }
      CHECK(pairs[i].residual <= 1e-10);
    }
    CHECK(worst <= 1e-10);
  }
}

TEST_CASE("eigenfunctions have unit L2 norm and are continuous") {
  const auto pairs = solve_eigenpairs(assemble_eigensystem(trace_of(2, 10, 7, 1)));
  for (const auto& p : pairs) {
    CHECK(angular_inner(p, p) == doctest::Approx(1.0).epsilon(1e-10));
    for (int k = 0; k < 4; ++k) {
      const double th = k * pi / 2;
      const double left = angular_eval(p, th - 1e-13)[0], right = angular_eval(p, th + 1e-13)[0];
      CHECK(std::abs(left - right) <= 1e-11);
    }
  }
}

TEST_CASE("first constant-trace mode is a sinusoid") {
  const auto pairs = solve_eigenpairs(assemble_eigensystem(trace_of(1, 1, 1, 1)));
  const EigenPair& p = pairs[1];
  const int m = 360;
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (int k = 0; k < m; ++k) {
    const double th = 2 * pi * k / m;
    a(k, 0) = std::cos(th);
    a(k, 1) = std::sin(th);
    y[k] = angular_eval(p, th)[0];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
  CHECK((a * c - y).cwiseAbs().maxCoeff() <= 1e-3);
  CHECK(c.norm() == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-3));
  // Derivative against the fitted sinusoid.
  for (int k = 0; k < 12; ++k) {
    const double th = 0.3 + 0.5 * k;
    CHECK(angular_eval(p, th)[1] == doctest::Approx(-c[0] * std::sin(th) + c[1] * std::cos(th)).epsilon(1e-2));
  }
}

TEST_CASE("selection keeps exponents strictly inside (0, 1)") {
  CHECK(select_singular(solve_eigenpairs(assemble_eigensystem(trace_of(1, 1, 1, 1))), 4).empty());
  const auto k = select_singular(solve_eigenpairs(assemble_eigensystem(trace_of(1, 10, 1, 10))), 4);
  REQUIRE(!k.empty());
  for (const auto& p : k) {
    CHECK(p.exponent > 0.0);
    CHECK(p.exponent < 1.0);
  }
  CHECK(select_singular(solve_eigenpairs(assemble_eigensystem(trace_of(1, 10, 1, 10))), 1).size() == 1);
  EigenPair one;
  one.exponent = 1.0 - 1e-12;
  EigenPair half;
  half.exponent = 0.5;
  CHECK(select_singular({half, one}, 5).size() == 1);
}

TEST_CASE("widened selection admits the constant and regular modes") {
  const auto all = solve_eigenpairs(assemble_eigensystem(trace_of(1, 1, 1, 1)));
  const auto w = select_singular(all, 16, 1e-6, SelectionRule{2.5, true});
  REQUIRE(w.size() == 5);
  CHECK(w[0].exponent < 1e-6);
  CHECK(select_singular(all, 16, 1e-6, SelectionRule{2.5, false}).size() == 4);
}

TEST_CASE("transfer-matrix oracle") {
  const auto c = semi_analytic_exponents(trace_of(1, 1, 1, 1));
  REQUIRE(c.size() >= 2);
  CHECK(c.front() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(std::count_if(c.begin(), c.end(), [](double v) { return std::abs(v - 2.0) < 1e-6; }) >= 1);
  const auto near = semi_analytic_exponents(trace_of(1, 1.0001, 1, 1.0001));
  REQUIRE(!near.empty());
  CHECK(near.front() == doctest::Approx(1.0).epsilon(1e-3));
  const AngularTrace k = trace_of(1, 10, 1, 10);
  const double coarse = semi_analytic_exponents(k, 2.0, 1e-3).front();
  const double fine = semi_analytic_exponents(k, 2.0, 1e-4).front();
  CHECK(std::abs(coarse - fine) <= 1e-10);
  CHECK(std::abs(transfer_characteristic(k, coarse)) <= 1e-8);
}

TEST_CASE("Jacobi eigensolver on a random symmetric matrix") {
  testkit::Gen gen(6);
  const Eigen::MatrixXd r = gen.matrix(9, 9);
  const Eigen::MatrixXd a = r + r.transpose();
  const JacobiResult j = jacobi_eigen(a);
  const Eigen::MatrixXd back = j.vectors * j.values.asDiagonal() * j.vectors.transpose();
  CHECK((back - a).cwiseAbs().maxCoeff() <= 1e-11);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(a);
  Eigen::VectorXd mine = j.values;
  std::sort(mine.data(), mine.data() + mine.size());
  CHECK((mine - ref.eigenvalues()).cwiseAbs().maxCoeff() <= 1e-11);
  CHECK_THROWS(jacobi_eigen(Eigen::MatrixXd::Ones(2, 3)));
}
