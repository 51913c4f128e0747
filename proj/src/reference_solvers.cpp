#include "lsreconn/reference_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "lsreconn/quadrature.hpp"

namespace lsreconn {

std::array<double, 2> exact_1d(const Geometry& geometry, std::span<const double> params, const Point& x) {
  if (geometry.dim() != 1) throw std::invalid_argument("exact_1d needs a 1D geometry");
  const Interval& b = geometry.bounds()[0];
  if (!(x[0] > b.lo && x[0] < b.hi)) throw std::invalid_argument("exact_1d: x outside the domain");
  if (static_cast<int>(params.size()) != geometry.subdomain_count())
    throw std::invalid_argument("exact_1d: parameter length does not match subdomain count");
  const auto& cuts = geometry.cuts_x();
  const int i = static_cast<int>(std::lower_bound(cuts.begin(), cuts.end(), x[0]) - cuts.begin());
  const double p = params[i];
  return {std::sin(5.0 * x[0]) / p, 5.0 * std::cos(5.0 * x[0]) / p};
}

FemSolution::FemSolution(const Geometry& geometry, int n, std::vector<double> element_p, Eigen::VectorXd nodal)
    : bounds_(geometry.bounds()), n_(n), element_p_(std::move(element_p)), nodal_(std::move(nodal)) {
  hx_ = bounds_[0].length() / n_;
  hy_ = bounds_[1].length() / n_;
}

void FemSolution::locate(const Point& x, int& ix, int& iy, double& s, double& t) const {
  const double u = (x[0] - bounds_[0].lo) / hx_;
  const double v = (x[1] - bounds_[1].lo) / hy_;
  ix = std::clamp(static_cast<int>(std::floor(u)), 0, n_ - 1);
  iy = std::clamp(static_cast<int>(std::floor(v)), 0, n_ - 1);
  s = u - ix;
  t = v - iy;
}

double FemSolution::value(const Point& x) const {
  int ix, iy;
  double s, t;
  locate(x, ix, iy, s, t);
  const int m = n_ + 1;
  const double u00 = nodal_[iy * m + ix], u10 = nodal_[iy * m + ix + 1];
  const double u01 = nodal_[(iy + 1) * m + ix], u11 = nodal_[(iy + 1) * m + ix + 1];
  return (1 - s) * (1 - t) * u00 + s * (1 - t) * u10 + (1 - s) * t * u01 + s * t * u11;
}

std::array<double, 2> FemSolution::gradient(const Point& x) const {
  int ix, iy;
  double s, t;
  locate(x, ix, iy, s, t);
  const int m = n_ + 1;
  const double u00 = nodal_[iy * m + ix], u10 = nodal_[iy * m + ix + 1];
  const double u01 = nodal_[(iy + 1) * m + ix], u11 = nodal_[(iy + 1) * m + ix + 1];
  return {((1 - t) * (u10 - u00) + t * (u11 - u01)) / hx_, ((1 - s) * (u01 - u00) + s * (u11 - u10)) / hy_};
}

std::array<double, 2> FemSolution::flux(const Point& x) const {
  int ix, iy;
  double s, t;
  locate(x, ix, iy, s, t);
  const double p = element_p_[iy * n_ + ix];
  const auto g = gradient(x);
  return {p * g[0], p * g[1]};
}

FemSolution fem_solve_2d(const Geometry& geometry, std::span<const double> params, const RhsSpec& rhs, int n) {
  if (geometry.dim() != 2) throw std::invalid_argument("fem_solve_2d needs a 2D geometry");
  if (n < 2) throw std::invalid_argument("fem_solve_2d: n must be >= 2");
  if (static_cast<int>(params.size()) != geometry.subdomain_count()) {
    throw std::invalid_argument("fem_solve_2d: parameter length does not match subdomain count");
  }
  const auto& b = geometry.bounds();
  const double hx = b[0].length() / n, hy = b[1].length() / n;
  auto aligned = [](const std::vector<double>& cuts, const Interval& iv, double h) {
    for (double c : cuts) {
      const double k = (c - iv.lo) / h;
      if (std::abs(k - std::round(k)) > 1e-9) return false;
    }
    return true;
  };
  if (!aligned(geometry.cuts_x(), b[0], hx) || !aligned(geometry.cuts_y(), b[1], hy)) {
    throw std::invalid_argument("fem_solve_2d: interfaces do not lie on grid lines for n = " + std::to_string(n));
  }

  const int m = n + 1;
  std::vector<double> element_p(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const Point c{b[0].lo + (ix + 0.5) * hx, b[1].lo + (iy + 0.5) * hy};
      element_p[iy * n + ix] = params[geometry.subdomain_index(c)];
    }
  }

  // Interior unknown numbering.
  std::vector<int> dof(static_cast<std::size_t>(m) * m, -1);
  int nd = 0;
  for (int j = 1; j < n; ++j) {
    for (int i = 1; i < n; ++i) dof[j * m + i] = nd++;
  }

  const GaussRule g2 = gauss_legendre(2);
  // Reference shape functions on [0,1]^2 ordered (0,0), (1,0), (0,1), (1,1).
  auto shape = [](double s, double t, double* phi, double* ds, double* dt) {
    phi[0] = (1 - s) * (1 - t); ds[0] = -(1 - t); dt[0] = -(1 - s);
    phi[1] = s * (1 - t);       ds[1] = (1 - t);  dt[1] = -s;
    phi[2] = (1 - s) * t;       ds[2] = -t;       dt[2] = (1 - s);
    phi[3] = s * t;             ds[3] = t;        dt[3] = s;
  };
  double ke[4][4] = {};
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t c = 0; c < 2; ++c) {
      double phi[4], ds[4], dt[4];
      shape(g2.nodes[a], g2.nodes[c], phi, ds, dt);
      const double w = g2.weights[a] * g2.weights[c] * hx * hy;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) ke[i][j] += w * (ds[i] * ds[j] / (hx * hx) + dt[i] * dt[j] / (hy * hy));
      }
    }
  }

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(n) * n * 16);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(nd);
  for (int iy = 0; iy < n; ++iy) {
    for (int ix = 0; ix < n; ++ix) {
      const int nodes[4] = {iy * m + ix, iy * m + ix + 1, (iy + 1) * m + ix, (iy + 1) * m + ix + 1};
      const double p = element_p[iy * n + ix];
      double fe[4] = {0, 0, 0, 0};
      for (std::size_t a = 0; a < 2; ++a) {
        for (std::size_t c = 0; c < 2; ++c) {
          double phi[4], ds[4], dt[4];
          shape(g2.nodes[a], g2.nodes[c], phi, ds, dt);
          const Point x{b[0].lo + (ix + g2.nodes[a]) * hx, b[1].lo + (iy + g2.nodes[c]) * hy};
          const double w = g2.weights[a] * g2.weights[c] * hx * hy * rhs.value(x, p);
          for (int i = 0; i < 4; ++i) fe[i] += w * phi[i];
        }
      }
      for (int i = 0; i < 4; ++i) {
        const int di = dof[nodes[i]];
        if (di < 0) continue;
        f[di] += fe[i];
        for (int j = 0; j < 4; ++j) {
          const int dj = dof[nodes[j]];
          if (dj >= 0) trips.emplace_back(di, dj, p * ke[i][j]);
        }
      }
    }
  }
  Eigen::SparseMatrix<double> k(nd, nd);
  k.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> solver(k);
  if (solver.info() != Eigen::Success) throw std::runtime_error("FEM stiffness factorization failed");
  const Eigen::VectorXd u = solver.solve(f);
  if (solver.info() != Eigen::Success || !u.allFinite()) throw std::runtime_error("FEM solve failed");

  Eigen::VectorXd nodal = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m) * m);
  for (int idx = 0; idx < m * m; ++idx) {
    if (dof[idx] >= 0) nodal[idx] = u[dof[idx]];
  }
  FemSolution sol(geometry, n, std::move(element_p), std::move(nodal));
  const double fn = f.norm();
  sol.linear_residual = fn > 0.0 ? (k * u - f).norm() / fn : (k * u).norm();
  return sol;
}

ErrorPair relative_l2_errors(const Eigen::VectorXd& u, const Eigen::VectorXd& u_ref, const Eigen::MatrixXd& flux,
                             const Eigen::MatrixXd& flux_ref, std::span<const double> weights,
                             const std::vector<bool>* mask) {
  const Eigen::Index np = u.size();
  if (u_ref.size() != np || flux.rows() != np || flux_ref.rows() != np || static_cast<Eigen::Index>(weights.size()) != np) {
    throw std::invalid_argument("relative_l2_errors: field sizes differ");
  }
  double eu = 0.0, nu = 0.0, ef = 0.0, nf = 0.0;
  for (Eigen::Index i = 0; i < np; ++i) {
    if (mask && !(*mask)[i]) continue;
    const double w = weights[i];
    eu += w * (u[i] - u_ref[i]) * (u[i] - u_ref[i]);
    nu += w * u_ref[i] * u_ref[i];
    ef += w * (flux.row(i) - flux_ref.row(i)).squaredNorm();
    nf += w * flux_ref.row(i).squaredNorm();
  }
  if (nu == 0.0 || nf == 0.0) throw std::invalid_argument("relative_l2_errors: reference norm is zero");
  return {100.0 * std::sqrt(eu / nu), 100.0 * std::sqrt(ef / nf)};
}

}  // namespace lsreconn
