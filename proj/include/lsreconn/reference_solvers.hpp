#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsreconn/geometry.hpp"
#include "lsreconn/rhs.hpp"

namespace lsreconn {

/// Closed-form 1D solution u = sin(5x)/p_i on subdomain i: {u, du/dx}.
std::array<double, 2> exact_1d(const Geometry& geometry, std::span<const double> params, const Point& x);

/// Bilinear (Q1) finite elements on a uniform n x n grid.
class FemSolution {
 public:
  FemSolution(const Geometry& geometry, int n, std::vector<double> element_p, Eigen::VectorXd nodal);

  int n() const { return n_; }
  const Eigen::VectorXd& nodal() const { return nodal_; }
  double linear_residual = 0.0;  ///< ||K u - f|| / ||f|| of the interior system

  double value(const Point& x) const;
  /// p grad u_h in the element containing x.
  std::array<double, 2> flux(const Point& x) const;
  std::array<double, 2> gradient(const Point& x) const;

 private:
  void locate(const Point& x, int& ix, int& iy, double& s, double& t) const;

  std::array<Interval, 2> bounds_;
  int n_;
  double hx_, hy_;
  std::vector<double> element_p_;
  Eigen::VectorXd nodal_;  ///< (n+1)^2 values, x fastest
};

FemSolution fem_solve_2d(const Geometry& geometry, std::span<const double> params, const RhsSpec& rhs, int n);

struct ErrorPair {
  double solution_pct = 0.0;
  double flux_pct = 0.0;
};

/// 100 ||u - u_ref|| / ||u_ref|| and the same for the flux (vector L2), with
/// quadrature weights; rows with mask == false are skipped.
ErrorPair relative_l2_errors(const Eigen::VectorXd& u, const Eigen::VectorXd& u_ref, const Eigen::MatrixXd& flux,
                             const Eigen::MatrixXd& flux_ref, std::span<const double> weights,
                             const std::vector<bool>* mask = nullptr);

}  // namespace lsreconn
