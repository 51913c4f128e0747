#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "lsreconn/geometry.hpp"

namespace lsreconn {

/// 4 elements on xi in [0,4] (theta = pi/2 xi); 3 bubbles per element plus 4
/// periodic hats.
inline constexpr int kAngularBasisSize = 16;

using AngularMatrix = Eigen::Matrix<double, kAngularBasisSize, kAngularBasisSize>;
using AngularVector = Eigen::Matrix<double, kAngularBasisSize, 1>;

struct EigenSystem {
  AngularMatrix G;  ///< stiffness
  AngularMatrix B;  ///< mass
  AngularTrace trace;
};

struct EigenPair {
  double lambda_gen = 0.0;
  double exponent = 0.0;  ///< sqrt(lambda_gen)
  AngularVector rho;      ///< scaled so that the unweighted L2 norm of mu is 1
  AngularVector rho_b;    ///< same direction, scaled so that rho_b^T B rho_b = 1
  double residual = 0.0;  ///< ||G rho - lambda B rho|| / ||G rho|| (absolute when G rho = 0)
};

/// Basis function values and d/dxi at reference coordinate xi of element e.
void angular_basis(int element, double s_local, double* phi, double* dphi);

/// Assemble with an n-point Gauss-Legendre rule per element (default 5).
EigenSystem assemble_eigensystem(const AngularTrace& trace, int gauss_points = 5);

struct JacobiResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  ///< columns
  int sweeps = 0;
};

/// Cyclic Jacobi rotations for a symmetric matrix; throws when the sweep budget
/// is exhausted before the off-diagonal Frobenius norm drops below tol.
JacobiResult jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-12, int max_sweeps = 50);

/// All pairs, sorted by increasing exponent.
std::vector<EigenPair> solve_eigenpairs(const EigenSystem& system);

/// Exponent window for the singular columns. The default keeps (0, 1); a wider
/// window adds regular modes and optionally the constant mode.
struct SelectionRule {
  double max_exponent = 1.0;
  bool include_constant = false;
};

/// At most `cap` smallest pairs whose exponent passes `rule`. Exponents at or
/// below `tol` count as the constant mode.
std::vector<EigenPair> select_singular(const std::vector<EigenPair>& pairs, int cap, double tol = 1e-6,
                                       SelectionRule rule = {});

/// mu(theta) and dmu/dtheta; theta is wrapped into [0, 2 pi). At sector
/// boundaries the derivative is taken from the element starting there.
std::array<double, 2> angular_eval(const EigenPair& pair, double theta);

/// Integral of mu_a mu_b over (0, 2 pi) by Gauss quadrature.
double angular_inner(const EigenPair& a, const EigenPair& b);

/// Transfer-matrix exponents on (0, max_exponent], with multiplicity for double
/// roots. Sign-scan step `step`, bisection to `tol`.
std::vector<double> semi_analytic_exponents(const AngularTrace& trace, double max_exponent = 2.0,
                                            double step = 1e-3, double tol = 1e-12);

/// Characteristic function tr T(L) - 2 of the periodic transfer matrix.
double transfer_characteristic(const AngularTrace& trace, double exponent);

}  // namespace lsreconn
