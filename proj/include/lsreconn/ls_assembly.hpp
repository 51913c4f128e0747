#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsreconn/geometry.hpp"
#include "lsreconn/rhs.hpp"
#include "lsreconn/sampling.hpp"
#include "lsreconn/singular_basis.hpp"

namespace lsreconn {

/// Composed basis quantities at quadrature points: Laplacians at interior
/// points and one-sided normal derivatives at interface points.
struct BasisEvaluation {
  Eigen::MatrixXd laplacian;    ///< J1 x N
  Eigen::MatrixXd trace_minus;  ///< J2 x N
  Eigen::MatrixXd trace_plus;   ///< J2 x N
};

/// Parameter-independent part of the LS system for one epoch.
struct EpochCache {
  int dim = 1;
  int n_nn = 0;
  std::vector<Point> points;
  std::vector<int> subdomain;
  Eigen::VectorXd sqrt_w;
  Eigen::VectorXd rhs;  ///< spatial factor f(x_j)
  bool rhs_scales_with_p = false;
  Eigen::MatrixXd laplacian;

  std::vector<Point> iface_points;
  std::vector<int> iface_id;
  std::vector<int> minus_side;
  std::vector<int> plus_side;
  Eigen::VectorXd iface_sqrt_w;
  Eigen::MatrixXd trace_minus;
  Eigen::MatrixXd trace_plus;

  int subdomains = 1;
  int interfaces = 0;

  Eigen::Index J1() const { return laplacian.rows(); }
  Eigen::Index J2() const { return trace_minus.rows(); }
};

EpochCache build_epoch_cache(const Geometry& geometry, const BasisEvaluation& basis,
                             const QuadratureSet& quadrature, const RhsSpec& rhs);

/// Stacked system B y = l: J1 interior rows then J2 jump rows.
struct LsSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  int n_nn = 0;
  int n_sing = 0;
  double theta = 1.0;
};

/// S_ij at every interior point (J1 x columns of `singular`).
Eigen::MatrixXd singular_sources(const EpochCache& cache, const SingularBasis& singular);

/// Test hook: flips the sign of the jump rows produced by `assemble_system`.
void set_jump_sign_flip(bool on);

LsSystem assemble_system(const EpochCache& cache, std::span<const double> params,
                         const Eigen::MatrixXd& sources, double theta);

/// Coefficients y = (a, b, c) with the split recorded.
struct CoefficientVector {
  Eigen::VectorXd y;
  int n1 = 0;
  int n2 = 0;
  int n_sing = 0;

  Eigen::VectorXd a() const { return y.head(n1); }
  Eigen::VectorXd b() const { return y.segment(n1, n2); }
  Eigen::VectorXd c() const { return y.tail(n_sing); }
};

struct LsSolution {
  Eigen::VectorXd y;
  double residual2 = 0.0;
  double ridge = 0.0;
};

/// factor * trace(A) / ncols (tiny positive floor for a zero matrix).
double relative_ridge(const Eigen::MatrixXd& a, double factor = 1e-10);

/// Normal equations (B^T B + ridge I) y = B^T l. Without an explicit ridge the
/// default 1e-10 trace/ncols is used and escalated x100 up to three times on
/// factorization failure.
LsSolution solve_normal_equations(const LsSystem& system, std::optional<double> ridge = std::nullopt);

struct NormalSystem {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  double c = 0.0;  ///< ||l||^2
};

LsSolution solve_normal_system(const NormalSystem& system, std::optional<double> ridge = std::nullopt);

/// Per-subdomain and per-interface Gram blocks so that B^T B for any parameter
/// is a short linear combination.
struct GramCache {
  int n = 0;
  std::vector<Eigen::MatrixXd> G;
  std::vector<Eigen::VectorXd> h;
  std::vector<double> c;
  struct Jump {
    int minus = -1;
    int plus = -1;
    Eigen::MatrixXd A;  ///< sum w T+^T T+
    Eigen::MatrixXd C;  ///< sum w T+^T T-
    Eigen::MatrixXd D;  ///< sum w T-^T T-
  };
  std::vector<Jump> jumps;
  std::vector<int> annulus_rows;  ///< interior rows where singular sources may be nonzero
};

GramCache build_gram_cache(const EpochCache& cache, const Geometry& geometry, const CutoffConfig& cutoffs);

NormalSystem assemble_normal(const GramCache& gram, const EpochCache& cache, std::span<const double> params,
                             const Eigen::MatrixXd& sources, double theta);

/// Explicit residual B y - l for one parameter.
Eigen::VectorXd residual_vector(const EpochCache& cache, std::span<const double> params,
                                const Eigen::MatrixXd& sources, double theta, const Eigen::VectorXd& y);

/// Values and gradients of every basis column at a set of points.
struct BasisFields {
  Eigen::MatrixXd value;    ///< points x columns
  Eigen::MatrixXd grad[2];
};

/// Appends the singular columns of `singular` to NN fields evaluated at `points`.
BasisFields append_singular_fields(const BasisFields& nn, const SingularBasis& singular,
                                   std::span<const Point> points);

struct SolutionFields {
  Eigen::VectorXd value;
  Eigen::MatrixXd grad;  ///< points x 2
};

SolutionFields evaluate_solution(const CoefficientVector& coeffs, const BasisFields& fields);

}  // namespace lsreconn
