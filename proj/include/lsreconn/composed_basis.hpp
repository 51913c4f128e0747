#pragma once

#include <span>

#include <Eigen/Dense>

#include "lsreconn/basis_net.hpp"
#include "lsreconn/cutoffs.hpp"
#include "lsreconn/ls_assembly.hpp"
#include "lsreconn/sampling.hpp"

namespace lsreconn {

/// Cutoff factors C_n tabulated at interior points (J1 x N each).
struct InteriorFactors {
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad[2];
  Eigen::MatrixXd laplacian;
};

/// Cutoff factor traces at interface points (J2 x N each), normal components only.
struct TraceFactors {
  Eigen::MatrixXd value;
  Eigen::MatrixXd dn_minus;
  Eigen::MatrixXd dn_plus;
  std::vector<int> axis;
};

InteriorFactors tabulate_factors(const CutoffLayout& layout, std::span<const Point> points);
TraceFactors tabulate_traces(const CutoffLayout& layout, const QuadratureSet& q);

/// Network evaluated at the interior and interface points of a quadrature set,
/// composed with the cutoffs.
struct ComposedEvaluation {
  BasisEvaluation basis;
  InteriorFactors interior;
  TraceFactors iface;
  JetBatch raw;
  ForwardTape tape;
  Eigen::Index J1 = 0;
  Eigen::Index J2 = 0;
};

ComposedEvaluation evaluate_composed(const MlpParams& params, const CutoffLayout& layout,
                                     const QuadratureSet& q, bool keep_tape);

/// Gradient with respect to the network parameters given adjoints of the
/// composed Laplacians (J1 x N) and normal traces (J2 x N).
Eigen::VectorXd composed_backprop(const MlpParams& params, const ComposedEvaluation& eval,
                                  const Eigen::MatrixXd& laplacian_adj, const Eigen::MatrixXd& minus_adj,
                                  const Eigen::MatrixXd& plus_adj);

/// Values and gradients of the composed NN basis at arbitrary interior points.
BasisFields composed_fields(const MlpParams& params, const CutoffLayout& layout, std::span<const Point> points);

}  // namespace lsreconn
