#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lsreconn/geometry.hpp"

namespace lsreconn {

/// tanh MLP shape: input_dim -> hidden... -> n1 + n2 outputs.
struct NetConfig {
  int input_dim = 1;
  std::vector<int> hidden{10, 10, 10};
  int n1 = 10;
  int n2 = 40;

  std::vector<int> widths() const;
  std::size_t param_count() const;
  void validate() const;
};

/// Flat parameter vector. Layer d contributes A_d (row-major, out x in) then b_d.
struct MlpParams {
  NetConfig config;
  Eigen::VectorXd flat;
};

MlpParams init_params(const NetConfig& config, std::uint64_t seed);

/// Value, spatial gradient and Laplacian of every output at every point.
/// Matrices are (points x outputs); grad[1] is unused (zero) in 1D.
struct JetBatch {
  int dim = 1;
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad[2];
  Eigen::MatrixXd laplacian;

  static JetBatch zeros(int dim, Eigen::Index points, Eigen::Index outputs);
  Eigen::Index points() const { return value.rows(); }
  Eigen::Index outputs() const { return value.cols(); }
};

/// Intermediate quantities kept for the reverse pass.
struct ForwardTape {
  int dim = 1;
  Eigen::Index points = 0;
  std::vector<Eigen::MatrixXd> input_stack;  ///< stacked [H | dH_0 | (dH_1) | lap H] per layer
  std::vector<Eigen::MatrixXd> pre_stack;    ///< A * input_stack (+ b on the value block)
  std::vector<Eigen::MatrixXd> act;          ///< tanh of the value block
};

/// Exact forward propagation of value, gradient and Laplacian through every
/// affine + tanh layer. Pass a tape to enable `backward_jets`.
JetBatch forward_jets(const MlpParams& params, std::span<const Point> points, ForwardTape* tape = nullptr);

/// Reverse pass: given the adjoint of every output jet (same layout as JetBatch),
/// returns the gradient with respect to the flat parameter vector.
Eigen::VectorXd backward_jets(const MlpParams& params, const ForwardTape& tape, const JetBatch& adjoint);

struct AdamState {
  Eigen::VectorXd m;
  Eigen::VectorXd v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_size(Eigen::Index n);
};

void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& gradient, double lr);

/// Linear interpolation from lr0 (iteration 0) to lr_end (iteration `total`).
double linear_lr(double lr0, double lr_end, long iteration, long total);

}  // namespace lsreconn
