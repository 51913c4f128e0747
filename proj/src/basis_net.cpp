#include "lsreconn/basis_net.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace lsreconn {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int stack_blocks(int dim) { return dim + 2; }

}  // namespace

std::vector<int> NetConfig::widths() const {
  std::vector<int> w{input_dim};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(n1 + n2);
  return w;
}

std::size_t NetConfig::param_count() const {
  const auto w = widths();
  std::size_t n = 0;
  for (std::size_t d = 1; d < w.size(); ++d) n += static_cast<std::size_t>(w[d]) * (w[d - 1] + 1);
  return n;
}

void NetConfig::validate() const {
  if (input_dim != 1 && input_dim != 2) throw std::invalid_argument("net input_dim must be 1 or 2");
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("net outputs n1, n2 must be >= 1");
  for (int h : hidden) {
    if (h < 1) throw std::invalid_argument("hidden widths must be >= 1");
  }
}

MlpParams init_params(const NetConfig& config, std::uint64_t seed) {
  config.validate();
  MlpParams p{config, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(config.param_count()))};
  std::mt19937_64 rng(seed);
  const auto w = config.widths();
  Eigen::Index off = 0;
  for (std::size_t d = 1; d < w.size(); ++d) {
    const double limit = std::sqrt(6.0 / (w[d - 1] + w[d]));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const Eigen::Index na = static_cast<Eigen::Index>(w[d]) * w[d - 1];
    for (Eigen::Index k = 0; k < na; ++k) p.flat[off + k] = dist(rng);
    off += na + w[d];  // biases stay zero
  }
  return p;
}

JetBatch JetBatch::zeros(int dim, Eigen::Index points, Eigen::Index outputs) {
  JetBatch b;
  b.dim = dim;
  b.value = Eigen::MatrixXd::Zero(points, outputs);
  b.grad[0] = Eigen::MatrixXd::Zero(points, outputs);
  b.grad[1] = Eigen::MatrixXd::Zero(points, outputs);
  b.laplacian = Eigen::MatrixXd::Zero(points, outputs);
  return b;
}

JetBatch forward_jets(const MlpParams& params, std::span<const Point> points, ForwardTape* tape) {
  const NetConfig& cfg = params.config;
  if (static_cast<std::size_t>(params.flat.size()) != cfg.param_count()) {
    throw std::invalid_argument("parameter vector does not match the network shape");
  }
  if (!params.flat.allFinite()) throw std::invalid_argument("non-finite network parameters");
  const int dim = cfg.input_dim;
  const Eigen::Index J = static_cast<Eigen::Index>(points.size());
  const int nb = stack_blocks(dim);
  const auto w = cfg.widths();

  // Stack layout (rows = neurons): [value | d/dx_0 | (d/dx_1) | laplacian], J columns each.
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(dim, nb * J);
  for (Eigen::Index j = 0; j < J; ++j) {
    for (int k = 0; k < dim; ++k) {
      s(k, j) = points[j][k];
      s(k, (1 + k) * J + j) = 1.0;
    }
  }
  if (tape) {
    tape->dim = dim;
    tape->points = J;
    tape->input_stack.clear();
    tape->pre_stack.clear();
    tape->act.clear();
  }

  Eigen::Index off = 0;
  for (std::size_t d = 1; d < w.size(); ++d) {
    const int m_in = w[d - 1];
    const int m_out = w[d];
    Eigen::Map<const RowMajor> A(params.flat.data() + off, m_out, m_in);
    Eigen::Map<const Eigen::VectorXd> b(params.flat.data() + off + m_out * m_in, m_out);
    off += static_cast<Eigen::Index>(m_out) * (m_in + 1);

    Eigen::MatrixXd z = A * s;
    z.leftCols(J).colwise() += b;
    Eigen::MatrixXd t = z.leftCols(J).array().tanh().matrix();
    const Eigen::ArrayXXd t1 = 1.0 - t.array().square();
    const Eigen::ArrayXXd t2 = -2.0 * t.array() * t1;

    Eigen::MatrixXd next(m_out, nb * J);
    next.leftCols(J) = t;
    Eigen::ArrayXXd grad_sq = Eigen::ArrayXXd::Zero(m_out, J);
    for (int k = 0; k < dim; ++k) {
      const auto zg = z.middleCols((1 + k) * J, J).array();
      next.middleCols((1 + k) * J, J) = (t1 * zg).matrix();
      grad_sq += zg.square();
    }
    next.rightCols(J) = (t2 * grad_sq + t1 * z.rightCols(J).array()).matrix();

    if (tape) {
      tape->input_stack.push_back(std::move(s));
      tape->pre_stack.push_back(std::move(z));
      tape->act.push_back(std::move(t));
    }
    s = std::move(next);
  }

  JetBatch out = JetBatch::zeros(dim, J, w.back());
  out.value = s.leftCols(J).transpose();
  for (int k = 0; k < dim; ++k) out.grad[k] = s.middleCols((1 + k) * J, J).transpose();
  out.laplacian = s.rightCols(J).transpose();
  return out;
}

Eigen::VectorXd backward_jets(const MlpParams& params, const ForwardTape& tape, const JetBatch& adjoint) {
  const NetConfig& cfg = params.config;
  const int dim = tape.dim;
  const Eigen::Index J = tape.points;
  const int nb = stack_blocks(dim);
  const auto w = cfg.widths();
  const std::size_t layers = w.size() - 1;
  if (tape.input_stack.size() != layers) throw std::invalid_argument("backward_jets: tape is empty");
  if (adjoint.points() != J || adjoint.outputs() != w.back()) {
    throw std::invalid_argument("backward_jets: adjoint shape mismatch");
  }

  Eigen::MatrixXd sbar(w.back(), nb * J);
  sbar.leftCols(J) = adjoint.value.transpose();
  for (int k = 0; k < dim; ++k) sbar.middleCols((1 + k) * J, J) = adjoint.grad[k].transpose();
  sbar.rightCols(J) = adjoint.laplacian.transpose();

  std::vector<Eigen::Index> offsets(layers);
  Eigen::Index off = 0;
  for (std::size_t d = 0; d < layers; ++d) {
    offsets[d] = off;
    off += static_cast<Eigen::Index>(w[d + 1]) * (w[d] + 1);
  }

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(params.flat.size());
  for (std::size_t li = layers; li-- > 0;) {
    const int m_in = w[li];
    const int m_out = w[li + 1];
    const Eigen::MatrixXd& z = tape.pre_stack[li];
    const Eigen::ArrayXXd t = tape.act[li].array();
    const Eigen::ArrayXXd t1 = 1.0 - t.square();
    const Eigen::ArrayXXd t2 = -2.0 * t * t1;
    const Eigen::ArrayXXd t3 = -2.0 * t1.square() + 4.0 * t.square() * t1;

    const auto vbar = sbar.leftCols(J).array();
    const auto lbar = sbar.rightCols(J).array();
    const auto zl = z.rightCols(J).array();

    Eigen::MatrixXd zbar(m_out, nb * J);
    Eigen::ArrayXXd grad_sq = Eigen::ArrayXXd::Zero(m_out, J);
    Eigen::ArrayXXd cross = Eigen::ArrayXXd::Zero(m_out, J);
    for (int k = 0; k < dim; ++k) {
      const auto zg = z.middleCols((1 + k) * J, J).array();
      const auto gbar = sbar.middleCols((1 + k) * J, J).array();
      grad_sq += zg.square();
      cross += zg * gbar;
      zbar.middleCols((1 + k) * J, J) = (t1 * gbar + 2.0 * t2 * zg * lbar).matrix();
    }
    zbar.leftCols(J) = (t1 * vbar + t2 * cross + (t3 * grad_sq + t2 * zl) * lbar).matrix();
    zbar.rightCols(J) = (t1 * lbar).matrix();

    Eigen::Map<RowMajor> gA(grad.data() + offsets[li], m_out, m_in);
    Eigen::Map<Eigen::VectorXd> gb(grad.data() + offsets[li] + m_out * m_in, m_out);
    gA.noalias() = zbar * tape.input_stack[li].transpose();
    gb = zbar.leftCols(J).rowwise().sum();

    if (li > 0) {
      Eigen::Map<const RowMajor> A(params.flat.data() + offsets[li], m_out, m_in);
      sbar.noalias() = A.transpose() * zbar;
    }
  }
  return grad;
}

AdamState AdamState::for_size(Eigen::Index n) {
  AdamState s;
  s.m = Eigen::VectorXd::Zero(n);
  s.v = Eigen::VectorXd::Zero(n);
  return s;
}

void adam_step(Eigen::VectorXd& params, AdamState& state, const Eigen::VectorXd& gradient, double lr) {
  if (state.m.size() != params.size() || gradient.size() != params.size()) {
    throw std::invalid_argument("adam_step: moment/gradient size mismatch");
  }
  ++state.step;
  state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
  state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient.cwiseAbs2();
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

double linear_lr(double lr0, double lr_end, long iteration, long total) {
  if (total <= 0) return lr0;
  const double t = static_cast<double>(iteration) / static_cast<double>(total);
  return lr0 + (lr_end - lr0) * t;
}

}  // namespace lsreconn
