#include "lsreconn/composed_basis.hpp"

#include <stdexcept>
#include <vector>

namespace lsreconn {

InteriorFactors tabulate_factors(const CutoffLayout& layout, std::span<const Point> points) {
  const Eigen::Index np = static_cast<Eigen::Index>(points.size());
  const int n = layout.n1() + layout.n2();
  InteriorFactors f;
  f.value.resize(np, n);
  f.grad[0].resize(np, n);
  f.grad[1].resize(np, n);
  f.laplacian.resize(np, n);
  std::vector<ScalarJet> c(n);
  for (Eigen::Index j = 0; j < np; ++j) {
    layout.factor_jets(points[j], c);
    for (int k = 0; k < n; ++k) {
      f.value(j, k) = c[k].value;
      f.grad[0](j, k) = c[k].grad[0];
      f.grad[1](j, k) = c[k].grad[1];
      f.laplacian(j, k) = c[k].laplacian();
    }
  }
  return f;
}

TraceFactors tabulate_traces(const CutoffLayout& layout, const QuadratureSet& q) {
  const Eigen::Index np = static_cast<Eigen::Index>(q.J2());
  const int n = layout.n1() + layout.n2();
  TraceFactors t;
  t.value.resize(np, n);
  t.dn_minus.resize(np, n);
  t.dn_plus.resize(np, n);
  std::vector<TraceJet> c(n);
  for (Eigen::Index k = 0; k < np; ++k) {
    const Interface& f = layout.geometry().interfaces().at(q.iface_id[k]);
    layout.factor_traces(q.iface[k], f, c);
    t.axis.push_back(f.axis);
    for (int m = 0; m < n; ++m) {
      t.value(k, m) = c[m].value;
      t.dn_minus(k, m) = c[m].grad_minus[f.axis];
      t.dn_plus(k, m) = c[m].grad_plus[f.axis];
    }
  }
  return t;
}

ComposedEvaluation evaluate_composed(const MlpParams& params, const CutoffLayout& layout,
                                     const QuadratureSet& q, bool keep_tape) {
  const int n = layout.n1() + layout.n2();
  if (params.config.n1 != layout.n1() || params.config.n2 != layout.n2()) {
    throw std::invalid_argument("network outputs do not match the cutoff layout");
  }
  ComposedEvaluation e;
  e.J1 = static_cast<Eigen::Index>(q.J1());
  e.J2 = static_cast<Eigen::Index>(q.J2());
  std::vector<Point> pts(q.interior);
  pts.insert(pts.end(), q.iface.begin(), q.iface.end());
  e.raw = forward_jets(params, pts, keep_tape ? &e.tape : nullptr);
  e.interior = tabulate_factors(layout, q.interior);
  e.iface = tabulate_traces(layout, q);

  const auto v = e.raw.value.topRows(e.J1).array();
  const auto lap = e.raw.laplacian.topRows(e.J1).array();
  Eigen::ArrayXXd out = e.interior.laplacian.array() * v + e.interior.value.array() * lap;
  for (int k = 0; k < q.dim; ++k) {
    out += 2.0 * e.interior.grad[k].array() * e.raw.grad[k].topRows(e.J1).array();
  }
  e.basis.laplacian = out.matrix();

  e.basis.trace_minus.resize(e.J2, n);
  e.basis.trace_plus.resize(e.J2, n);
  for (Eigen::Index k = 0; k < e.J2; ++k) {
    const Eigen::Index r = e.J1 + k;
    const int a = e.iface.axis[k];
    const auto vr = e.raw.value.row(r).array();
    const auto dr = e.raw.grad[a].row(r).array();
    const auto c = e.iface.value.row(k).array();
    e.basis.trace_minus.row(k) = (e.iface.dn_minus.row(k).array() * vr + c * dr).matrix();
    e.basis.trace_plus.row(k) = (e.iface.dn_plus.row(k).array() * vr + c * dr).matrix();
  }
  return e;
}

Eigen::VectorXd composed_backprop(const MlpParams& params, const ComposedEvaluation& e,
                                  const Eigen::MatrixXd& lap_adj, const Eigen::MatrixXd& minus_adj,
                                  const Eigen::MatrixXd& plus_adj) {
  const Eigen::Index n = e.raw.outputs();
  if (lap_adj.rows() != e.J1 || lap_adj.cols() != n || minus_adj.rows() != e.J2 || plus_adj.rows() != e.J2) {
    throw std::invalid_argument("composed_backprop: adjoint shape mismatch");
  }
  const int dim = e.raw.dim;
  JetBatch adj = JetBatch::zeros(dim, e.J1 + e.J2, n);
  adj.value.topRows(e.J1) = (e.interior.laplacian.array() * lap_adj.array()).matrix();
  for (int k = 0; k < dim; ++k) {
    adj.grad[k].topRows(e.J1) = (2.0 * e.interior.grad[k].array() * lap_adj.array()).matrix();
  }
  adj.laplacian.topRows(e.J1) = (e.interior.value.array() * lap_adj.array()).matrix();
  for (Eigen::Index k = 0; k < e.J2; ++k) {
    const Eigen::Index r = e.J1 + k;
    const int a = e.iface.axis[k];
    adj.value.row(r) = (e.iface.dn_minus.row(k).array() * minus_adj.row(k).array() +
                        e.iface.dn_plus.row(k).array() * plus_adj.row(k).array())
                           .matrix();
    adj.grad[a].row(r) = (e.iface.value.row(k).array() * (minus_adj.row(k).array() + plus_adj.row(k).array()))
                             .matrix();
  }
  return backward_jets(params, e.tape, adj);
}

BasisFields composed_fields(const MlpParams& params, const CutoffLayout& layout, std::span<const Point> points) {
  const JetBatch raw = forward_jets(params, points);
  const InteriorFactors f = tabulate_factors(layout, points);
  BasisFields out;
  out.value = (f.value.array() * raw.value.array()).matrix();
  for (int k = 0; k < 2; ++k) {
    out.grad[k] = (f.grad[k].array() * raw.value.array() + f.value.array() * raw.grad[k].array()).matrix();
  }
  return out;
}

}  // namespace lsreconn
