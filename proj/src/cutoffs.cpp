#include "lsreconn/cutoffs.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lsreconn {

ScalarJet operator*(const ScalarJet& a, const ScalarJet& b) {
  ScalarJet c;
  c.value = a.value * b.value;
  for (int i = 0; i < 2; ++i) c.grad[i] = a.grad[i] * b.value + a.value * b.grad[i];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      c.hess[i][j] = a.hess[i][j] * b.value + a.grad[i] * b.grad[j] +
                     a.grad[j] * b.grad[i] + a.value * b.hess[i][j];
    }
  }
  return c;
}

TraceJet operator*(const TraceJet& a, const TraceJet& b) {
  TraceJet c;
  c.value = a.value * b.value;
  for (int i = 0; i < 2; ++i) {
    c.grad_minus[i] = a.grad_minus[i] * b.value + a.value * b.grad_minus[i];
    c.grad_plus[i] = a.grad_plus[i] * b.value + a.value * b.grad_plus[i];
  }
  return c;
}

CutoffConfig CutoffConfig::defaults_for(const Geometry& geometry) {
  CutoffConfig c;
  if (geometry.singular_vertices().empty()) return c;
  c.delta2 = 0.45 * geometry.vertex_clearance();
  c.delta1 = 0.5 * c.delta2;
  return c;
}

void CutoffConfig::validate(const Geometry& geometry) const {
  if (geometry.singular_vertices().empty()) return;
  if (!(delta1 > 0.0) || !(delta2 > delta1)) {
    throw std::invalid_argument("cutoff radii must satisfy 0 < delta1 < delta2");
  }
  if (!(delta2 < geometry.vertex_clearance())) {
    throw std::invalid_argument("delta2 = " + std::to_string(delta2) +
                                " leaves the cells touching a singular vertex (clearance " +
                                std::to_string(geometry.vertex_clearance()) + ")");
  }
}

RadialJet eta_jet(double r, const CutoffConfig& config) {
  if (r < 0.0) throw std::invalid_argument("eta_jet: negative radius");
  if (r <= config.delta1) return {1.0, 0.0, 0.0};
  if (r >= config.delta2) return {0.0, 0.0, 0.0};
  const double h = config.delta2 - config.delta1;
  const double t = (r - config.delta1) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  RadialJet e;
  e.value = 1.0 - (10.0 * t3 - 15.0 * t3 * t + 6.0 * t3 * t2);
  e.d1 = -(30.0 * t2 - 60.0 * t3 + 30.0 * t2 * t2) / h;
  e.d2 = -(60.0 * t - 180.0 * t2 + 120.0 * t3) / (h * h);
  return e;
}

ScalarJet boundary_cutoff_jet(const Point& x, const Geometry& geometry) {
  ScalarJet out = ScalarJet::constant(1.0);
  for (int k = 0; k < geometry.dim(); ++k) {
    const Interval& iv = geometry.bounds()[k];
    const double h = 0.5 * iv.length();
    const double s = 1.0 / (h * h);
    ScalarJet f;
    f.value = (x[k] - iv.lo) * (iv.hi - x[k]) * s;
    f.grad[k] = (iv.lo + iv.hi - 2.0 * x[k]) * s;
    f.hess[k][k] = -2.0 * s;
    out = out * f;
  }
  return out;
}

ScalarJet jump_adf_jet(const Point& x, const InterfaceLines& lines, int dim) {
  if (lines.positions.empty()) return ScalarJet::constant(1.0);
  if (lines.axis >= dim) throw std::invalid_argument("jump_adf_jet: axis exceeds dimension");
  const int k = lines.axis;
  double s = 0.0, s1 = 0.0, s2 = 0.0;
  for (double c : lines.positions) {
    const double d = x[k] - c;
    if (d == 0.0) throw std::invalid_argument("jump_adf_jet: point lies on an interface line");
    const double inv = 1.0 / d;
    const double inv2 = inv * inv;
    s += inv2;
    s1 += -2.0 * inv2 * inv;
    s2 += 6.0 * inv2 * inv2;
  }
  const double root = std::sqrt(s);
  const double m12 = 1.0 / root;           // S^-1/2
  const double m32 = m12 / s;              // S^-3/2
  const double m52 = m32 / s;              // S^-5/2
  ScalarJet j;
  j.value = m12;
  j.grad[k] = -0.5 * m32 * s1;
  j.hess[k][k] = 0.75 * m52 * s1 * s1 - 0.5 * m32 * s2;
  return j;
}

TraceJet jump_adf_trace(const Point& x, const InterfaceLines& lines, int dim, const Interface& on) {
  const bool in_subset =
      on.axis == lines.axis &&
      std::find(lines.positions.begin(), lines.positions.end(), on.position) != lines.positions.end();
  if (!in_subset) return TraceJet::smooth(jump_adf_jet(x, lines, dim));
  TraceJet t;
  t.value = 0.0;
  t.grad_minus[on.axis] = -1.0;
  t.grad_plus[on.axis] = 1.0;
  return t;
}

CutoffLayout::CutoffLayout(const Geometry& geometry, CutoffConfig config, int n1, int n2)
    : geometry_(geometry), config_(config), n1_(n1), n2_(n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("output split must have n1, n2 >= 1");
  const int ns = static_cast<int>(geometry.singular_vertices().size());
  if (geometry.dim() == 2 && n2 % 2 != 0) {
    throw std::invalid_argument("2D layouts need an even n2 (one half per interface family)");
  }
  if (ns > 0) {
    if (n1 % ns != 0) {
      throw std::invalid_argument("n1 = " + std::to_string(n1) + " is not divisible by the " +
                                  std::to_string(ns) + " singular vertices");
    }
    if (n2 % (2 * ns) != 0) {
      throw std::invalid_argument("n2 = " + std::to_string(n2) + " is not divisible by 2 * " +
                                  std::to_string(ns));
    }
    config_.validate(geometry);
  }
  subsets_.push_back({0, geometry.cuts_x()});
  if (geometry.dim() == 2) subsets_.push_back({1, geometry.cuts_y()});
}

int CutoffLayout::exclusion_block(int n) const {
  const int ns = static_cast<int>(geometry_.singular_vertices().size());
  if (ns == 0) return -1;
  if (n < n1_) return n / (n1_ / ns);
  const int half = n2_ / 2;
  return ((n - n1_) % half) / (half / ns);
}

int CutoffLayout::jump_subset(int n) const {
  if (n < n1_) return -1;
  if (geometry_.dim() == 1) return 0;
  return (n - n1_) < n2_ / 2 ? 0 : 1;
}

std::vector<ScalarJet> CutoffLayout::exclusion_jets(const Point& x) const {
  const auto& verts = geometry_.singular_vertices();
  std::vector<ScalarJet> out(verts.size());
  for (std::size_t k = 0; k < verts.size(); ++k) {
    const double dx = x[0] - verts[k][0];
    const double dy = x[1] - verts[k][1];
    const double r = std::hypot(dx, dy);
    const RadialJet e = eta_jet(r, config_);
    ScalarJet& phi = out[k];
    phi.value = 1.0 - e.value;
    if (e.d1 == 0.0 && e.d2 == 0.0) continue;
    const double u[2] = {dx / r, dy / r};
    for (int i = 0; i < 2; ++i) {
      phi.grad[i] = -e.d1 * u[i];
      for (int j = 0; j < 2; ++j) {
        const double delta = i == j ? 1.0 : 0.0;
        phi.hess[i][j] = -(e.d2 * u[i] * u[j] + e.d1 / r * (delta - u[i] * u[j]));
      }
    }
  }
  return out;
}

void CutoffLayout::factor_jets(const Point& x, std::span<ScalarJet> out) const {
  if (static_cast<int>(out.size()) != n1_ + n2_) throw std::invalid_argument("factor_jets: size");
  const ScalarJet b = boundary_cutoff_jet(x, geometry_);
  const auto phi = exclusion_jets(x);
  std::vector<ScalarJet> psi;
  for (const auto& s : subsets_) psi.push_back(jump_adf_jet(x, s, geometry_.dim()));
  for (int n = 0; n < n1_ + n2_; ++n) {
    ScalarJet c = b;
    const int blk = exclusion_block(n);
    if (blk >= 0) c = c * phi[blk];
    const int sub = jump_subset(n);
    if (sub >= 0) c = c * psi[sub];
    out[n] = c;
  }
}

void CutoffLayout::factor_traces(const Point& x, const Interface& on, std::span<TraceJet> out) const {
  if (static_cast<int>(out.size()) != n1_ + n2_) throw std::invalid_argument("factor_traces: size");
  const TraceJet b = TraceJet::smooth(boundary_cutoff_jet(x, geometry_));
  std::vector<TraceJet> phi;
  for (const auto& j : exclusion_jets(x)) phi.push_back(TraceJet::smooth(j));
  std::vector<TraceJet> psi;
  for (const auto& s : subsets_) psi.push_back(jump_adf_trace(x, s, geometry_.dim(), on));
  for (int n = 0; n < n1_ + n2_; ++n) {
    TraceJet c = b;
    const int blk = exclusion_block(n);
    if (blk >= 0) c = c * phi[blk];
    const int sub = jump_subset(n);
    if (sub >= 0) c = c * psi[sub];
    out[n] = c;
  }
}

ExclusionVectors exclusion_vectors_jet(const Point& x, const CutoffLayout& layout) {
  ExclusionVectors ev;
  ev.phi1.assign(layout.n1(), ScalarJet::constant(1.0));
  ev.phi2.assign(layout.n2(), ScalarJet::constant(1.0));
  if (layout.geometry().singular_vertices().empty()) return ev;
  const auto phi = layout.exclusion_jets(x);
  for (int n = 0; n < layout.n1(); ++n) ev.phi1[n] = phi[layout.exclusion_block(n)];
  for (int m = 0; m < layout.n2(); ++m) ev.phi2[m] = phi[layout.exclusion_block(layout.n1() + m)];
  return ev;
}

ComposedJets apply_cutoffs(std::span<const ScalarJet> raw_w, std::span<const ScalarJet> raw_v,
                           const Point& x, const CutoffLayout& layout) {
  if (static_cast<int>(raw_w.size()) != layout.n1() || static_cast<int>(raw_v.size()) != layout.n2()) {
    throw std::invalid_argument("apply_cutoffs: raw jet count does not match the layout");
  }
  std::vector<ScalarJet> c(layout.n1() + layout.n2());
  layout.factor_jets(x, c);
  ComposedJets out;
  out.w.resize(layout.n1());
  out.v.resize(layout.n2());
  for (int n = 0; n < layout.n1(); ++n) out.w[n] = c[n] * raw_w[n];
  for (int m = 0; m < layout.n2(); ++m) out.v[m] = c[layout.n1() + m] * raw_v[m];
  return out;
}

}  // namespace lsreconn
