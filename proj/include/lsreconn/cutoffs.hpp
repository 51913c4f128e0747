#pragma once

#include <array>
#include <span>
#include <vector>

#include "lsreconn/geometry.hpp"

namespace lsreconn {

/// Value, gradient and Hessian of a scalar field at a point (d <= 2; unused
/// components stay zero in 1D).
struct ScalarJet {
  double value = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
  std::array<std::array<double, 2>, 2> hess{{{0.0, 0.0}, {0.0, 0.0}}};

  static ScalarJet constant(double c) {
    ScalarJet j;
    j.value = c;
    return j;
  }
  double laplacian() const { return hess[0][0] + hess[1][1]; }
};

/// Exact second-order product rule.
ScalarJet operator*(const ScalarJet& a, const ScalarJet& b);

/// Value and one-sided gradients of a field on an interface carrier.
struct TraceJet {
  double value = 0.0;
  std::array<double, 2> grad_minus{0.0, 0.0};
  std::array<double, 2> grad_plus{0.0, 0.0};

  static TraceJet smooth(const ScalarJet& j) { return {j.value, j.grad, j.grad}; }
};

TraceJet operator*(const TraceJet& a, const TraceJet& b);

struct RadialJet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// Set of parallel interface lines used by one normalized distance function.
struct InterfaceLines {
  int axis = 0;  ///< coordinate measured by the distance (0: x, 1: y)
  std::vector<double> positions;
};

struct CutoffConfig {
  double delta1 = 0.0;
  double delta2 = 0.0;

  /// Defaults: delta2 = 0.45 * vertex clearance, delta1 = delta2 / 2. Returns a
  /// zero config for geometries without singular vertices.
  static CutoffConfig defaults_for(const Geometry& geometry);
  /// Throws if the radii violate 0 < delta1 < delta2 or the support condition.
  void validate(const Geometry& geometry) const;
};

/// Radial cutoff: 1 for r <= delta1, 0 for r >= delta2, quintic smoothstep in between.
RadialJet eta_jet(double r, const CutoffConfig& config);

/// Normalized tensor-product parabola, vanishing on the outer boundary with max 1.
ScalarJet boundary_cutoff_jet(const Point& x, const Geometry& geometry);

/// psi(x) = (sum_l d_l(x)^-2)^(-1/2) over the lines of the subset. Throws when x
/// lies on one of the lines. An empty subset yields the constant 1.
ScalarJet jump_adf_jet(const Point& x, const InterfaceLines& lines, int dim);

/// One-sided traces of psi on the carrier of `on`: value 0 with slopes -+1 along
/// the fixed normal when the carrier belongs to the subset; smooth otherwise.
TraceJet jump_adf_trace(const Point& x, const InterfaceLines& lines, int dim, const Interface& on);

/// The per-component cutoff layout for the smooth (w) and jump (v) outputs.
class CutoffLayout {
 public:
  CutoffLayout(const Geometry& geometry, CutoffConfig config, int n1, int n2);

  int n1() const { return n1_; }
  int n2() const { return n2_; }
  const CutoffConfig& config() const { return config_; }
  const Geometry& geometry() const { return geometry_; }
  /// Interface line subsets: one in 1D, {vertical, horizontal} in 2D.
  const std::vector<InterfaceLines>& jump_subsets() const { return subsets_; }

  /// Singular vertex block that scales output n (-1: no exclusion factor).
  int exclusion_block(int n) const;
  /// Jump subset that scales output n (-1 for smooth outputs).
  int jump_subset(int n) const;

  /// phi_k = 1 - eta(|x - x_k|) for every singular vertex.
  std::vector<ScalarJet> exclusion_jets(const Point& x) const;

  /// Full cutoff factor C_n(x) for every output n at an interior point:
  /// w_n = C_n wbar_n, v_m = C_{n1+m} vbar_m.
  void factor_jets(const Point& x, std::span<ScalarJet> out) const;
  /// Cutoff factor traces at a point on `on`.
  void factor_traces(const Point& x, const Interface& on, std::span<TraceJet> out) const;

 private:
  Geometry geometry_;
  CutoffConfig config_;
  int n1_;
  int n2_;
  std::vector<InterfaceLines> subsets_;
};

/// Phi1 (length n1) and Phi2 (length n2) jets; all ones without singular vertices.
struct ExclusionVectors {
  std::vector<ScalarJet> phi1;
  std::vector<ScalarJet> phi2;
};
ExclusionVectors exclusion_vectors_jet(const Point& x, const CutoffLayout& layout);

/// Composes raw network jets with the cutoffs: w = B (wbar . Phi1),
/// v = B (vbar . Psi . Phi2).
struct ComposedJets {
  std::vector<ScalarJet> w;
  std::vector<ScalarJet> v;
};
ComposedJets apply_cutoffs(std::span<const ScalarJet> raw_w, std::span<const ScalarJet> raw_v,
                           const Point& x, const CutoffLayout& layout);

}  // namespace lsreconn
