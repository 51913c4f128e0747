#pragma once

#include <array>
#include <map>
#include <mutex>
#include <span>
#include <vector>

#include "lsreconn/angular_eigensolver.hpp"
#include "lsreconn/cutoffs.hpp"
#include "lsreconn/geometry.hpp"

namespace lsreconn {

/// Memoized eigenpairs keyed by the four sector values of an angular trace.
class EigenCache {
 public:
  std::vector<EigenPair> pairs(const AngularTrace& trace);
  std::size_t size() const;
  void clear();

 private:
  mutable std::mutex mutex_;
  std::map<std::array<double, 4>, std::vector<EigenPair>> store_;
};

/// s_ij = r^L mu(theta) eta(r) around every singular vertex for one parameter.
class SingularBasis {
 public:
  struct Mode {
    int vertex = 0;
    int pair = 0;
    EigenPair eig;
  };

  SingularBasis() = default;
  SingularBasis(const Geometry& geometry, CutoffConfig config, std::vector<std::vector<EigenPair>> per_vertex);

  /// Solves (or looks up) the angular problems of every vertex and keeps at most
  /// n3 singular pairs each.
  static SingularBasis build(const Geometry& geometry, const CutoffConfig& config,
                             std::span<const double> params, int n3, EigenCache* cache = nullptr,
                             SelectionRule rule = {});

  /// Total number of singular columns.
  int size() const { return static_cast<int>(modes_.size()); }
  const std::vector<Mode>& modes() const { return modes_; }
  int mode_index(int vertex, int pair) const;
  const CutoffConfig& config() const { return config_; }

  /// Value and Cartesian gradient {s, ds/dx, ds/dy}. The gradient is refused
  /// for r < 1e-12.
  std::array<double, 3> eval_s(int mode, const Point& x, bool with_gradient = true) const;
  std::array<double, 3> eval_s(int vertex, int pair, const Point& x, bool with_gradient = true) const {
    return eval_s(mode_index(vertex, pair), x, with_gradient);
  }

  /// Radial source term, nonzero only on the annulus delta1 < r < delta2.
  double eval_S_source(int mode, const Point& x) const;
  double eval_S_source(int vertex, int pair, const Point& x) const {
    return eval_S_source(mode_index(vertex, pair), x);
  }

 private:
  std::vector<Point> vertices_;
  CutoffConfig config_;
  std::vector<Mode> modes_;
};

}  // namespace lsreconn
