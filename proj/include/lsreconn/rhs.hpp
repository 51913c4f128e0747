#pragma once

#include <string>
#include <vector>

#include "lsreconn/geometry.hpp"

namespace lsreconn {

/// Source term l^p(x) = q(p(x)) f(x), with q(p) = p when `scales_with_p`, else 1.
struct RhsSpec {
  std::string tag;            ///< "sin1d", "corner2d", "sinsin2d" or "zero"
  bool scales_with_p = false;
  std::vector<Point> centers;  ///< corner2d: singular points

  static RhsSpec sin1d();
  /// sum_i sqrt(r_i) (cos(theta_i/2) - 3 sin(theta_i/2)) with theta_i = arctan(dy/dx).
  static RhsSpec corner2d(std::vector<Point> centers);
  /// 2 pi^2 sin(pi x) sin(pi y); manufactured source for p = 1 on (-1,1)^2.
  static RhsSpec sinsin2d();
  static RhsSpec from_tag(const std::string& tag, const Geometry& geometry);

  double spatial(const Point& x) const;
  double value(const Point& x, double p_local) const {
    return (scales_with_p ? p_local : 1.0) * spatial(x);
  }
};

}  // namespace lsreconn
