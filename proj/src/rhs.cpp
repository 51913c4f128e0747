#include "lsreconn/rhs.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsreconn {

RhsSpec RhsSpec::sin1d() { return {"sin1d", false, {}}; }

RhsSpec RhsSpec::corner2d(std::vector<Point> centers) { return {"corner2d", true, std::move(centers)}; }

RhsSpec RhsSpec::sinsin2d() { return {"sinsin2d", false, {}}; }

RhsSpec RhsSpec::from_tag(const std::string& tag, const Geometry& geometry) {
  if (tag == "sin1d") return sin1d();
  if (tag == "corner2d") return corner2d(geometry.singular_vertices());
  if (tag == "sinsin2d") return sinsin2d();
  if (tag == "zero") return {"zero", false, {}};
  throw std::invalid_argument("unknown rhs tag '" + tag + "'");
}

double RhsSpec::spatial(const Point& x) const {
  constexpr double pi = std::numbers::pi;
  if (tag == "sin1d") return 25.0 * std::sin(5.0 * x[0]);
  if (tag == "sinsin2d") return 2.0 * pi * pi * std::sin(pi * x[0]) * std::sin(pi * x[1]);
  if (tag == "zero") return 0.0;
  if (tag == "corner2d") {
    double f = 0.0;
    for (const Point& c : centers) {
      const double dx = x[0] - c[0];
      const double dy = x[1] - c[1];
      const double r = std::hypot(dx, dy);
      if (r == 0.0) continue;
      const double theta = dx != 0.0 ? std::atan(dy / dx) : std::copysign(0.5 * pi, dy);
      f += std::sqrt(r) * (std::cos(0.5 * theta) - 3.0 * std::sin(0.5 * theta));
    }
    return f;
  }
  throw std::invalid_argument("unknown rhs tag '" + tag + "'");
}

}  // namespace lsreconn
