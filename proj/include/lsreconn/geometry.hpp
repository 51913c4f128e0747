#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace lsreconn {

/// Spatial point; the second coordinate is ignored for 1D problems.
using Point = std::array<double, 2>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains_open(double t) const { return t > lo && t < hi; }
};

/// A material interface between two neighbouring subdomains.
///
/// The normal is fixed per axis (+x for interfaces on a vertical line, +y for
/// interfaces on a horizontal line). The minus-side subdomain lies at x - t n.
struct Interface {
  int id = 0;
  int axis = 0;          ///< axis of the normal: 0 -> +x, 1 -> +y
  double position = 0.0; ///< coordinate of the carrier line along `axis`
  Interval extent;       ///< tangential extent of the segment (2D only)
  int minus_side = -1;
  int plus_side = -1;

  Point normal() const { return axis == 0 ? Point{1.0, 0.0} : Point{0.0, 1.0}; }
  /// Segment length in 2D; a point interface counts with unit measure in 1D.
  double measure(int dim) const { return dim == 1 ? 1.0 : extent.length(); }
  /// Point on the carrier at tangential coordinate t (2D) or the point itself (1D).
  Point at(double t) const {
    return axis == 0 ? Point{position, t} : Point{t, position};
  }
};

/// Piecewise-constant diffusivity, one positive value per subdomain.
struct ParameterSample {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Values of p in the four quarter-plane sectors around a singular vertex.
/// Sector k covers [k pi/2, (k+1) pi/2), counter-clockwise from +x.
struct AngularTrace {
  std::array<int, 4> subdomain{};
  std::array<double, 4> value{};
};

/// Axis-aligned tensor-grid partition of an interval or rectangle.
///
/// Subdomains are numbered row-major starting from the top row (left to right),
/// matching the usual figure labelling where Omega_1 is the top-left cell.
/// Interfaces list vertical segments first (by cut, bottom to top), then
/// horizontal ones (by cut, left to right). Singular vertices are the interior
/// grid crossings, bottom to top, left to right.
class Geometry {
 public:
  static Geometry build_grid(int dim, std::vector<double> cuts_x,
                             std::vector<double> cuts_y,
                             std::array<Interval, 2> bounds);

  int dim() const { return dim_; }
  const std::array<Interval, 2>& bounds() const { return bounds_; }
  const std::vector<double>& cuts_x() const { return cuts_x_; }
  const std::vector<double>& cuts_y() const { return cuts_y_; }

  int subdomain_count() const { return cols_ * rows_; }
  int columns() const { return cols_; }
  int rows() const { return rows_; }
  const std::vector<Interface>& interfaces() const { return interfaces_; }
  const std::vector<Point>& singular_vertices() const { return vertices_; }

  /// Bounding box of subdomain i as (x-interval, y-interval).
  std::array<Interval, 2> subdomain_box(int i) const;
  double subdomain_measure(int i) const;
  double measure() const;
  /// Total measure of all interfaces (segment lengths in 2D, count in 1D).
  double interface_measure() const;

  /// Index of the subdomain strictly containing x. Throws for points on an
  /// interface or outside the open domain.
  int subdomain_index(const Point& x) const;
  /// Distance from x to the nearest interface carrier (infinity if none).
  double distance_to_interfaces(const Point& x) const;
  bool inside_closed(const Point& x) const;

  AngularTrace angular_trace(std::span<const double> params, int vertex) const;

  /// Shortest distance from any singular vertex to another vertex or to the
  /// outer boundary. Zero when there are no singular vertices.
  double vertex_clearance() const;

 private:
  int column_of(double x) const;
  int row_of(double y) const;

  int dim_ = 1;
  std::array<Interval, 2> bounds_{};
  std::vector<double> cuts_x_;
  std::vector<double> cuts_y_;
  int cols_ = 1;
  int rows_ = 1;
  std::vector<Interface> interfaces_;
  std::vector<Point> vertices_;
};

}  // namespace lsreconn
