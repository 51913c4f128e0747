#include "lsreconn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace lsreconn {
namespace {

void check_cuts(const std::vector<double>& cuts, const Interval& range, const char* name) {
  for (std::size_t i = 0; i < cuts.size(); ++i) {
    if (!std::isfinite(cuts[i]) || !range.contains_open(cuts[i])) {
      throw std::invalid_argument(std::string(name) + " must lie strictly inside the bounds");
    }
    if (i > 0 && !(cuts[i] > cuts[i - 1])) {
      throw std::invalid_argument(std::string(name) + " must be strictly increasing");
    }
  }
}

Interval cell(const std::vector<double>& cuts, const Interval& range, int k) {
  const double lo = k == 0 ? range.lo : cuts[k - 1];
  const double hi = k == static_cast<int>(cuts.size()) ? range.hi : cuts[k];
  return {lo, hi};
}

}  // namespace

Geometry Geometry::build_grid(int dim, std::vector<double> cuts_x,
                              std::vector<double> cuts_y,
                              std::array<Interval, 2> bounds) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("dimension must be 1 or 2");
  if (!(bounds[0].hi > bounds[0].lo)) throw std::invalid_argument("empty x bounds");
  if (dim == 2 && !(bounds[1].hi > bounds[1].lo)) throw std::invalid_argument("empty y bounds");
  if (dim == 1) {
    if (!cuts_y.empty()) throw std::invalid_argument("1D geometry takes no cuts_y");
    bounds[1] = {0.0, 0.0};
  }
  check_cuts(cuts_x, bounds[0], "cuts_x");
  check_cuts(cuts_y, bounds[1], "cuts_y");

  Geometry g;
  g.dim_ = dim;
  g.bounds_ = bounds;
  g.cuts_x_ = std::move(cuts_x);
  g.cuts_y_ = std::move(cuts_y);
  g.cols_ = static_cast<int>(g.cuts_x_.size()) + 1;
  g.rows_ = dim == 2 ? static_cast<int>(g.cuts_y_.size()) + 1 : 1;

  auto index = [&g](int col, int row_from_bottom) {
    return (g.rows_ - 1 - row_from_bottom) * g.cols_ + col;
  };

  int id = 0;
  for (int k = 0; k < static_cast<int>(g.cuts_x_.size()); ++k) {
    for (int r = 0; r < g.rows_; ++r) {
      Interface f;
      f.id = id++;
      f.axis = 0;
      f.position = g.cuts_x_[k];
      f.extent = dim == 2 ? cell(g.cuts_y_, g.bounds_[1], r) : Interval{0.0, 0.0};
      f.minus_side = index(k, r);
      f.plus_side = index(k + 1, r);
      g.interfaces_.push_back(f);
    }
  }
  for (int k = 0; k < static_cast<int>(g.cuts_y_.size()); ++k) {
    for (int c = 0; c < g.cols_; ++c) {
      Interface f;
      f.id = id++;
      f.axis = 1;
      f.position = g.cuts_y_[k];
      f.extent = cell(g.cuts_x_, g.bounds_[0], c);
      f.minus_side = index(c, k);
      f.plus_side = index(c, k + 1);
      g.interfaces_.push_back(f);
    }
  }
  if (dim == 2) {
    for (double y : g.cuts_y_) {
      for (double x : g.cuts_x_) g.vertices_.push_back({x, y});
    }
  }
  return g;
}

std::array<Interval, 2> Geometry::subdomain_box(int i) const {
  if (i < 0 || i >= subdomain_count()) throw std::out_of_range("subdomain index");
  const int col = i % cols_;
  const int row_from_bottom = rows_ - 1 - i / cols_;
  std::array<Interval, 2> box{cell(cuts_x_, bounds_[0], col), Interval{0.0, 0.0}};
  if (dim_ == 2) box[1] = cell(cuts_y_, bounds_[1], row_from_bottom);
  return box;
}

double Geometry::subdomain_measure(int i) const {
  const auto box = subdomain_box(i);
  return dim_ == 1 ? box[0].length() : box[0].length() * box[1].length();
}

double Geometry::measure() const {
  return dim_ == 1 ? bounds_[0].length() : bounds_[0].length() * bounds_[1].length();
}

double Geometry::interface_measure() const {
  double total = 0.0;
  for (const auto& f : interfaces_) total += f.measure(dim_);
  return total;
}

int Geometry::column_of(double x) const {
  return static_cast<int>(std::upper_bound(cuts_x_.begin(), cuts_x_.end(), x) - cuts_x_.begin());
}

int Geometry::row_of(double y) const {
  return static_cast<int>(std::upper_bound(cuts_y_.begin(), cuts_y_.end(), y) - cuts_y_.begin());
}

bool Geometry::inside_closed(const Point& x) const {
  if (x[0] < bounds_[0].lo || x[0] > bounds_[0].hi) return false;
  if (dim_ == 2 && (x[1] < bounds_[1].lo || x[1] > bounds_[1].hi)) return false;
  return true;
}

int Geometry::subdomain_index(const Point& x) const {
  if (!bounds_[0].contains_open(x[0]) || (dim_ == 2 && !bounds_[1].contains_open(x[1]))) {
    throw std::invalid_argument("point outside the open domain");
  }
  if (std::find(cuts_x_.begin(), cuts_x_.end(), x[0]) != cuts_x_.end() ||
      (dim_ == 2 && std::find(cuts_y_.begin(), cuts_y_.end(), x[1]) != cuts_y_.end())) {
    throw std::invalid_argument("point lies on an interface");
  }
  const int col = column_of(x[0]);
  const int row = dim_ == 2 ? row_of(x[1]) : 0;
  return (rows_ - 1 - row) * cols_ + col;
}

double Geometry::distance_to_interfaces(const Point& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (double c : cuts_x_) d = std::min(d, std::abs(x[0] - c));
  if (dim_ == 2) {
    for (double c : cuts_y_) d = std::min(d, std::abs(x[1] - c));
  }
  return d;
}

AngularTrace Geometry::angular_trace(std::span<const double> params, int vertex) const {
  if (vertex < 0 || vertex >= static_cast<int>(vertices_.size())) {
    throw std::out_of_range("vertex is not a singular vertex of this geometry");
  }
  if (static_cast<int>(params.size()) != subdomain_count()) {
    throw std::invalid_argument("parameter length does not match subdomain count");
  }
  const Point v = vertices_[vertex];
  // Quadrant probes: +x+y, -x+y, -x-y, +x-y.
  constexpr std::array<std::array<int, 2>, 4> dirs{{{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}};
  const int kx = static_cast<int>(std::lower_bound(cuts_x_.begin(), cuts_x_.end(), v[0]) - cuts_x_.begin());
  const int ky = static_cast<int>(std::lower_bound(cuts_y_.begin(), cuts_y_.end(), v[1]) - cuts_y_.begin());
  AngularTrace trace;
  for (int s = 0; s < 4; ++s) {
    const int col = dirs[s][0] > 0 ? kx + 1 : kx;
    const int row = dirs[s][1] > 0 ? ky + 1 : ky;
    const int idx = (rows_ - 1 - row) * cols_ + col;
    trace.subdomain[s] = idx;
    trace.value[s] = params[idx];
  }
  return trace;
}

double Geometry::vertex_clearance() const {
  if (vertices_.empty()) return 0.0;
  // The union of the four cells touching a vertex is bounded by the
  // neighbouring cut lines (or the outer boundary) on each side.
  auto gaps = [](const std::vector<double>& cuts, const Interval& range) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < cuts.size(); ++k) {
      const double prev = k == 0 ? range.lo : cuts[k - 1];
      const double next = k + 1 == cuts.size() ? range.hi : cuts[k + 1];
      g = std::min({g, cuts[k] - prev, next - cuts[k]});
    }
    return g;
  };
  return std::min(gaps(cuts_x_, bounds_[0]), gaps(cuts_y_, bounds_[1]));
}

}  // namespace lsreconn
