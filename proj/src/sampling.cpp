#include "lsreconn/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsreconn {
namespace {

constexpr double kInterfaceGap = 1e-12;

double draw(std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void add_interface_points(const Geometry& g, int n, std::mt19937_64* rng, QuadratureSet& q) {
  for (const Interface& f : g.interfaces()) {
    if (g.dim() == 1) {
      q.iface.push_back({f.position, 0.0});
      q.iface_id.push_back(f.id);
      q.iface_weight.push_back(f.measure(1));
      continue;
    }
    const double h = f.extent.length() / n;
    for (int k = 0; k < n; ++k) {
      double t;
      do {
        const double u = rng ? draw(*rng) : 0.5;
        t = f.extent.lo + (k + u) * h;
      } while (std::abs(t - f.extent.lo) < kInterfaceGap || std::abs(t - f.extent.hi) < kInterfaceGap);
      q.iface.push_back(f.at(t));
      q.iface_id.push_back(f.id);
      q.iface_weight.push_back(h);
    }
  }
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(p_min > 0.0) || !(p_max >= p_min)) throw std::invalid_argument("sampler needs 0 < p_min <= p_max");
  if (n_params < 1) throw std::invalid_argument("sampler needs n_params >= 1");
  if (n_interior < 1 || n_interface < 1) throw std::invalid_argument("collocation counts must be >= 1");
}

double parameter_from_angle(double z, double p_min, double p_max) {
  return 0.5 * (p_min + p_max) + std::cos(z) * 0.5 * (p_max - p_min);
}

std::vector<ParameterSample> sample_parameters(const SamplerConfig& config, int components, int n,
                                               std::mt19937_64& rng) {
  if (n < 1) throw std::invalid_argument("sample_parameters: n must be >= 1");
  std::vector<ParameterSample> out(n);
  for (auto& s : out) {
    s.values.resize(components);
    for (auto& v : s.values) {
      const double z = std::numbers::pi * draw(rng);
      v = std::clamp(parameter_from_angle(z, config.p_min, config.p_max), config.p_min, config.p_max);
    }
  }
  return out;
}

QuadratureSet sample_collocation(const Geometry& g, int n_interior, int n_interface,
                                 std::mt19937_64& interior_rng, std::mt19937_64& interface_rng) {
  if (n_interior < 1 || n_interface < 1) throw std::invalid_argument("collocation counts must be >= 1");
  QuadratureSet q;
  q.dim = g.dim();
  if (g.dim() == 1) {
    for (int i = 0; i < g.subdomain_count(); ++i) {
      const Interval iv = g.subdomain_box(i)[0];
      const double h = iv.length() / n_interior;
      for (int k = 0; k < n_interior; ++k) {
        double x;
        do {
          x = iv.lo + (k + draw(interior_rng)) * h;
        } while (x - iv.lo < kInterfaceGap || iv.hi - x < kInterfaceGap);
        q.interior.push_back({x, 0.0});
        q.interior_subdomain.push_back(i);
        q.interior_weight.push_back(h);
      }
    }
  } else {
    const auto& b = g.bounds();
    const double hx = b[0].length() / n_interior;
    const double hy = b[1].length() / n_interior;
    for (int iy = 0; iy < n_interior; ++iy) {
      for (int ix = 0; ix < n_interior; ++ix) {
        Point x;
        do {
          x = {b[0].lo + (ix + draw(interior_rng)) * hx, b[1].lo + (iy + draw(interior_rng)) * hy};
        } while (g.distance_to_interfaces(x) < kInterfaceGap || !b[0].contains_open(x[0]) ||
                 !b[1].contains_open(x[1]));
        q.interior.push_back(x);
        q.interior_subdomain.push_back(g.subdomain_index(x));
        q.interior_weight.push_back(hx * hy);
      }
    }
  }
  add_interface_points(g, g.dim() == 1 ? 1 : n_interface, &interface_rng, q);
  return q;
}

QuadratureSet validation_set(const Geometry& g, int n_interior, int n_interface, std::uint64_t seed) {
  std::mt19937_64 rng_in(seed);
  std::mt19937_64 rng_if(seed ^ 0x9E3779B97F4A7C15ULL);
  return sample_collocation(g, n_interior + 3, n_interface + 3, rng_in, rng_if);
}

QuadratureSet midpoint_grid(const Geometry& g, int n_per_axis, int n_per_interface) {
  if (n_per_axis < 1 || n_per_interface < 1) throw std::invalid_argument("midpoint_grid: n must be >= 1");
  QuadratureSet q;
  q.dim = g.dim();
  if (g.dim() == 1) {
    const double total = g.measure();
    for (int i = 0; i < g.subdomain_count(); ++i) {
      const Interval iv = g.subdomain_box(i)[0];
      const int cells = std::max(1, static_cast<int>(std::lround(n_per_axis * iv.length() / total)));
      const double h = iv.length() / cells;
      for (int k = 0; k < cells; ++k) {
        q.interior.push_back({iv.lo + (k + 0.5) * h, 0.0});
        q.interior_subdomain.push_back(i);
        q.interior_weight.push_back(h);
      }
    }
  } else {
    const auto& b = g.bounds();
    const double hx = b[0].length() / n_per_axis;
    const double hy = b[1].length() / n_per_axis;
    for (int iy = 0; iy < n_per_axis; ++iy) {
      for (int ix = 0; ix < n_per_axis; ++ix) {
        const Point x{b[0].lo + (ix + 0.5) * hx, b[1].lo + (iy + 0.5) * hy};
        if (g.distance_to_interfaces(x) < kInterfaceGap) {
          throw std::invalid_argument("midpoint_grid: a cell centre lies on an interface");
        }
        q.interior.push_back(x);
        q.interior_subdomain.push_back(g.subdomain_index(x));
        q.interior_weight.push_back(hx * hy);
      }
    }
  }
  add_interface_points(g, n_per_interface, nullptr, q);
  return q;
}

}  // namespace lsreconn
