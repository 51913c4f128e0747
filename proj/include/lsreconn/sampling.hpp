#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "lsreconn/geometry.hpp"

namespace lsreconn {

/// Interior and interface quadrature points with their weights.
struct QuadratureSet {
  int dim = 1;
  std::vector<Point> interior;
  std::vector<int> interior_subdomain;
  std::vector<double> interior_weight;
  std::vector<Point> iface;
  std::vector<int> iface_id;
  std::vector<double> iface_weight;

  std::size_t J1() const { return interior.size(); }
  std::size_t J2() const { return iface.size(); }
};

struct SamplerConfig {
  int n_params = 500;
  double p_min = 0.01;
  double p_max = 50.0;
  int n_interior = 100;   ///< 1D: points per subdomain; 2D: points per axis
  int n_interface = 1;    ///< points per interface segment (always 1 in 1D)

  void validate() const;
};

/// p = (p_min + p_max)/2 + cos(z) (p_max - p_min)/2.
double parameter_from_angle(double z, double p_min, double p_max);

/// n samples, each with `components` i.i.d. entries, z ~ U[0, pi].
std::vector<ParameterSample> sample_parameters(const SamplerConfig& config, int components, int n,
                                               std::mt19937_64& rng);

/// Stratified (grid-jittered) collocation: one uniform draw per cell.
QuadratureSet sample_collocation(const Geometry& geometry, int n_interior, int n_interface,
                                 std::mt19937_64& interior_rng, std::mt19937_64& interface_rng);

/// Frozen validation set: per-axis (1D: per-subdomain) counts + 3, from a dedicated seed.
QuadratureSet validation_set(const Geometry& geometry, int n_interior, int n_interface, std::uint64_t seed);

/// Cell centres of a uniform grid (1D: cells distributed over subdomains by
/// length) and interface segment midpoints. Throws when a centre lands on an interface.
QuadratureSet midpoint_grid(const Geometry& geometry, int n_per_axis, int n_per_interface);

}  // namespace lsreconn
