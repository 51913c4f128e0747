#include "lsreconn/singular_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lsreconn {

std::vector<EigenPair> EigenCache::pairs(const AngularTrace& trace) {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = store_.find(trace.value);
    if (it != store_.end()) return it->second;
  }
  auto result = solve_eigenpairs(assemble_eigensystem(trace));
  std::lock_guard<std::mutex> lock(mutex_);
  store_.emplace(trace.value, result);
  return result;
}

std::size_t EigenCache::size() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return store_.size();
}

void EigenCache::clear() {
  std::lock_guard<std::mutex> lock(mutex_);
  store_.clear();
}

SingularBasis::SingularBasis(const Geometry& geometry, CutoffConfig config,
                             std::vector<std::vector<EigenPair>> per_vertex)
    : vertices_(geometry.singular_vertices()), config_(config) {
  if (per_vertex.size() != vertices_.size()) {
    throw std::invalid_argument("singular basis: one pair list per vertex required");
  }
  if (!vertices_.empty()) config_.validate(geometry);
  for (std::size_t v = 0; v < per_vertex.size(); ++v) {
    for (std::size_t j = 0; j < per_vertex[v].size(); ++j) {
      modes_.push_back({static_cast<int>(v), static_cast<int>(j), per_vertex[v][j]});
    }
  }
}

SingularBasis SingularBasis::build(const Geometry& geometry, const CutoffConfig& config,
                                   std::span<const double> params, int n3, EigenCache* cache,
                                   SelectionRule rule) {
  std::vector<std::vector<EigenPair>> per_vertex;
  for (std::size_t v = 0; v < geometry.singular_vertices().size(); ++v) {
    const AngularTrace trace = geometry.angular_trace(params, static_cast<int>(v));
    const auto all = cache ? cache->pairs(trace) : solve_eigenpairs(assemble_eigensystem(trace));
    per_vertex.push_back(select_singular(all, n3, 1e-6, rule));
  }
  return SingularBasis(geometry, config, std::move(per_vertex));
}

int SingularBasis::mode_index(int vertex, int pair) const {
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (modes_[k].vertex == vertex && modes_[k].pair == pair) return static_cast<int>(k);
  }
  throw std::out_of_range("no singular mode for this vertex/pair");
}

std::array<double, 3> SingularBasis::eval_s(int mode, const Point& x, bool with_gradient) const {
  const Mode& m = modes_.at(mode);
  const Point& c = vertices_[m.vertex];
  const double dx = x[0] - c[0];
  const double dy = x[1] - c[1];
  const double r = std::hypot(dx, dy);
  if (r >= config_.delta2) return {0.0, 0.0, 0.0};
  if (with_gradient && r < 1e-12) throw std::domain_error("singular gradient requested at the vertex");
  if (r == 0.0) return {0.0, 0.0, 0.0};
  double theta = std::atan2(dy, dx);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const auto mu = angular_eval(m.eig, theta);
  const RadialJet e = eta_jet(r, config_);
  const double lam = m.eig.exponent;
  const double rl = std::pow(r, lam);
  const double value = rl * mu[0] * e.value;
  if (!with_gradient) return {value, 0.0, 0.0};
  const double dr = (lam * rl / r * e.value + rl * e.d1) * mu[0];
  const double dth = rl * e.value * mu[1];
  const double ur[2] = {dx / r, dy / r};
  const double ut[2] = {-ur[1], ur[0]};
  return {value, dr * ur[0] + dth / r * ut[0], dr * ur[1] + dth / r * ut[1]};
}

double SingularBasis::eval_S_source(int mode, const Point& x) const {
  const Mode& m = modes_.at(mode);
  const Point& c = vertices_[m.vertex];
  const double dx = x[0] - c[0];
  const double dy = x[1] - c[1];
  const double r = std::hypot(dx, dy);
  if (r <= config_.delta1 || r >= config_.delta2) return 0.0;
  double theta = std::atan2(dy, dx);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  const double mu = angular_eval(m.eig, theta)[0];
  const RadialJet e = eta_jet(r, config_);
  const double lam = m.eig.exponent;
  const double rl = std::pow(r, lam);
  return (2.0 * lam * rl / r * e.d1 + rl * (e.d2 + e.d1 / r)) * mu;
}

}  // namespace lsreconn
