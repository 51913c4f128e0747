#include "lsreconn/ls_assembly.hpp"

#include <atomic>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace lsreconn {
namespace {

std::atomic<bool> g_flip_jump{false};

void check_params(const EpochCache& cache, std::span<const double> params) {
  if (static_cast<int>(params.size()) != cache.subdomains) {
    throw std::invalid_argument("parameter length " + std::to_string(params.size()) +
                                " does not match subdomain count " + std::to_string(cache.subdomains));
  }
  for (double p : params) {
    if (!(p > 0.0) || !std::isfinite(p)) throw std::invalid_argument("parameters must be positive and finite");
  }
}

double rhs_factor(const EpochCache& cache, double p) { return cache.rhs_scales_with_p ? p : 1.0; }

}  // namespace

double relative_ridge(const Eigen::MatrixXd& a, double factor) {
  const double n = static_cast<double>(std::max<Eigen::Index>(1, a.cols()));
  const double r = factor * a.trace() / n;
  return r > 0.0 ? r : 1e-300;
}

EpochCache build_epoch_cache(const Geometry& geometry, const BasisEvaluation& basis,
                             const QuadratureSet& q, const RhsSpec& rhs) {
  const Eigen::Index j1 = static_cast<Eigen::Index>(q.J1());
  const Eigen::Index j2 = static_cast<Eigen::Index>(q.J2());
  if (basis.laplacian.rows() != j1 || basis.trace_minus.rows() != j2 || basis.trace_plus.rows() != j2) {
    throw std::invalid_argument("basis evaluation does not match the quadrature point counts");
  }
  if (basis.trace_minus.cols() != basis.laplacian.cols() || basis.trace_plus.cols() != basis.laplacian.cols()) {
    throw std::invalid_argument("basis evaluation column counts disagree");
  }
  EpochCache c;
  c.dim = geometry.dim();
  c.n_nn = static_cast<int>(basis.laplacian.cols());
  c.subdomains = geometry.subdomain_count();
  c.interfaces = static_cast<int>(geometry.interfaces().size());
  c.points = q.interior;
  c.subdomain = q.interior_subdomain;
  c.sqrt_w.resize(j1);
  c.rhs.resize(j1);
  for (Eigen::Index j = 0; j < j1; ++j) {
    c.sqrt_w[j] = std::sqrt(q.interior_weight[j]);
    c.rhs[j] = rhs.spatial(q.interior[j]);
  }
  c.rhs_scales_with_p = rhs.scales_with_p;
  c.laplacian = basis.laplacian;

  c.iface_points = q.iface;
  c.iface_id = q.iface_id;
  c.iface_sqrt_w.resize(j2);
  for (Eigen::Index k = 0; k < j2; ++k) {
    const Interface& f = geometry.interfaces().at(q.iface_id[k]);
    c.minus_side.push_back(f.minus_side);
    c.plus_side.push_back(f.plus_side);
    c.iface_sqrt_w[k] = std::sqrt(q.iface_weight[k]);
  }
  c.trace_minus = basis.trace_minus;
  c.trace_plus = basis.trace_plus;
  return c;
}

Eigen::MatrixXd singular_sources(const EpochCache& cache, const SingularBasis& singular) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(cache.J1(), singular.size());
  for (int m = 0; m < singular.size(); ++m) {
    for (Eigen::Index j = 0; j < cache.J1(); ++j) s(j, m) = singular.eval_S_source(m, cache.points[j]);
  }
  return s;
}

void set_jump_sign_flip(bool on) { g_flip_jump = on; }

LsSystem assemble_system(const EpochCache& cache, std::span<const double> params,
                         const Eigen::MatrixXd& sources, double theta) {
  check_params(cache, params);
  if (sources.rows() != cache.J1()) throw std::invalid_argument("singular sources must have J1 rows");
  if (theta < 0.0) throw std::invalid_argument("theta must be non-negative");
  const Eigen::Index j1 = cache.J1(), j2 = cache.J2();
  const int n = cache.n_nn;
  const int ns = static_cast<int>(sources.cols());
  LsSystem sys;
  sys.n_nn = n;
  sys.n_sing = ns;
  sys.theta = theta;
  sys.matrix = Eigen::MatrixXd::Zero(j1 + j2, n + ns);
  sys.rhs = Eigen::VectorXd::Zero(j1 + j2);
  for (Eigen::Index j = 0; j < j1; ++j) {
    const double p = params[cache.subdomain[j]];
    const double f = -p * cache.sqrt_w[j];
    sys.matrix.row(j).head(n) = f * cache.laplacian.row(j);
    if (ns > 0) sys.matrix.row(j).tail(ns) = f * sources.row(j);
    sys.rhs[j] = cache.sqrt_w[j] * rhs_factor(cache, p) * cache.rhs[j];
  }
  const double st = std::sqrt(theta) * (g_flip_jump ? -1.0 : 1.0);
  for (Eigen::Index k = 0; k < j2; ++k) {
    const double pm = params[cache.minus_side[k]];
    const double pp = params[cache.plus_side[k]];
    const double f = st * cache.iface_sqrt_w[k];
    sys.matrix.row(j1 + k).head(n) = f * (pp * cache.trace_plus.row(k) - pm * cache.trace_minus.row(k));
  }
  return sys;
}

LsSolution solve_normal_system(const NormalSystem& sys, std::optional<double> ridge) {
  const Eigen::Index n = sys.A.rows();
  LsSolution out;
  if (n == 0) {
    out.y = Eigen::VectorXd();
    out.residual2 = sys.c;
    return out;
  }
  if (!sys.A.allFinite() || !sys.b.allFinite()) throw std::runtime_error("LS system contains non-finite entries");
  double r = ridge ? *ridge : relative_ridge(sys.A);
  const int attempts = ridge && *ridge == 0.0 ? 1 : 4;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    Eigen::MatrixXd m = sys.A;
    m.diagonal().array() += r;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() == Eigen::Success) {
      out.y = llt.solve(sys.b);
      if (out.y.allFinite()) {
        out.ridge = r;
        out.residual2 = std::max(0.0, sys.c - 2.0 * sys.b.dot(out.y) + out.y.dot(sys.A * out.y));
        return out;
      }
    }
    if (r == 0.0) break;
    r *= 100.0;
  }
  std::ostringstream msg;
  msg << "Cholesky factorization failed (n=" << n << ", diag range [" << sys.A.diagonal().minCoeff() << ", "
      << sys.A.diagonal().maxCoeff() << "], last ridge " << r / 100.0 << ")";
  throw std::runtime_error(msg.str());
}

LsSolution solve_normal_equations(const LsSystem& system, std::optional<double> ridge) {
  if (!system.matrix.allFinite() || !system.rhs.allFinite()) {
    throw std::runtime_error("LS system contains non-finite entries");
  }
  NormalSystem ns;
  ns.A = system.matrix.transpose() * system.matrix;
  ns.b = system.matrix.transpose() * system.rhs;
  ns.c = system.rhs.squaredNorm();
  LsSolution sol = solve_normal_system(ns, ridge);
  sol.residual2 = (system.matrix * sol.y - system.rhs).squaredNorm();
  return sol;
}

GramCache build_gram_cache(const EpochCache& cache, const Geometry& geometry, const CutoffConfig& cutoffs) {
  GramCache g;
  g.n = cache.n_nn;
  const int ns = cache.subdomains;
  g.G.assign(ns, Eigen::MatrixXd::Zero(g.n, g.n));
  g.h.assign(ns, Eigen::VectorXd::Zero(g.n));
  g.c.assign(ns, 0.0);
  // Group rows by subdomain, scale by sqrt(w), then one rank-k update each.
  for (int s = 0; s < ns; ++s) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index j = 0; j < cache.J1(); ++j) {
      if (cache.subdomain[j] == s) rows.push_back(j);
    }
    Eigen::MatrixXd m(rows.size(), g.n);
    Eigen::VectorXd f(rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      m.row(k) = cache.sqrt_w[rows[k]] * cache.laplacian.row(rows[k]);
      f[k] = cache.sqrt_w[rows[k]] * cache.rhs[rows[k]];
    }
    g.G[s].selfadjointView<Eigen::Lower>().rankUpdate(m.transpose());
    g.G[s] = g.G[s].selfadjointView<Eigen::Lower>();
    g.h[s] = m.transpose() * f;
    g.c[s] = f.squaredNorm();
  }
  const auto& faces = geometry.interfaces();
  g.jumps.resize(faces.size());
  for (std::size_t i = 0; i < faces.size(); ++i) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index k = 0; k < cache.J2(); ++k) {
      if (cache.iface_id[k] == static_cast<int>(i)) rows.push_back(k);
    }
    Eigen::MatrixXd tp(rows.size(), g.n), tm(rows.size(), g.n);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      tp.row(k) = cache.iface_sqrt_w[rows[k]] * cache.trace_plus.row(rows[k]);
      tm.row(k) = cache.iface_sqrt_w[rows[k]] * cache.trace_minus.row(rows[k]);
    }
    auto& jb = g.jumps[i];
    jb.minus = faces[i].minus_side;
    jb.plus = faces[i].plus_side;
    jb.A = tp.transpose() * tp;
    jb.C = tp.transpose() * tm;
    jb.D = tm.transpose() * tm;
  }
  const auto& verts = geometry.singular_vertices();
  for (Eigen::Index j = 0; j < cache.J1(); ++j) {
    for (const Point& v : verts) {
      const double r = std::hypot(cache.points[j][0] - v[0], cache.points[j][1] - v[1]);
      if (r > cutoffs.delta1 && r < cutoffs.delta2) {
        g.annulus_rows.push_back(static_cast<int>(j));
        break;
      }
    }
  }
  return g;
}

NormalSystem assemble_normal(const GramCache& gram, const EpochCache& cache, std::span<const double> params,
                             const Eigen::MatrixXd& sources, double theta) {
  check_params(cache, params);
  const int n = gram.n;
  const int ns = static_cast<int>(sources.cols());
  NormalSystem sys;
  sys.A = Eigen::MatrixXd::Zero(n + ns, n + ns);
  sys.b = Eigen::VectorXd::Zero(n + ns);
  auto ann = sys.A.topLeftCorner(n, n);
  for (int s = 0; s < cache.subdomains; ++s) {
    const double p = params[s];
    ann += (p * p) * gram.G[s];
    sys.b.head(n) -= (p * rhs_factor(cache, p)) * gram.h[s];
    sys.c += rhs_factor(cache, p) * rhs_factor(cache, p) * gram.c[s];
  }
  for (const auto& jb : gram.jumps) {
    const double pm = params[jb.minus];
    const double pp = params[jb.plus];
    ann += theta * (pp * pp) * jb.A;
    ann -= theta * (pp * pm) * (jb.C + jb.C.transpose());
    ann += theta * (pm * pm) * jb.D;
  }
  if (ns > 0) {
    for (int j : gram.annulus_rows) {
      const double p = params[cache.subdomain[j]];
      const double w = cache.sqrt_w[j] * cache.sqrt_w[j];
      const Eigen::RowVectorXd srow = sources.row(j);
      if (srow.isZero(0.0)) continue;
      sys.A.topRightCorner(n, ns).noalias() += (w * p * p) * cache.laplacian.row(j).transpose() * srow;
      sys.A.bottomRightCorner(ns, ns).noalias() += (w * p * p) * srow.transpose() * srow;
      sys.b.tail(ns) -= (w * p * rhs_factor(cache, p) * cache.rhs[j]) * srow.transpose();
    }
    sys.A.bottomLeftCorner(ns, n) = sys.A.topRightCorner(n, ns).transpose();
  }
  return sys;
}

Eigen::VectorXd residual_vector(const EpochCache& cache, std::span<const double> params,
                                const Eigen::MatrixXd& sources, double theta, const Eigen::VectorXd& y) {
  check_params(cache, params);
  const int n = cache.n_nn;
  const Eigen::Index ns = sources.cols();
  Eigen::VectorXd r(cache.J1() + cache.J2());
  const Eigen::VectorXd lap_y = cache.laplacian * y.head(n);
  Eigen::VectorXd src_y = Eigen::VectorXd::Zero(cache.J1());
  if (ns > 0) src_y = sources * y.tail(ns);
  for (Eigen::Index j = 0; j < cache.J1(); ++j) {
    const double p = params[cache.subdomain[j]];
    r[j] = cache.sqrt_w[j] * (-p * (lap_y[j] + src_y[j]) - rhs_factor(cache, p) * cache.rhs[j]);
  }
  const Eigen::VectorXd tp = cache.trace_plus * y.head(n);
  const Eigen::VectorXd tm = cache.trace_minus * y.head(n);
  const double st = std::sqrt(theta);
  for (Eigen::Index k = 0; k < cache.J2(); ++k) {
    r[cache.J1() + k] = st * cache.iface_sqrt_w[k] *
                        (params[cache.plus_side[k]] * tp[k] - params[cache.minus_side[k]] * tm[k]);
  }
  return r;
}

BasisFields append_singular_fields(const BasisFields& nn, const SingularBasis& singular,
                                   std::span<const Point> points) {
  const Eigen::Index np = static_cast<Eigen::Index>(points.size());
  if (nn.value.rows() != np) throw std::invalid_argument("append_singular_fields: point count mismatch");
  const Eigen::Index n = nn.value.cols();
  const int ns = singular.size();
  BasisFields out;
  out.value.resize(np, n + ns);
  out.grad[0].resize(np, n + ns);
  out.grad[1].resize(np, n + ns);
  out.value.leftCols(n) = nn.value;
  out.grad[0].leftCols(n) = nn.grad[0];
  out.grad[1].leftCols(n) = nn.grad[1];
  for (int m = 0; m < ns; ++m) {
    for (Eigen::Index i = 0; i < np; ++i) {
      const auto s = singular.eval_s(m, points[i], true);
      out.value(i, n + m) = s[0];
      out.grad[0](i, n + m) = s[1];
      out.grad[1](i, n + m) = s[2];
    }
  }
  return out;
}

SolutionFields evaluate_solution(const CoefficientVector& coeffs, const BasisFields& fields) {
  if (coeffs.y.size() != fields.value.cols()) {
    throw std::invalid_argument("coefficient length " + std::to_string(coeffs.y.size()) +
                                " does not match " + std::to_string(fields.value.cols()) + " basis columns");
  }
  SolutionFields s;
  s.value = fields.value * coeffs.y;
  s.grad.resize(fields.value.rows(), 2);
  s.grad.col(0) = fields.grad[0] * coeffs.y;
  s.grad.col(1) = fields.grad[1].size() ? Eigen::VectorXd(fields.grad[1] * coeffs.y)
                                        : Eigen::VectorXd::Zero(fields.value.rows());
  return s;
}

}  // namespace lsreconn
