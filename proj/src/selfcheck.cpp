#include "lsreconn/selfcheck.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/SVD>

#include "lsreconn/angular_eigensolver.hpp"
#include "lsreconn/basis_net.hpp"
#include "lsreconn/composed_basis.hpp"
#include "lsreconn/cutoffs.hpp"
#include "lsreconn/ls_assembly.hpp"
#include "lsreconn/sampling.hpp"
#include "lsreconn/singular_basis.hpp"

namespace lsreconn {
namespace {

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

CheckResult check_jets() {
  NetConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {6, 6};
  cfg.n1 = 2;
  cfg.n2 = 4;
  const MlpParams params = init_params(cfg, 11);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts(5);
  for (auto& x : pts) x = {u(rng), u(rng)};
  const JetBatch j = forward_jets(params, pts);

  const double h = 1e-4;
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    Point xs[5] = {pts[i], pts[i], pts[i], pts[i], pts[i]};
    xs[1][0] += h;
    xs[2][0] -= h;
    xs[3][1] += h;
    xs[4][1] -= h;
    const JetBatch f = forward_jets(params, std::span<const Point>(xs, 5));
    for (Eigen::Index n = 0; n < j.outputs(); ++n) {
      const double gx = (f.value(1, n) - f.value(2, n)) / (2 * h);
      const double gy = (f.value(3, n) - f.value(4, n)) / (2 * h);
      const double lap = (f.value(1, n) + f.value(2, n) + f.value(3, n) + f.value(4, n) - 4 * f.value(0, n)) / (h * h);
      worst = std::max({worst, std::abs(gx - j.grad[0](i, n)), std::abs(gy - j.grad[1](i, n)),
                        std::abs(lap - j.laplacian(i, n)) * 1e-2});
    }
  }
  return {"network jets vs finite differences", worst < 1e-6, "max deviation " + sci(worst)};
}

CheckResult check_backward() {
  NetConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {5, 4};
  cfg.n1 = 2;
  cfg.n2 = 2;
  MlpParams params = init_params(cfg, 3);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<Point> pts = {{0.1, 0.2}, {-0.4, 0.7}, {0.9, -0.3}};
  ForwardTape tape;
  const JetBatch j = forward_jets(params, pts, &tape);
  JetBatch adj = JetBatch::zeros(2, j.points(), j.outputs());
  auto fill = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = g(rng);
  };
  fill(adj.value);
  fill(adj.grad[0]);
  fill(adj.grad[1]);
  fill(adj.laplacian);
  const Eigen::VectorXd grad = backward_jets(params, tape, adj);

  auto functional = [&](const MlpParams& p) {
    const JetBatch f = forward_jets(p, pts);
    return (adj.value.cwiseProduct(f.value)).sum() + (adj.grad[0].cwiseProduct(f.grad[0])).sum() +
           (adj.grad[1].cwiseProduct(f.grad[1])).sum() + (adj.laplacian.cwiseProduct(f.laplacian)).sum();
  };
  Eigen::VectorXd dir(params.flat.size());
  for (Eigen::Index k = 0; k < dir.size(); ++k) dir[k] = g(rng);
  const double h = 1e-6;
  MlpParams plus = params, minus = params;
  plus.flat += h * dir;
  minus.flat -= h * dir;
  const double fd = (functional(plus) - functional(minus)) / (2 * h);
  const double an = grad.dot(dir);
  const double rel = std::abs(fd - an) / std::max(1.0, std::abs(an));
  return {"reverse pass vs directional difference", rel < 1e-6, "relative deviation " + sci(rel)};
}

struct AssemblyFixture {
  Geometry geometry;
  CutoffLayout layout;
  QuadratureSet q;
  EpochCache cache;
  SingularBasis singular;
  Eigen::MatrixXd sources;
  std::vector<double> p;
};

AssemblyFixture make_fixture() {
  Geometry g = Geometry::build_grid(2, {-1.0 / 3, 1.0 / 3}, {-1.0 / 3, 1.0 / 3}, {Interval{-1, 1}, Interval{-1, 1}});
  const CutoffConfig cc = CutoffConfig::defaults_for(g);
  CutoffLayout layout(g, cc, 8, 8);
  NetConfig cfg;
  cfg.input_dim = 2;
  cfg.hidden = {6};
  cfg.n1 = 8;
  cfg.n2 = 8;
  const MlpParams params = init_params(cfg, 21);
  std::mt19937_64 ri(1), rf(2);
  QuadratureSet q = sample_collocation(g, 12, 3, ri, rf);
  const ComposedEvaluation ev = evaluate_composed(params, layout, q, false);
  const RhsSpec rhs = RhsSpec::sinsin2d();
  EpochCache cache = build_epoch_cache(g, ev.basis, q, rhs);
  std::vector<double> p(9);
  for (int i = 0; i < 9; ++i) p[i] = 0.5 + 1.7 * i;
  SingularBasis sb = SingularBasis::build(g, cc, p, 1);
  Eigen::MatrixXd src = singular_sources(cache, sb);
  return {std::move(g), std::move(layout), std::move(q), std::move(cache), std::move(sb), std::move(src), p};
}

// Pointwise assembly straight from the definitions, independent of the cache layout.
Eigen::MatrixXd direct_matrix(const AssemblyFixture& f, double theta) {
  const auto& c = f.cache;
  const Eigen::Index ns = f.sources.cols();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(c.J1() + c.J2(), c.n_nn + ns);
  for (Eigen::Index j = 0; j < c.J1(); ++j) {
    const double pj = f.p[f.geometry.subdomain_index(f.q.interior[j])];
    const double sw = std::sqrt(f.q.interior_weight[j]);
    for (int n = 0; n < c.n_nn; ++n) B(j, n) = -pj * sw * c.laplacian(j, n);
    for (Eigen::Index s = 0; s < ns; ++s) B(j, c.n_nn + s) = -pj * sw * f.sources(j, s);
  }
  for (Eigen::Index k = 0; k < c.J2(); ++k) {
    const Interface& itf = f.geometry.interfaces()[f.q.iface_id[k]];
    const double fac = std::sqrt(theta) * std::sqrt(f.q.iface_weight[k]);
    for (int n = 0; n < c.n_nn; ++n) {
      B(c.J1() + k, n) = fac * (f.p[itf.plus_side] * c.trace_plus(k, n) - f.p[itf.minus_side] * c.trace_minus(k, n));
    }
  }
  return B;
}

CheckResult check_assembly() {
  const AssemblyFixture f = make_fixture();
  const double theta = 2.5;
  const Eigen::MatrixXd B = direct_matrix(f, theta);
  const LsSystem sys = assemble_system(f.cache, f.p, f.sources, theta);
  const double dev = (sys.matrix - B).cwiseAbs().maxCoeff() / std::max(1.0, B.cwiseAbs().maxCoeff());

  set_jump_sign_flip(true);
  const LsSystem flipped = assemble_system(f.cache, f.p, f.sources, theta);
  set_jump_sign_flip(false);
  const double flip_dev = (flipped.matrix - B).cwiseAbs().maxCoeff() / std::max(1.0, B.cwiseAbs().maxCoeff());

  const GramCache gram = build_gram_cache(f.cache, f.geometry, f.layout.config());
  const NormalSystem ns = assemble_normal(gram, f.cache, f.p, f.sources, theta);
  const Eigen::MatrixXd BtB = sys.matrix.transpose() * sys.matrix;
  const double gram_dev = (ns.A - BtB).cwiseAbs().maxCoeff() / std::max(1.0, BtB.cwiseAbs().maxCoeff());

  const bool ok = dev < 1e-14 && flip_dev > 1e-8 && gram_dev < 1e-12;
  return {"assembly vs direct pointwise matrix", ok,
          "direct " + sci(dev) + ", normal blocks " + sci(gram_dev) + ", sign-flip detected " + sci(flip_dev)};
}

CheckResult check_solver() {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  LsSystem sys;
  sys.matrix.resize(60, 12);
  sys.rhs.resize(60);
  for (Eigen::Index k = 0; k < sys.matrix.size(); ++k) sys.matrix.data()[k] = g(rng);
  for (Eigen::Index k = 0; k < sys.rhs.size(); ++k) sys.rhs[k] = g(rng);
  const LsSolution sol = solve_normal_equations(sys, 0.0);
  const Eigen::VectorXd ref = sys.matrix.jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(sys.rhs);
  const double dev = (sol.y - ref).norm() / ref.norm();
  return {"normal-equation Cholesky vs SVD least squares", dev < 1e-10, "relative deviation " + sci(dev)};
}

CheckResult check_eigen() {
  AngularTrace constant;
  constant.value = {1.0, 1.0, 1.0, 1.0};
  AngularTrace checker;
  checker.value = {1.0, 10.0, 1.0, 10.0};
  const auto c_pairs = solve_eigenpairs(assemble_eigensystem(constant));
  const auto k_pairs = solve_eigenpairs(assemble_eigensystem(checker));
  const auto k_ref = semi_analytic_exponents(checker);
  auto first_positive = [](const std::vector<EigenPair>& pairs) {
    for (const auto& p : pairs) {
      if (p.exponent > 1e-6) return p.exponent;
    }
    return 0.0;
  };
  const double dc = std::abs(first_positive(c_pairs) - 1.0);
  const double dk = k_ref.empty() ? 1.0 : std::abs(first_positive(k_pairs) - k_ref.front());
  return {"angular exponents vs transfer-matrix roots", dc < 1e-5 && dk < 1e-4,
          "constant " + sci(dc) + ", checkerboard " + sci(dk)};
}

CheckResult check_cutoffs() {
  const CutoffConfig cc{0.1, 0.2};
  const RadialJet in = eta_jet(0.1, cc), out = eta_jet(0.2, cc), mid = eta_jet(0.15, cc);
  double worst = std::max({std::abs(in.value - 1), std::abs(in.d1), std::abs(in.d2), std::abs(out.value),
                           std::abs(out.d1), std::abs(out.d2), std::abs(mid.value - 0.5)});
  InterfaceLines lines{0, {-0.5, 0.5}};
  const Interface on{0, 0, 0.5, Interval{-1, 1}, 0, 1};
  const TraceJet t = jump_adf_trace({0.5, 0.2}, lines, 2, on);
  const ScalarJet near = jump_adf_jet({0.5 + 1e-7, 0.2}, lines, 2);
  worst = std::max({worst, std::abs(t.value), std::abs(near.value - 1e-7) * 1e6});
  return {"cutoff identities", worst < 1e-9, "max deviation " + sci(worst)};
}

}  // namespace

std::vector<CheckResult> run_selfcheck() {
  std::vector<CheckResult> out;
  auto guarded = [&out](const char* name, CheckResult (*fn)()) {
    try {
      out.push_back(fn());
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  guarded("network jets", check_jets);
  guarded("reverse pass", check_backward);
  guarded("assembly", check_assembly);
  guarded("solver", check_solver);
  guarded("angular exponents", check_eigen);
  guarded("cutoffs", check_cutoffs);
  return out;
}

}  // namespace lsreconn
