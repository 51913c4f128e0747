#include <doctest.h>

#include <cmath>

#include "lsreconn/cutoffs.hpp"
#include "testkit.hpp"

using namespace lsreconn;

namespace {

// Central-difference gradient and Hessian of a jet-valued field.
template <class F>
double jet_fd_deviation(F f, const Point& x, double h = 1e-4) {
  const ScalarJet j = f(x);
  double worst = 0.0;
  for (int a = 0; a < 2; ++a) {
    Point xp = x, xm = x;
    xp[a] += h;
    xm[a] -= h;
    const ScalarJet jp = f(xp), jm = f(xm);
    worst = std::max(worst, std::abs((jp.value - jm.value) / (2 * h) - j.grad[a]));
    for (int b = 0; b < 2; ++b) worst = std::max(worst, std::abs((jp.grad[b] - jm.grad[b]) / (2 * h) - j.hess[a][b]));
  }
  return worst;
}

}  // namespace

TEST_CASE("eta plateau, support and C2 joins") {
  const CutoffConfig cc{0.1, 0.2};
  CHECK(eta_jet(0.0, cc).value == 1.0);
  CHECK(eta_jet(0.05, cc).value == 1.0);
  CHECK(eta_jet(0.1, cc).d1 == 0.0);
  CHECK(eta_jet(0.25, cc).value == 0.0);
  CHECK(eta_jet(0.2, cc).d2 == 0.0);
  CHECK(eta_jet(0.15, cc).value == doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS(eta_jet(-1e-3, cc));
  CHECK(testkit::eta_c2_deviation() <= 1e-6);
}

TEST_CASE("eta is monotone on the transition") {
  const CutoffConfig cc{0.3, 0.7};
  double prev = 1.0;
  for (int k = 0; k <= 200; ++k) {
    const double v = eta_jet(0.3 + 0.4 * k / 200.0, cc).value;
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
}

TEST_CASE("boundary cutoff vanishes on the boundary and peaks at the centre") {
  const Geometry g = Geometry::build_grid(2, {0.0}, {0.0}, {Interval{-1, 1}, Interval{-1, 1}});
  CHECK(boundary_cutoff_jet({0.0, 0.0}, g).value == doctest::Approx(1.0));
  testkit::Gen gen(4);
  for (int k = 0; k < 20; ++k) {
    const double t = gen.uniform(-1, 1);
    CHECK(boundary_cutoff_jet({-1.0, t}, g).value == 0.0);
    CHECK(boundary_cutoff_jet({t, 1.0}, g).value == 0.0);
    const Point x{gen.uniform(-0.99, 0.99), gen.uniform(-0.99, 0.99)};
    CHECK(boundary_cutoff_jet(x, g).value > 0.0);
    CHECK(jet_fd_deviation([&](const Point& y) { return boundary_cutoff_jet(y, g); }, x) < 1e-7);
  }
  const Geometry l = Geometry::build_grid(1, {1.0}, {}, {Interval{0, 3}, Interval{}});
  CHECK(boundary_cutoff_jet({0.0, 0.0}, l).value == 0.0);
  CHECK(boundary_cutoff_jet({1.5, 0.0}, l).value == doctest::Approx(1.0));
}

TEST_CASE("psi vanishes on its lines with unit one-sided slopes") {
  CHECK(testkit::psi_slope_deviation() <= 1e-4);
  const InterfaceLines lines{1, {0.0}};
  CHECK(jump_adf_jet({0.3, 0.25}, lines, 2).value == doctest::Approx(0.25));
  CHECK_THROWS(jump_adf_jet({0.3, 0.0}, lines, 2));
  CHECK(jump_adf_jet({0.3, 0.2}, InterfaceLines{0, {}}, 2).value == 1.0);
}

TEST_CASE("psi jets agree with finite differences") {
  testkit::Gen gen(8);
  const InterfaceLines lines{0, {-0.4, 0.3}};
  for (int k = 0; k < 30; ++k) {
    Point x{gen.uniform(-1, 1), gen.uniform(-1, 1)};
    if (std::abs(x[0] + 0.4) < 0.05 || std::abs(x[0] - 0.3) < 0.05) continue;
    CHECK(jet_fd_deviation([&](const Point& y) { return jump_adf_jet(y, lines, 2); }, x) < 1e-5);
  }
}

TEST_CASE("psi traces off the subset are smooth") {
  const InterfaceLines lines{0, {0.0}};
  const Interface horiz{1, 1, 0.5, Interval{-1, 1}, 0, 1};
  const TraceJet t = jump_adf_trace({0.25, 0.5}, lines, 2, horiz);
  CHECK(t.value == doctest::Approx(0.25));
  CHECK(t.grad_minus[1] == t.grad_plus[1]);
}

TEST_CASE("product rule on jets matches finite differences") {
  testkit::Gen gen(21);
  const Geometry g = Geometry::build_grid(2, {0.0}, {0.0}, {Interval{-1, 1}, Interval{-1, 1}});
  const InterfaceLines lines{1, {0.0}};
  for (int k = 0; k < 20; ++k) {
    const Point x{gen.uniform(-0.9, 0.9), gen.uniform(0.1, 0.9)};
    auto f = [&](const Point& y) { return boundary_cutoff_jet(y, g) * jump_adf_jet(y, lines, 2); };
    CHECK(jet_fd_deviation(f, x) < 1e-6);
  }
}

TEST_CASE("exclusion cutoffs switch off the network near vertices") {
  const Geometry g = Geometry::build_grid(2, {0.0}, {0.0}, {Interval{-1, 1}, Interval{-1, 1}});
  const CutoffConfig cc = CutoffConfig::defaults_for(g);
  CHECK(cc.delta1 > 0.0);
  CHECK(cc.delta2 > cc.delta1);
  CHECK(cc.delta2 < g.vertex_clearance());
  const CutoffLayout layout(g, cc, 4, 8);
  CHECK(layout.exclusion_jets({0.05, 0.05})[0].value == 0.0);
  CHECK(layout.exclusion_jets({0.6, 0.6})[0].value == 1.0);
  testkit::Gen gen(2);
  for (int k = 0; k < 20; ++k) {
    const double r = gen.uniform(cc.delta1 * 1.01, cc.delta2 * 0.99), th = gen.uniform(0, 6.28);
    const Point x{r * std::cos(th), r * std::sin(th)};
    CHECK(jet_fd_deviation([&](const Point& y) { return layout.exclusion_jets(y)[0]; }, x, 1e-5) < 1e-5);
  }
  CHECK_THROWS(CutoffLayout(g, CutoffConfig{0.3, 2.0}, 4, 8));
  CHECK_THROWS(CutoffLayout(g, CutoffConfig{0.3, 0.2}, 4, 8));
  CHECK_THROWS(CutoffLayout(g, cc, 4, 7));
}

TEST_CASE("layout assigns jump families and vertex blocks") {
  const Geometry g =
      Geometry::build_grid(2, {-1.0 / 3, 1.0 / 3}, {-1.0 / 3, 1.0 / 3}, {Interval{-1, 1}, Interval{-1, 1}});
  const CutoffLayout layout(g, CutoffConfig::defaults_for(g), 8, 16);
  CHECK(layout.jump_subset(0) == -1);
  CHECK(layout.jump_subset(8) == 0);
  CHECK(layout.jump_subset(8 + 8) == 1);
  CHECK(layout.exclusion_block(0) == 0);
  CHECK(layout.exclusion_block(7) == 3);
  CHECK(layout.exclusion_block(8) == 0);
  CHECK(layout.exclusion_block(8 + 7) == 3);
  CHECK(layout.exclusion_block(8 + 8) == 0);
}

TEST_CASE("apply_cutoffs multiplies raw jets by the factors") {
  const Geometry g = Geometry::build_grid(2, {0.0}, {0.0}, {Interval{-1, 1}, Interval{-1, 1}});
  const CutoffLayout layout(g, CutoffConfig::defaults_for(g), 1, 2);
  std::vector<ScalarJet> w(1, ScalarJet::constant(2.0)), v(2, ScalarJet::constant(1.0));
  const Point x{0.6, 0.7};
  const ComposedJets c = apply_cutoffs(w, v, x, layout);
  const double b = boundary_cutoff_jet(x, g).value;
  CHECK(c.w[0].value == doctest::Approx(2.0 * b));
  CHECK(c.v[0].value == doctest::Approx(b * 0.6));
  CHECK(c.v[1].value == doctest::Approx(b * 0.7));
  CHECK_THROWS(apply_cutoffs(v, v, x, layout));
}
