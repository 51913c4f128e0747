#include <doctest.h>

#include <cmath>

#include "lsreconn/basis_net.hpp"
#include "testkit.hpp"

using namespace lsreconn;

TEST_CASE("parameter count and widths") {
  NetConfig c;
  c.input_dim = 1;
  c.hidden = {10, 10, 10};
  c.n1 = 10;
  c.n2 = 40;
  CHECK(c.param_count() == (1 * 10 + 10) + (10 * 10 + 10) * 2 + (10 * 50 + 50));
  CHECK(init_params(c, 1).flat.size() == static_cast<Eigen::Index>(c.param_count()));
  c.hidden = {10, 0};
  CHECK_THROWS(c.validate());
  c.hidden = {4};
  c.n2 = 0;
  CHECK_THROWS(c.validate());
}

TEST_CASE("initialisation is seeded") {
  NetConfig c;
  const MlpParams a = init_params(c, 42), b = init_params(c, 42), d = init_params(c, 43);
  CHECK(a.flat == b.flat);
  CHECK(a.flat != d.flat);
}

TEST_CASE("network jets agree with finite differences") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto d = testkit::network_jet_deviation(seed);
    CHECK(d.grad <= 1e-5);
    CHECK(d.laplacian <= 1e-4);
  }
}

TEST_CASE("1D jets carry no second component") {
  NetConfig c;
  c.input_dim = 1;
  c.hidden = {5};
  c.n1 = 2;
  c.n2 = 2;
  const MlpParams p = init_params(c, 9);
  const std::vector<Point> x = {{0.3, 7.0}, {1.1, -2.0}};
  const JetBatch j = forward_jets(p, x);
  CHECK(j.grad[1].cwiseAbs().maxCoeff() == 0.0);
  // The ignored coordinate has no effect.
  const std::vector<Point> y = {{0.3, 0.0}, {1.1, 0.0}};
  CHECK(forward_jets(p, y).value == j.value);
}

TEST_CASE("reverse pass matches directional differences of the jets") {
  testkit::Gen gen(12);
  NetConfig c;
  c.input_dim = 2;
  c.hidden = {6, 5};
  c.n1 = 3;
  c.n2 = 2;
  const MlpParams p = init_params(c, 4);
  std::vector<Point> x;
  for (int k = 0; k < 6; ++k) x.push_back({gen.uniform(-1, 1), gen.uniform(-1, 1)});
  ForwardTape tape;
  const JetBatch j = forward_jets(p, x, &tape);
  JetBatch adj = JetBatch::zeros(2, j.points(), j.outputs());
  adj.value = gen.matrix(j.points(), j.outputs());
  adj.grad[0] = gen.matrix(j.points(), j.outputs());
  adj.grad[1] = gen.matrix(j.points(), j.outputs());
  adj.laplacian = gen.matrix(j.points(), j.outputs());
  const Eigen::VectorXd g = backward_jets(p, tape, adj);
  auto functional = [&](const MlpParams& q) {
    const JetBatch f = forward_jets(q, x);
    return adj.value.cwiseProduct(f.value).sum() + adj.grad[0].cwiseProduct(f.grad[0]).sum() +
           adj.grad[1].cwiseProduct(f.grad[1]).sum() + adj.laplacian.cwiseProduct(f.laplacian).sum();
  };
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::VectorXd dir = gen.matrix(p.flat.size(), 1);
    MlpParams a = p, b = p;
    const double h = 1e-6;
    a.flat += h * dir;
    b.flat -= h * dir;
    const double fd = (functional(a) - functional(b)) / (2 * h);
    CHECK(std::abs(fd - g.dot(dir)) <= 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("Adam first step moves every coordinate by lr") {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
  AdamState s = AdamState::for_size(3);
  Eigen::VectorXd g(3);
  g << 2.0, -0.5, 1e-3;
  adam_step(x, s, g, 0.1);
  CHECK(x[0] == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(x[1] == doctest::Approx(0.1).epsilon(1e-6));
  CHECK(x[2] == doctest::Approx(-0.1).epsilon(1e-4));
  CHECK(s.step == 1);
}

TEST_CASE("Adam minimises a quadratic") {
  Eigen::VectorXd x(2);
  x << 3.0, -2.0;
  AdamState s = AdamState::for_size(2);
  for (int k = 0; k < 3000; ++k) adam_step(x, s, 2.0 * x, 0.01);
  CHECK(x.norm() < 1e-3);
}

TEST_CASE("linear learning-rate schedule") {
  CHECK(linear_lr(1e-2, 1e-4, 0, 1000) == doctest::Approx(1e-2));
  CHECK(linear_lr(1e-2, 1e-4, 1000, 1000) == doctest::Approx(1e-4));
  CHECK(linear_lr(1e-2, 1e-4, 500, 1000) == doctest::Approx(0.5 * (1e-2 + 1e-4)));
}
