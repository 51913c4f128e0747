#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "lsreconn/commands.hpp"
#include "lsreconn/reporting.hpp"
#include "lsreconn/run_config.hpp"
#include "lsreconn/selfcheck.hpp"

using namespace lsreconn;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return (std::filesystem::temp_directory_path() / name).string(); }

json base_1d() {
  return json::parse(R"({
    "geometry": {"dim": 1, "bounds": [[0, "pi"]], "cuts_x": ["pi/5", "2*pi/5", "3*pi/5", "4*pi/5"]},
    "net": {"hidden": [10, 10, 10], "n1": 10, "n2": 40},
    "sampler": {"n_params": 500, "n_interior": 100, "n_interface": 1},
    "train": {"iterations": 1000},
    "reference": {"rhs": "sin1d"}
  })");
}

}  // namespace

TEST_CASE("quantiles interpolate linearly") {
  const Quantiles q = quantiles({5, 1, 4, 2, 3});
  CHECK(q.min == 1.0);
  CHECK(q.p25 == 2.0);
  CHECK(q.median == 3.0);
  CHECK(q.p75 == 4.0);
  CHECK(q.max == 5.0);
  CHECK(quantiles({1, 2}).median == 1.5);
  CHECK(quantiles({7}).p75 == 7.0);
  CHECK_THROWS(quantiles({}));
}

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, std::numbers::pi}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("loss CSV layout") {
  std::vector<EpochResult> h(2);
  h[0].iteration = 0;
  h[0].train_loss = 1.5;
  h[0].val_loss = 2.0;
  h[1].iteration = 1;
  h[1].train_loss = 0.25;
  const std::string path = tmp("lsreconn_losses_test.csv");
  write_losses_csv(path, h);
  CHECK(slurp(path) == "iter,train_loss,val_loss\r\n0,1.5,2\r\n1,0.25,\r\n");
  std::remove(path.c_str());
}

TEST_CASE("error CSV and summary layout") {
  std::vector<ErrorRow> rows;
  for (int i = 0; i < 3; ++i) {
    ErrorRow r;
    r.id = i;
    r.p = {1.0 + i, 2.0};
    r.before = {100.0 + i, 90.0};
    r.after = {1.0 + i, 2.0 + i};
    rows.push_back(r);
  }
  const std::string path = tmp("lsreconn_errors_test.csv");
  write_errors_csv(path, rows);
  const std::string text = slurp(path);
  CHECK(text.rfind("id,p1,p2,sol_err_before_pct,flux_err_before_pct,sol_err_after_pct,flux_err_after_pct\r\n", 0) == 0);
  CHECK(text.find("\r\n1,2,2,101,90,2,3\r\n") != std::string::npos);
  std::remove(path.c_str());
  const json s = summary_json(rows);
  CHECK(s["count"] == 3);
  CHECK(s["sol_err_after_pct"]["median"] == 2.0);
  CHECK(s["flux_err_after_pct"]["max"] == 4.0);
  CHECK(s["sol_err_before_pct"]["min"] == 100.0);
}

TEST_CASE("configuration parsing") {
  const RunConfig c = RunConfig::from_json(base_1d());
  CHECK(c.dim == 1);
  REQUIRE(c.cuts_x.size() == 4);
  CHECK(c.cuts_x[1] == doctest::Approx(2 * std::numbers::pi / 5).epsilon(1e-15));
  CHECK(c.bounds[0].hi == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(c.train.iterations == 1000);
  CHECK(c.train.n3 == 1);
  CHECK(c.train.selection.max_exponent == 1.0);
  CHECK_FALSE(c.train.selection.include_constant);
  CHECK(c.document["eigen"]["n3"] == 1);
  const Problem p = c.problem();
  CHECK(p.geometry.subdomain_count() == 5);

  json wide = base_1d();
  wide["eigen"] = {{"n3", 16}, {"max_exponent", 3}, {"include_constant", true}};
  const RunConfig w = RunConfig::from_json(wide);
  CHECK(w.train.n3 == 16);
  CHECK(w.train.selection.max_exponent == 3.0);
  CHECK(w.train.selection.include_constant);
}

TEST_CASE("configuration schema errors") {
  json missing = base_1d();
  missing.erase("net");
  CHECK_THROWS(RunConfig::from_json(missing));
  json unknown = base_1d();
  unknown["train"]["iteratons"] = 5;
  CHECK_THROWS(RunConfig::from_json(unknown));
  json flag = base_1d();
  flag["eigen"] = {{"include_constant", 1}};
  CHECK_THROWS(RunConfig::from_json(flag));
  json neg = base_1d();
  neg["sampler"]["n_params"] = -1;
  CHECK_THROWS(RunConfig::from_json(neg));
  CHECK_THROWS(RunConfig::from_file("/nonexistent/config.json"));
}

TEST_CASE("number expressions") {
  const double pi = std::numbers::pi;
  CHECK(parse_number(json(2.5), "x") == 2.5);
  CHECK(parse_number(json("pi"), "x") == doctest::Approx(pi));
  CHECK(parse_number(json("-pi/2"), "x") == doctest::Approx(-pi / 2));
  CHECK(parse_number(json("2*pi/5"), "x") == doctest::Approx(2 * pi / 5));
  CHECK_THROWS(parse_number(json("pie"), "x"));
  CHECK_THROWS(parse_number(json(true), "x"));
}

TEST_CASE("parameter lists") {
  const auto v = parse_param_list("2,10,7,1", 4);
  CHECK(v == std::vector<double>{2, 10, 7, 1});
  CHECK_THROWS(parse_param_list("2,10,7", 4));
  CHECK_THROWS(parse_param_list("2,x,7,1", 4));
  CHECK_THROWS(parse_param_list("2,-1,7,1", 4));
  CHECK_THROWS(parse_param_list("2,1e,7,1", 4));
}

TEST_CASE("selfcheck passes") {
  for (const auto& c : run_selfcheck()) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.passed);
  }
}
