#include "lsreconn/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "lsreconn/parallel.hpp"

namespace lsreconn {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

}  // namespace

void write_losses_csv(const std::string& path, const std::vector<EpochResult>& history) {
  auto os = open_out(path);
  os << "iter,train_loss,val_loss\r\n";
  for (const auto& e : history) {
    os << e.iteration << ',' << format_double(e.train_loss) << ','
       << (e.val_loss ? format_double(*e.val_loss) : std::string()) << "\r\n";
  }
}

void write_errors_csv(const std::string& path, const std::vector<ErrorRow>& rows) {
  auto os = open_out(path);
  const std::size_t np = rows.empty() ? 0 : rows.front().p.size();
  os << "id";
  for (std::size_t i = 0; i < np; ++i) os << ",p" << (i + 1);
  os << ",sol_err_before_pct,flux_err_before_pct,sol_err_after_pct,flux_err_after_pct\r\n";
  for (const auto& r : rows) {
    os << r.id;
    for (double p : r.p) os << ',' << format_double(p);
    os << ',' << format_double(r.before.solution_pct) << ',' << format_double(r.before.flux_pct) << ','
       << format_double(r.after.solution_pct) << ',' << format_double(r.after.flux_pct) << "\r\n";
  }
}

Quantiles quantiles(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("quantiles of an empty sample");
  std::sort(v.begin(), v.end());
  auto at = [&v](double q) {
    const double pos = q * (v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - lo) * (v[hi] - v[lo]);
  };
  return {v.front(), at(0.25), at(0.5), at(0.75), v.back()};
}

nlohmann::json summary_json(const std::vector<ErrorRow>& rows) {
  auto column = [&rows](auto get) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(get(r));
    const Quantiles q = quantiles(v);
    return nlohmann::json{{"min", q.min}, {"p25", q.p25}, {"median", q.median}, {"p75", q.p75}, {"max", q.max}};
  };
  nlohmann::json j;
  j["count"] = rows.size();
  j["sol_err_before_pct"] = column([](const ErrorRow& r) { return r.before.solution_pct; });
  j["flux_err_before_pct"] = column([](const ErrorRow& r) { return r.before.flux_pct; });
  j["sol_err_after_pct"] = column([](const ErrorRow& r) { return r.after.solution_pct; });
  j["flux_err_after_pct"] = column([](const ErrorRow& r) { return r.after.flux_pct; });
  return j;
}

ErrorEvaluator::ErrorEvaluator(const Problem& problem, const ReferenceConfig& reference)
    : problem_(&problem), reference_(reference) {
  grid_ = midpoint_grid(problem.geometry, reference.eval_n, reference.eval_n_interface);
  mask_.assign(grid_.J1(), true);
  const auto& verts = problem.geometry.singular_vertices();
  for (std::size_t i = 0; i < grid_.J1(); ++i) {
    for (const Point& v : verts) {
      if (std::hypot(grid_.interior[i][0] - v[0], grid_.interior[i][1] - v[1]) < problem.layout.config().delta1) {
        mask_[i] = false;
      }
    }
  }
}

ErrorEvaluator::Reference ErrorEvaluator::reference(std::span<const double> p) const {
  const Problem& pr = *problem_;
  const Eigen::Index np = static_cast<Eigen::Index>(grid_.J1());
  Reference ref;
  ref.value.resize(np);
  ref.flux = Eigen::MatrixXd::Zero(np, 2);
  if (pr.geometry.dim() == 1) {
    if (pr.rhs.tag != "sin1d") throw std::invalid_argument("no 1D reference solver for rhs '" + pr.rhs.tag + "'");
    for (Eigen::Index i = 0; i < np; ++i) {
      const auto u = exact_1d(pr.geometry, p, grid_.interior[i]);
      ref.value[i] = u[0];
      ref.flux(i, 0) = p[grid_.interior_subdomain[i]] * u[1];
    }
    return ref;
  }
  const FemSolution fem = fem_solve_2d(pr.geometry, p, pr.rhs, reference_.fem_n);
  for (Eigen::Index i = 0; i < np; ++i) {
    ref.value[i] = fem.value(grid_.interior[i]);
    const auto f = fem.flux(grid_.interior[i]);
    ref.flux(i, 0) = f[0];
    ref.flux(i, 1) = f[1];
  }
  return ref;
}

ErrorPair ErrorEvaluator::errors(const SolutionEvaluator& solver, std::span<const double> p, const Reference& ref,
                                 EigenCache* cache) const {
  const auto sol = solver.solve(p, cache);
  return relative_l2_errors(sol.value, ref.value, sol.flux, ref.flux, grid_.interior_weight, &mask_);
}

std::vector<ErrorRow> error_report(const Problem& problem, const ReferenceConfig& reference,
                                   const MlpParams& untrained, const MlpParams& trained, int n, std::uint64_t seed) {
  const ErrorEvaluator ev(problem, reference);
  const SolutionEvaluator before(untrained, problem, ev.grid());
  const SolutionEvaluator after(trained, problem, ev.grid());
  std::mt19937_64 rng(seed);
  const auto params = sample_parameters(problem.sampler, problem.geometry.subdomain_count(), n, rng);
  std::vector<ErrorRow> rows(n);
  parallel_for(n, [&](int k) {
    const auto& p = params[k].values;
    const auto ref = ev.reference(p);
    rows[k].id = k;
    rows[k].p = p;
    rows[k].before = ev.errors(before, p, ref);
    rows[k].after = ev.errors(after, p, ref);
  });
  return rows;
}

}  // namespace lsreconn
