#include "lsreconn/trainer.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lsreconn/parallel.hpp"

namespace lsreconn {
namespace {

struct SampleSolve {
  Eigen::VectorXd y;
  Eigen::MatrixXd sources;
};

std::vector<SampleSolve> solve_batch(const Problem& problem, const EpochCache& cache, const GramCache& gram,
                                     const std::vector<ParameterSample>& batch, EigenCache* eig_cache) {
  std::vector<SampleSolve> out(batch.size());
  parallel_for(static_cast<int>(batch.size()), [&](int k) {
    try {
      const auto& p = batch[k].values;
      SampleSolve& s = out[k];
      if (problem.geometry.singular_vertices().empty()) {
        s.sources = Eigen::MatrixXd(cache.J1(), 0);
      } else {
        const SingularBasis sb =
            SingularBasis::build(problem.geometry, problem.layout.config(), p, problem.train.n3, eig_cache,
                                 problem.train.selection);
        s.sources = singular_sources(cache, sb);
      }
      const NormalSystem ns = assemble_normal(gram, cache, p, s.sources, problem.train.theta);
      s.y = solve_normal_system(ns, relative_ridge(ns.A, problem.train.ridge)).y;
    } catch (const std::exception& e) {
      throw std::runtime_error("parameter sample " + std::to_string(k) + ": " + e.what());
    }
  });
  return out;
}

double rhs_factor(const EpochCache& cache, double p) { return cache.rhs_scales_with_p ? p : 1.0; }

}  // namespace

void TrainConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("train.iterations must be >= 1");
  if (!(lr_end > 0.0) || !(lr0 >= lr_end)) throw std::invalid_argument("train needs lr0 >= lr_end > 0");
  if (theta < 0.0) throw std::invalid_argument("train.theta must be >= 0");
  if (n3 < 0) throw std::invalid_argument("train.n3 must be >= 0");
  if (!(selection.max_exponent > 0.0)) throw std::invalid_argument("eigen.max_exponent must be positive");
  if (ridge < 0.0) throw std::invalid_argument("train.ridge must be >= 0");
  if (validation_every < 1) throw std::invalid_argument("train.validation_every must be >= 1");
}

Problem Problem::make(Geometry geometry, std::optional<CutoffConfig> cutoffs, NetConfig net, SamplerConfig sampler,
                      RhsSpec rhs, TrainConfig train, Seeds seeds) {
  net.validate();
  sampler.validate();
  train.validate();
  if (net.input_dim != geometry.dim()) throw std::invalid_argument("net input_dim must equal the geometry dimension");
  const CutoffConfig cfg = cutoffs ? *cutoffs : CutoffConfig::defaults_for(geometry);
  CutoffLayout layout(geometry, cfg, net.n1, net.n2);
  return Problem{std::move(geometry), std::move(layout), std::move(net), sampler, std::move(rhs), train, seeds};
}

TrainState init_state(const Problem& problem) {
  TrainState s;
  s.params = init_params(problem.net, problem.seeds.init);
  s.adam = AdamState::for_size(s.params.flat.size());
  s.rng_params.seed(problem.seeds.params);
  s.rng_interior.seed(problem.seeds.interior);
  s.rng_interface.seed(problem.seeds.interface);
  s.best_params = s.params.flat;
  return s;
}

LossGradient loss_and_param_gradient(const MlpParams& params, const Problem& problem, const QuadratureSet& q,
                                     const std::vector<ParameterSample>& batch, bool with_gradient,
                                     EigenCache* eig_cache) {
  if (batch.empty()) throw std::invalid_argument("empty parameter batch");
  const ComposedEvaluation eval = evaluate_composed(params, problem.layout, q, with_gradient);
  const EpochCache cache = build_epoch_cache(problem.geometry, eval.basis, q, problem.rhs);
  const GramCache gram = build_gram_cache(cache, problem.geometry, problem.layout.config());
  const std::vector<SampleSolve> solves = solve_batch(problem, cache, gram, batch, eig_cache);

  const int np = static_cast<int>(batch.size());
  const int n = cache.n_nn;
  const Eigen::Index j1 = cache.J1(), j2 = cache.J2();
  Eigen::MatrixXd ynn(n, np);
  for (int k = 0; k < np; ++k) ynn.col(k) = solves[k].y.head(n);
  const Eigen::MatrixXd lap_y = cache.laplacian * ynn;
  const Eigen::MatrixXd tp_y = cache.trace_plus * ynn;
  const Eigen::MatrixXd tm_y = cache.trace_minus * ynn;

  const double st = std::sqrt(problem.train.theta);
  const double scale = 2.0 / np;
  Eigen::MatrixXd r_int(j1, np), r_plus(j2, np), r_minus(j2, np);
  LossGradient out;
  out.per_param.resize(np);
  for (int k = 0; k < np; ++k) {
    const auto& p = batch[k].values;
    const SampleSolve& s = solves[k];
    Eigen::VectorXd src_y = Eigen::VectorXd::Zero(j1);
    if (s.sources.cols() > 0) src_y = s.sources * s.y.tail(s.sources.cols());
    double sum = 0.0;
    for (Eigen::Index j = 0; j < j1; ++j) {
      const double pj = p[cache.subdomain[j]];
      const double r = cache.sqrt_w[j] * (-pj * (lap_y(j, k) + src_y[j]) - rhs_factor(cache, pj) * cache.rhs[j]);
      sum += r * r;
      r_int(j, k) = scale * r * (-cache.sqrt_w[j] * pj);
    }
    for (Eigen::Index i = 0; i < j2; ++i) {
      const double pp = p[cache.plus_side[i]];
      const double pm = p[cache.minus_side[i]];
      const double f = st * cache.iface_sqrt_w[i];
      const double r = f * (pp * tp_y(i, k) - pm * tm_y(i, k));
      sum += r * r;
      r_plus(i, k) = scale * r * f * pp;
      r_minus(i, k) = -scale * r * f * pm;
    }
    out.per_param[k] = sum;
    out.loss += sum;
  }
  out.loss /= np;
  if (with_gradient) {
    const Eigen::MatrixXd lap_adj = r_int * ynn.transpose();
    const Eigen::MatrixXd plus_adj = r_plus * ynn.transpose();
    const Eigen::MatrixXd minus_adj = r_minus * ynn.transpose();
    out.grad = composed_backprop(params, eval, lap_adj, minus_adj, plus_adj);
  }
  return out;
}

void init_validation(Validation& val, const Problem& problem) {
  val.quadrature = validation_set(problem.geometry, problem.sampler.n_interior, problem.sampler.n_interface,
                                  problem.seeds.validation);
  std::mt19937_64 rng(problem.seeds.validation + 0x5bd1e995ULL);
  val.params = sample_parameters(problem.sampler, problem.geometry.subdomain_count(), problem.sampler.n_params, rng);
  val.cache.clear();
}

EpochResult run_epoch(TrainState& state, const Problem& problem, Validation* validation) {
  const auto t0 = std::chrono::steady_clock::now();
  EpochResult res;
  res.iteration = state.iteration;
  const auto batch =
      sample_parameters(problem.sampler, problem.geometry.subdomain_count(), problem.sampler.n_params, state.rng_params);
  const QuadratureSet q = sample_collocation(problem.geometry, problem.sampler.n_interior,
                                             problem.sampler.n_interface, state.rng_interior, state.rng_interface);
  LossGradient lg;
  try {
    lg = loss_and_param_gradient(state.params, problem, q, batch, true);
  } catch (const std::exception& e) {
    throw std::runtime_error("epoch " + std::to_string(state.iteration) + ": " + e.what());
  }
  res.train_loss = lg.loss;
  if (validation && state.iteration % problem.train.validation_every == 0) {
    const double v =
        loss_and_param_gradient(state.params, problem, validation->quadrature, validation->params, false,
                                &validation->cache)
            .loss;
    res.val_loss = v;
    if (state.best_val < 0.0 || v < state.best_val) {
      state.best_val = v;
      state.best_iteration = state.iteration;
      state.best_params = state.params.flat;
    }
  }
  res.lr = linear_lr(problem.train.lr0, problem.train.lr_end, state.iteration, problem.train.iterations);
  adam_step(state.params.flat, state.adam, lg.grad, res.lr);
  ++state.iteration;
  res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

SolutionEvaluator::SolutionEvaluator(const MlpParams& params, const Problem& problem, const QuadratureSet& grid)
    : problem_(&problem), grid_(grid) {
  const ComposedEvaluation eval = evaluate_composed(params, problem.layout, grid_, false);
  cache_ = build_epoch_cache(problem.geometry, eval.basis, grid_, problem.rhs);
  gram_ = build_gram_cache(cache_, problem.geometry, problem.layout.config());
  nn_fields_ = composed_fields(params, problem.layout, grid_.interior);
}

SolutionEvaluator::Result SolutionEvaluator::solve(std::span<const double> p, EigenCache* eig_cache) const {
  const Problem& pr = *problem_;
  Result res;
  SingularBasis sb;
  Eigen::MatrixXd sources(cache_.J1(), 0);
  if (!pr.geometry.singular_vertices().empty()) {
    sb = SingularBasis::build(pr.geometry, pr.layout.config(), p, pr.train.n3, eig_cache, pr.train.selection);
    sources = singular_sources(cache_, sb);
  }
  const NormalSystem ns = assemble_normal(gram_, cache_, p, sources, pr.train.theta);
  const LsSolution sol = solve_normal_system(ns, relative_ridge(ns.A, pr.train.ridge));
  res.coeffs.y = sol.y;
  res.coeffs.n1 = pr.net.n1;
  res.coeffs.n2 = pr.net.n2;
  res.coeffs.n_sing = static_cast<int>(sources.cols());
  res.residual2 = residual_vector(cache_, p, sources, pr.train.theta, sol.y).squaredNorm();
  const BasisFields fields =
      sb.size() > 0 ? append_singular_fields(nn_fields_, sb, grid_.interior) : nn_fields_;
  const SolutionFields u = evaluate_solution(res.coeffs, fields);
  res.value = u.value;
  res.flux.resize(u.grad.rows(), 2);
  for (Eigen::Index i = 0; i < u.grad.rows(); ++i) {
    const double pi = p[grid_.interior_subdomain[i]];
    res.flux(i, 0) = pi * u.grad(i, 0);
    res.flux(i, 1) = pi * u.grad(i, 1);
  }
  return res;
}

SolutionEvaluator::Result final_solve(const MlpParams& params, const Problem& problem, std::span<const double> p,
                                      const QuadratureSet& grid) {
  return SolutionEvaluator(params, problem, grid).solve(p);
}

namespace {

constexpr char kMagic[4] = {'L', 'S', 'R', 'C'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void put(std::ostream& os, const T& v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated checkpoint");
  return v;
}

void put_string(std::ostream& os, const std::string& s) {
  put<std::uint64_t>(os, s.size());
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  if (n > (1ULL << 32)) throw std::runtime_error("corrupt checkpoint string");
  std::string s(n, '\0');
  is.read(s.data(), static_cast<std::streamsize>(n));
  if (!is) throw std::runtime_error("truncated checkpoint");
  return s;
}

void put_vector(std::ostream& os, const Eigen::VectorXd& v) {
  put<std::uint64_t>(os, static_cast<std::uint64_t>(v.size()));
  os.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd get_vector(std::istream& is) {
  const auto n = get<std::uint64_t>(is);
  if (n > (1ULL << 32)) throw std::runtime_error("corrupt checkpoint vector");
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  is.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw std::runtime_error("truncated checkpoint");
  return v;
}

std::string rng_text(const std::mt19937_64& rng) {
  std::ostringstream os;
  os << rng;
  return os.str();
}

void rng_restore(std::mt19937_64& rng, const std::string& text) {
  std::istringstream is(text);
  is >> rng;
  if (!is) throw std::runtime_error("corrupt RNG state in checkpoint");
}

}  // namespace

void save_checkpoint(const std::string& path, const TrainState& s, const std::string& config_json) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path);
  os.write(kMagic, 4);
  put(os, kVersion);
  put_string(os, config_json);
  put_vector(os, s.params.flat);
  put_vector(os, s.adam.m);
  put_vector(os, s.adam.v);
  put<std::int64_t>(os, s.adam.step);
  put<std::int64_t>(os, s.iteration);
  put_string(os, rng_text(s.rng_params));
  put_string(os, rng_text(s.rng_interior));
  put_string(os, rng_text(s.rng_interface));
  put(os, s.best_val);
  put<std::int64_t>(os, s.best_iteration);
  put_vector(os, s.best_params);
  if (!os) throw std::runtime_error("failed writing checkpoint " + path);
}

std::string load_checkpoint(const std::string& path, TrainState& s) {
  if (path.empty()) throw std::invalid_argument("empty checkpoint path");
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error(path + " is not a checkpoint");
  const auto version = get<std::uint32_t>(is);
  if (version != kVersion) throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  std::string config = get_string(is);
  s.params.flat = get_vector(is);
  s.adam.m = get_vector(is);
  s.adam.v = get_vector(is);
  s.adam.step = get<std::int64_t>(is);
  s.iteration = get<std::int64_t>(is);
  rng_restore(s.rng_params, get_string(is));
  rng_restore(s.rng_interior, get_string(is));
  rng_restore(s.rng_interface, get_string(is));
  s.best_val = get<double>(is);
  s.best_iteration = get<std::int64_t>(is);
  s.best_params = get_vector(is);
  return config;
}

}  // namespace lsreconn
