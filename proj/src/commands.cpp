#include "lsreconn/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lsreconn/angular_eigensolver.hpp"
#include "lsreconn/reference_solvers.hpp"

namespace lsreconn {
namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("missing output path");
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path);
  return os;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  os << text;
}

}  // namespace

TrainOutcome cmd_train(const RunConfig& config, const std::string& out_dir, bool resume, std::ostream* log) {
  if (out_dir.empty()) throw std::invalid_argument("train: missing output directory");
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const Problem problem = config.problem();
  const std::string snapshot = config.document.dump(2);
  write_text(dir / "config.json", snapshot + "\n");

  TrainOutcome out;
  out.state = init_state(problem);
  const fs::path ckpt = dir / "checkpoint.bin";
  if (resume && fs::exists(ckpt)) {
    load_checkpoint(ckpt.string(), out.state);
    if (out.state.params.flat.size() != static_cast<Eigen::Index>(problem.net.param_count())) {
      throw std::runtime_error("checkpoint does not match the configured network");
    }
    // Earlier rows are kept; later rows are regenerated.
    std::ifstream prev(dir / "losses.csv");
    std::string line;
    std::getline(prev, line);
    while (std::getline(prev, line)) {
      std::istringstream row(line);
      std::string it, tr, va;
      std::getline(row, it, ',');
      std::getline(row, tr, ',');
      std::getline(row, va, '\r');
      EpochResult e;
      e.iteration = std::stol(it);
      if (e.iteration >= out.state.iteration) break;
      e.train_loss = std::stod(tr);
      if (!va.empty()) e.val_loss = std::stod(va);
      out.history.push_back(e);
    }
  }

  Validation val;
  init_validation(val, problem);
  const long total = problem.train.iterations;
  while (out.state.iteration < total) {
    out.history.push_back(run_epoch(out.state, problem, &val));
    const EpochResult& e = out.history.back();
    if (log && (e.iteration % 50 == 0 || e.iteration + 1 == total)) {
      *log << "iter " << e.iteration << " loss " << format_double(e.train_loss);
      if (e.val_loss) *log << " val " << format_double(*e.val_loss);
      *log << " lr " << e.lr << " (" << e.seconds << " s)\n" << std::flush;
    }
    const int every = problem.train.checkpoint_every;
    if (every > 0 && out.state.iteration % every == 0 && out.state.iteration < total) {
      save_checkpoint((dir / ("checkpoint_" + std::to_string(out.state.iteration) + ".bin")).string(), out.state,
                      snapshot);
      save_checkpoint(ckpt.string(), out.state, snapshot);
      write_losses_csv((dir / "losses.csv").string(), out.history);
    }
  }
  write_losses_csv((dir / "losses.csv").string(), out.history);
  save_checkpoint(ckpt.string(), out.state, snapshot);
  return out;
}

LoadedRun load_run(const std::string& checkpoint_path) {
  if (checkpoint_path.empty()) throw std::invalid_argument("empty checkpoint path");
  TrainState probe;
  const std::string text = load_checkpoint(checkpoint_path, probe);
  LoadedRun run{RunConfig::from_json(nlohmann::json::parse(text)), {}};
  run.state = init_state(run.config.problem());
  load_checkpoint(checkpoint_path, run.state);
  if (run.state.params.flat.size() != static_cast<Eigen::Index>(run.state.params.config.param_count())) {
    throw std::runtime_error("checkpoint parameters do not match the embedded network config");
  }
  return run;
}

nlohmann::json cmd_report(const std::string& checkpoint_path, int n_params, const std::string& out_dir) {
  const LoadedRun run = load_run(checkpoint_path);
  const Problem problem = run.config.problem();
  const int n = n_params > 0 ? n_params : run.config.reference.report_params;
  const MlpParams untrained = init_params(problem.net, problem.seeds.init);
  const auto rows = error_report(problem, run.config.reference, untrained, run.state.params, n,
                                 run.config.reference.report_seed);
  const fs::path dir = out_dir.empty() ? fs::path(checkpoint_path).parent_path() : fs::path(out_dir);
  if (!dir.empty()) fs::create_directories(dir);
  write_errors_csv((dir / "errors.csv").string(), rows);
  nlohmann::json summary = summary_json(rows);
  summary["iteration"] = run.state.iteration;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return summary;
}

std::vector<double> parse_param_list(const std::string& text, int expected) {
  std::vector<double> out;
  std::istringstream is(text);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("--param: cannot parse '" + tok + "'");
    }
    if (tok.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("--param: cannot parse '" + tok + "'");
    }
    if (!(v > 0.0)) throw std::invalid_argument("--param: values must be positive");
    out.push_back(v);
  }
  if (static_cast<int>(out.size()) != expected) {
    throw std::invalid_argument("--param: expected " + std::to_string(expected) + " values, got " +
                                std::to_string(out.size()));
  }
  return out;
}

void cmd_fem(const RunConfig& config, const std::vector<double>& p, int n, const std::string& out_csv) {
  const Problem problem = config.problem();
  const FemSolution fem = fem_solve_2d(problem.geometry, p, problem.rhs, n > 0 ? n : config.reference.fem_n);
  auto os = open_csv(out_csv);
  os << "x,y,u,flux_x,flux_y\r\n";
  const auto& b = problem.geometry.bounds();
  const int m = fem.n();
  for (int j = 0; j <= m; ++j) {
    for (int i = 0; i <= m; ++i) {
      const Point x{b[0].lo + b[0].length() * i / m, b[1].lo + b[1].length() * j / m};
      const auto f = fem.flux(x);
      os << format_double(x[0]) << ',' << format_double(x[1]) << ',' << format_double(fem.nodal()[j * (m + 1) + i])
         << ',' << format_double(f[0]) << ',' << format_double(f[1]) << "\r\n";
    }
  }
}

void cmd_eigen(const RunConfig& config, const std::vector<double>& p, const std::string& out_csv) {
  const Problem problem = config.problem();
  const auto& verts = problem.geometry.singular_vertices();
  if (verts.empty()) throw std::invalid_argument("eigen: geometry has no singular vertices");
  auto os = open_csv(out_csv);
  os << "vertex_id,pair_index,exponent,residual";
  for (int a = 0; a < 360; ++a) os << ",mu_" << a;
  os << "\r\n";
  for (std::size_t v = 0; v < verts.size(); ++v) {
    const auto pairs = solve_eigenpairs(assemble_eigensystem(problem.geometry.angular_trace(p, static_cast<int>(v))));
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      os << v << ',' << k << ',' << format_double(pairs[k].exponent) << ',' << format_double(pairs[k].residual);
      for (int a = 0; a < 360; ++a) {
        os << ',' << format_double(angular_eval(pairs[k], 2.0 * std::numbers::pi * a / 360.0)[0]);
      }
      os << "\r\n";
    }
  }
}

void cmd_solve(const std::string& checkpoint_path, const std::vector<double>& p, int n, const std::string& out_csv) {
  const LoadedRun run = load_run(checkpoint_path);
  const Problem problem = run.config.problem();
  const QuadratureSet grid = midpoint_grid(problem.geometry, n > 0 ? n : run.config.reference.eval_n,
                                           run.config.reference.eval_n_interface);
  const auto res = final_solve(run.state.params, problem, p, grid);
  auto os = open_csv(out_csv);
  os << "x,y,u,flux_x,flux_y\r\n";
  for (std::size_t i = 0; i < grid.J1(); ++i) {
    os << format_double(grid.interior[i][0]) << ',' << format_double(grid.interior[i][1]) << ','
       << format_double(res.value[i]) << ',' << format_double(res.flux(i, 0)) << ',' << format_double(res.flux(i, 1))
       << "\r\n";
  }
}

}  // namespace lsreconn
