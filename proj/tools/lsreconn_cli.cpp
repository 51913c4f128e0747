#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lsreconn/commands.hpp"
#include "lsreconn/parallel.hpp"
#include "lsreconn/selfcheck.hpp"

using namespace lsreconn;

int main(int argc, char** argv) {
  CLI::App app{"Least-squares regularity-conforming neural bases for parametric transmission problems"};
  app.require_subcommand(1);

  std::string config, out, param, checkpoint;
  int n = 0;
  int threads = 0;
  bool deterministic = false;
  bool resume = false;

  auto* train = app.add_subcommand("train", "train a basis and write the run directory");
  train->add_option("--config", config, "run configuration JSON")->required()->check(CLI::ExistingFile);
  train->add_option("--out", out, "run directory")->required();
  train->add_flag("--resume", resume, "continue from the run directory's checkpoint");

  auto* report = app.add_subcommand("report", "error distribution of a checkpoint");
  report->add_option("--checkpoint", checkpoint, "checkpoint file")->required();
  report->add_option("--n", n, "number of fresh parameters (default: config report_params)");
  report->add_option("--out", out, "output directory (default: checkpoint directory)");

  auto* fem = app.add_subcommand("fem", "bilinear FEM reference solution");
  fem->add_option("--config", config)->required()->check(CLI::ExistingFile);
  fem->add_option("--param", param, "comma-separated p per subdomain")->required();
  fem->add_option("--n", n, "elements per axis");
  fem->add_option("--out", out, "CSV path")->required();

  auto* eigen = app.add_subcommand("eigen", "angular eigenpairs at every singular vertex");
  eigen->add_option("--config", config)->required()->check(CLI::ExistingFile);
  eigen->add_option("--param", param)->required();
  eigen->add_option("--out", out, "CSV path")->required();

  auto* solve = app.add_subcommand("solve", "single-parameter solve with a trained basis");
  solve->add_option("--checkpoint", checkpoint)->required();
  solve->add_option("--param", param)->required();
  solve->add_option("--n", n, "midpoint grid per axis");
  solve->add_option("--out", out, "CSV path")->required();

  auto* selfcheck = app.add_subcommand("selfcheck", "internal consistency checks");

  for (auto* sub : {train, report, fem, eigen, solve, selfcheck}) {
    sub->add_option("--threads", threads, "worker threads (overrides LSRECONN_THREADS)");
    sub->add_flag("--deterministic", deterministic, "fixed-order reductions");
  }

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) set_thread_count(threads);

  try {
    if (*train) {
      const RunConfig rc = RunConfig::from_file(config);
      const auto outcome = cmd_train(rc, out, resume, &std::cerr);
      const auto summary = cmd_report(out + "/checkpoint.bin", 0, out);
      std::cout << summary.dump(2) << "\n";
      (void)outcome;
    } else if (*report) {
      std::cout << cmd_report(checkpoint, n, out).dump(2) << "\n";
    } else if (*fem) {
      const RunConfig rc = RunConfig::from_file(config);
      cmd_fem(rc, parse_param_list(param, rc.problem().geometry.subdomain_count()), n, out);
    } else if (*eigen) {
      const RunConfig rc = RunConfig::from_file(config);
      cmd_eigen(rc, parse_param_list(param, rc.problem().geometry.subdomain_count()), out);
    } else if (*solve) {
      const LoadedRun run = load_run(checkpoint);
      cmd_solve(checkpoint, parse_param_list(param, run.config.problem().geometry.subdomain_count()), n, out);
    } else if (*selfcheck) {
      bool ok = true;
      for (const auto& c : run_selfcheck()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
        ok = ok && c.passed;
      }
      return ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
