#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsreconn/reporting.hpp"
#include "lsreconn/run_config.hpp"
#include "lsreconn/trainer.hpp"

namespace lsreconn {

/// Trains the configured problem and writes config.json, losses.csv,
/// checkpoint.bin (and periodic checkpoint_<iter>.bin) into `out_dir`.
/// With `resume`, continues from out_dir/checkpoint.bin when present.
struct TrainOutcome {
  TrainState state;
  std::vector<EpochResult> history;
};
TrainOutcome cmd_train(const RunConfig& config, const std::string& out_dir, bool resume = false,
                       std::ostream* log = nullptr);

/// A checkpoint together with the configuration embedded in it.
struct LoadedRun {
  RunConfig config;
  TrainState state;
};
LoadedRun load_run(const std::string& checkpoint_path);

/// errors.csv and summary.json for `n_params` fresh parameters (0: the
/// configured report_params) written into `out_dir`. Returns the summary.
nlohmann::json cmd_report(const std::string& checkpoint_path, int n_params, const std::string& out_dir);

/// Parses "2,10,7,1" into one value per subdomain.
std::vector<double> parse_param_list(const std::string& text, int expected);

/// FEM nodal solution as x,y,u,flux_x,flux_y rows (flux from the element
/// containing the node on its upper-right side, clamped at the boundary).
void cmd_fem(const RunConfig& config, const std::vector<double>& p, int n, const std::string& out_csv);

/// eigen.csv for every singular vertex of the configured geometry.
void cmd_eigen(const RunConfig& config, const std::vector<double>& p, const std::string& out_csv);

/// Single-parameter solve on the midpoint grid: x,y,u,flux_x,flux_y rows.
void cmd_solve(const std::string& checkpoint_path, const std::vector<double>& p, int n, const std::string& out_csv);

}  // namespace lsreconn
