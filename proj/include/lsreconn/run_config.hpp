#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "lsreconn/trainer.hpp"

namespace lsreconn {

/// Evaluation and reference settings.
struct ReferenceConfig {
  std::string rhs = "sin1d";
  int fem_n = 100;          ///< FEM grid per axis (2D)
  int eval_n = 1000;        ///< midpoint grid per axis (1D: total cells)
  int eval_n_interface = 1; ///< midpoint points per interface segment
  int report_params = 1000;
  std::uint64_t report_seed = 99;
};

/// Parsed and validated run configuration.
struct RunConfig {
  nlohmann::json document;  ///< resolved document (defaults filled in)
  int dim = 1;
  std::array<Interval, 2> bounds{};
  std::vector<double> cuts_x;
  std::vector<double> cuts_y;
  NetConfig net;
  std::optional<CutoffConfig> cutoffs;
  SamplerConfig sampler;
  TrainConfig train;
  Seeds seeds;
  ReferenceConfig reference;
  std::string output_dir;
  bool deterministic = true;

  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig from_file(const std::string& path);

  Problem problem() const;
};

/// Parses a number or an expression like "pi", "-pi/2", "2*pi/5".
double parse_number(const nlohmann::json& value, const std::string& where);

}  // namespace lsreconn
