#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "lsreconn/reference_solvers.hpp"
#include "lsreconn/run_config.hpp"
#include "lsreconn/trainer.hpp"

namespace lsreconn {

/// Shortest round-trip text with 17 significant digits.
std::string format_double(double v);

void write_losses_csv(const std::string& path, const std::vector<EpochResult>& history);

struct ErrorRow {
  int id = 0;
  std::vector<double> p;
  ErrorPair before;
  ErrorPair after;
};

void write_errors_csv(const std::string& path, const std::vector<ErrorRow>& rows);

struct Quantiles {
  double min = 0.0, p25 = 0.0, median = 0.0, p75 = 0.0, max = 0.0;
};

/// Linear-interpolation quantiles of a non-empty sample.
Quantiles quantiles(std::vector<double> values);

nlohmann::json summary_json(const std::vector<ErrorRow>& rows);

/// Relative L2 errors of one trained basis against the reference solution of
/// the configured problem (closed form in 1D, FEM in 2D with r < delta1 masked).
class ErrorEvaluator {
 public:
  ErrorEvaluator(const Problem& problem, const ReferenceConfig& reference);

  const QuadratureSet& grid() const { return grid_; }
  const std::vector<bool>& mask() const { return mask_; }

  struct Reference {
    Eigen::VectorXd value;
    Eigen::MatrixXd flux;
  };
  Reference reference(std::span<const double> p) const;
  ErrorPair errors(const SolutionEvaluator& solver, std::span<const double> p, const Reference& ref,
                   EigenCache* cache = nullptr) const;

 private:
  const Problem* problem_;
  ReferenceConfig reference_;
  QuadratureSet grid_;
  std::vector<bool> mask_;
};

/// Before/after errors for `n` fresh parameter draws.
std::vector<ErrorRow> error_report(const Problem& problem, const ReferenceConfig& reference,
                                   const MlpParams& untrained, const MlpParams& trained, int n,
                                   std::uint64_t seed);

}  // namespace lsreconn
