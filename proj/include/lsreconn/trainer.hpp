#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lsreconn/basis_net.hpp"
#include "lsreconn/composed_basis.hpp"
#include "lsreconn/cutoffs.hpp"
#include "lsreconn/geometry.hpp"
#include "lsreconn/ls_assembly.hpp"
#include "lsreconn/rhs.hpp"
#include "lsreconn/sampling.hpp"
#include "lsreconn/singular_basis.hpp"

namespace lsreconn {

struct TrainConfig {
  long iterations = 1000;
  double lr0 = 1e-2;
  double lr_end = 1e-4;
  double theta = 1.0;
  int n3 = 1;
  SelectionRule selection;  ///< default: exponents strictly inside (0, 1)
  double ridge = 1e-10;      ///< relative ridge: ridge * trace(B^T B) / ncols
  int validation_every = 10;
  int checkpoint_every = 0;  ///< 0: final checkpoint only

  void validate() const;
};

struct Seeds {
  std::uint64_t params = 1;
  std::uint64_t interior = 2;
  std::uint64_t interface = 3;
  std::uint64_t init = 4;
  std::uint64_t validation = 5;
};

/// Everything needed to train and evaluate one parametric problem.
struct Problem {
  Geometry geometry;
  CutoffLayout layout;
  NetConfig net;
  SamplerConfig sampler;
  RhsSpec rhs;
  TrainConfig train;
  Seeds seeds;

  static Problem make(Geometry geometry, std::optional<CutoffConfig> cutoffs, NetConfig net, SamplerConfig sampler,
                      RhsSpec rhs, TrainConfig train, Seeds seeds);
};

struct TrainState {
  MlpParams params;
  AdamState adam;
  long iteration = 0;
  std::mt19937_64 rng_params;
  std::mt19937_64 rng_interior;
  std::mt19937_64 rng_interface;
  Eigen::VectorXd best_params;
  double best_val = -1.0;  ///< negative until the first validation
  long best_iteration = -1;
};

TrainState init_state(const Problem& problem);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> per_param;  ///< ||B y - l||^2 for every sample
  Eigen::VectorXd grad;           ///< empty unless requested
};

/// Mean minimum residual over the parameter batch and, optionally, its gradient
/// with respect to the network parameters (LS coefficients held fixed).
LossGradient loss_and_param_gradient(const MlpParams& params, const Problem& problem, const QuadratureSet& q,
                                     const std::vector<ParameterSample>& batch, bool with_gradient,
                                     EigenCache* cache = nullptr);

/// Frozen validation data.
struct Validation {
  QuadratureSet quadrature;
  std::vector<ParameterSample> params;
  EigenCache cache;
};

void init_validation(Validation& val, const Problem& problem);

struct EpochResult {
  long iteration = 0;
  double train_loss = 0.0;
  std::optional<double> val_loss;
  double lr = 0.0;
  double seconds = 0.0;
};

EpochResult run_epoch(TrainState& state, const Problem& problem, Validation* validation);

/// Solutions of the trained basis on an evaluation grid for many parameters.
class SolutionEvaluator {
 public:
  SolutionEvaluator(const MlpParams& params, const Problem& problem, const QuadratureSet& grid);

  struct Result {
    CoefficientVector coeffs;
    Eigen::VectorXd value;  ///< at grid interior points
    Eigen::MatrixXd flux;   ///< p grad u, points x 2
    double residual2 = 0.0;
  };
  Result solve(std::span<const double> p, EigenCache* cache = nullptr) const;
  const QuadratureSet& grid() const { return grid_; }

 private:
  const Problem* problem_;
  QuadratureSet grid_;
  EpochCache cache_;
  GramCache gram_;
  BasisFields nn_fields_;
};

SolutionEvaluator::Result final_solve(const MlpParams& params, const Problem& problem, std::span<const double> p,
                                      const QuadratureSet& grid);

void save_checkpoint(const std::string& path, const TrainState& state, const std::string& config_json);
/// Restores the state; returns the embedded config JSON.
std::string load_checkpoint(const std::string& path, TrainState& state);

}  // namespace lsreconn
