#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cuspfit/gradients.hpp"

namespace cuspfit {

struct AdamParams {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates for per-coordinate Adam updates.
struct OptimizerState {
  VecGrid m;
  VecGrid v;
  long t = 0;
  double delta = 1e-3;
  AdamParams params;

  static OptimizerState init(int rows, int cols, double delta = 1e-3,
                             AdamParams params = {});
};

/// One bias-corrected Adam update in place. Shapes of state, parameters
/// and gradient must agree; throws ArgumentError otherwise.
void adam_step(OptimizerState& state, VecGrid& parameters,
               const GradientGrid& gradient);

struct FitConfig {
  LossWeights weights = LossWeights::validation();
  double delta = 1e-3;
  int t_max = 10000;
  int sample_nu = 40;
  int sample_nv = 120;
  int record_every = 10;
  bool plain_descent = false;   // fixed-step descent without Adam, for ablation
  bool early_stop = false;
  double early_stop_rel_tol = 1e-8;
  int early_stop_patience = 100;
  int threads = 0;              // <= 0: all cores
  AdamParams adam;
};

struct HistoryEntry {
  int iteration = 0;
  LossBreakdown loss;
};

enum class FitStatus {
  completed,
  early_stopped,
  failed_degenerate,
};

struct FitResult {
  SplineSurface surface;
  std::vector<HistoryEntry> history;
  int iterations = 0;
  double wall_seconds = 0.0;
  FitStatus status = FitStatus::completed;
  int last_degenerate_count = 0;
  std::string message;
};

using ProgressFn = std::function<void(const HistoryEntry&)>;

/// Gradient-descent fit of the free control points starting from
/// `initial`. Records the initial loss and every record_every-th iteration
/// plus the final one. Degeneracies persisting more than 100 consecutive
/// iterations abort with the last degeneracy-free surface.
FitResult fit_single(const SplineSurface& initial, const PointCloud& cloud,
                     const FitConfig& config, const ProgressFn& progress = {});

}  // namespace cuspfit
