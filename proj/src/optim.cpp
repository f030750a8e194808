#include "cuspfit/optim.hpp"

#include <chrono>
#include <cmath>

namespace cuspfit {

OptimizerState OptimizerState::init(int rows, int cols, double delta,
                                    AdamParams params) {
  OptimizerState s;
  s.m = VecGrid(rows, cols);
  s.v = VecGrid(rows, cols);
  s.delta = delta;
  s.params = params;
  return s;
}

void adam_step(OptimizerState& state, VecGrid& parameters,
               const GradientGrid& gradient) {
  if (!parameters.same_shape(gradient) || !parameters.same_shape(state.m) ||
      !parameters.same_shape(state.v))
    throw ArgumentError("adam_step: shape mismatch");

  const AdamParams& ap = state.params;
  state.t += 1;
  const double bc1 = 1.0 - std::pow(ap.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(ap.beta2, static_cast<double>(state.t));

  for (std::size_t i = 0; i < parameters.data.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      const double g = gradient.data[i][c];
      double& m = state.m.data[i][c];
      double& v = state.v.data[i][c];
      m = ap.beta1 * m + (1.0 - ap.beta1) * g;
      v = ap.beta2 * v + (1.0 - ap.beta2) * g * g;
      const double mh = m / bc1;
      const double vh = v / bc2;
      parameters.data[i][c] -= state.delta * mh / (std::sqrt(vh) + ap.epsilon);
    }
  }
}

FitResult fit_single(const SplineSurface& initial, const PointCloud& cloud,
                     const FitConfig& config, const ProgressFn& progress) {
  if (cloud.size() == 0) throw ArgumentError("empty point cloud");
  if (config.t_max < 1) throw ArgumentError("t_max must be >= 1");
  if (!(config.delta > 0.0)) throw ArgumentError("delta must be > 0");
  if (config.record_every < 1)
    throw ArgumentError("record_every must be >= 1");
  config.weights.validate();
  initial.validate();

  const auto t0 = std::chrono::steady_clock::now();

  FitResult out;
  out.surface = initial;
  const SampleGrid grid(out.surface, config.sample_nu, config.sample_nv);
  OptimizerState state = OptimizerState::init(
      out.surface.n_axial(), out.surface.n_circ_free(), config.delta,
      config.adam);

  auto record = [&](int iter, const LossBreakdown& b) {
    out.history.push_back({iter, b});
    if (progress) progress(out.history.back());
  };

  SplineSurface last_good = out.surface;
  bool have_good = false;
  int consecutive_degenerate = 0;
  int stall = 0;
  double prev_total = 0.0;
  bool have_prev = false;

  for (int t = 0; t <= config.t_max; ++t) {
    auto [breakdown, gradient] = loss_gradient(
        out.surface, cloud, config.weights, grid, config.threads);
    out.last_degenerate_count = breakdown.degenerate_samples;

    if (breakdown.degenerate_samples > 0) {
      ++consecutive_degenerate;
    } else {
      consecutive_degenerate = 0;
      last_good = out.surface;
      have_good = true;
    }
    if (consecutive_degenerate > 100) {
      record(t, breakdown);
      out.iterations = t;
      out.status = FitStatus::failed_degenerate;
      out.message = "degenerate samples persisted for more than 100 "
                    "consecutive iterations";
      if (have_good) out.surface = last_good;
      break;
    }

    const bool last = (t == config.t_max);
    if (t == 0 || last || t % config.record_every == 0)
      record(t, breakdown);

    if (config.early_stop && have_prev) {
      const double denom = std::max(std::abs(prev_total), 1e-300);
      if (std::abs(breakdown.total - prev_total) / denom <
          config.early_stop_rel_tol)
        ++stall;
      else
        stall = 0;
      if (stall >= config.early_stop_patience) {
        if (!(t == 0 || last || t % config.record_every == 0))
          record(t, breakdown);
        out.iterations = t;
        out.status = FitStatus::early_stopped;
        break;
      }
    }
    prev_total = breakdown.total;
    have_prev = true;

    if (last) {
      out.iterations = t;
      break;
    }

    if (config.plain_descent) {
      for (std::size_t i = 0; i < out.surface.free_grid.data.size(); ++i)
        out.surface.free_grid.data[i] -= config.delta * gradient.data[i];
    } else {
      adam_step(state, out.surface.free_grid, gradient);
    }
  }

  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return out;
}

}  // namespace cuspfit
