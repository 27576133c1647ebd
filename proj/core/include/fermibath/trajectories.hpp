#pragma once

#include <cstdint>
#include <vector>

#include "fermibath/gaussian.hpp"
#include "fermibath/lattice.hpp"
#include "fermibath/rng.hpp"

namespace fermibath {

// Stroboscopic unraveling: unitary steps of length dt interleaved with a
// sweep over all sites, gain channel then loss channel at each site.
struct TrajectoryConfig {
  double dt = 0.1;        // units 1/J
  double t_s = 50.0;      // total time, units 1/J
  double gamma = 0.5;     // jump rate, units J
  std::uint64_t seed = 0;
  std::vector<double> sample_times;  // snapped to the step grid; t_s always sampled
  double purity_tol = 1e-6;          // abort threshold on max|C^2 - C|
  int purity_check_every = 1;        // steps between purity checks

  int steps() const;
  double jump_probability() const { return gamma * dt; }
  void validate() const;  // throws std::invalid_argument
};

struct ChannelOutcome {
  bool jumped = false;
  double delta_p = 0.0;  // Born probability of the jump branch
};

// Deterministic branch updates (pure-state Kraus maps on the correlation
// matrix). The stochastic channels below draw one uniform and dispatch here.
void apply_gain_jump(CorrelationMatrix& C, int site);
void apply_gain_no_jump(CorrelationMatrix& C, int site, double p);
void apply_loss_jump(CorrelationMatrix& C, int site);
void apply_loss_no_jump(CorrelationMatrix& C, int site, double p);

// Jump branch taken with probability delta_p = p (1 - C_nn); creation of a
// particle at `site`, otherwise the no-jump Kraus update.
ChannelOutcome gain_channel(CorrelationMatrix& C, int site, double p,
                            RngStream& rng);
// Mirror channel: delta_p = p C_nn, annihilation at `site`.
ChannelOutcome loss_channel(CorrelationMatrix& C, int site, double p,
                            RngStream& rng);

struct TrajectorySample {
  double t = 0.0;
  double entropy_left = 0.0;  // S(Tr_R C)
  double negativity = 0.0;    // E(C) across the half cut
};

struct TrajectoryResult {
  std::vector<TrajectorySample> samples;
  CorrelationMatrix final_state;     // system C at t_s, canonical order
  double max_purity_deviation = 0.0;
  std::uint64_t jumps = 0;
};

// One trajectory from the checkerboard state; RNG stream keyed by
// (config.seed, trajectory_index).
TrajectoryResult run_trajectory(const LatticeGeometry& geom,
                                const TrajectoryConfig& config,
                                const Propagator& prop, int trajectory_index);

// Embarrassingly parallel ensemble; results indexed by trajectory so the
// outcome is independent of scheduling.
std::vector<TrajectoryResult> run_ensemble(const LatticeGeometry& geom,
                                           const TrajectoryConfig& config,
                                           const Propagator& prop,
                                           int n_trajectories, int n_threads);

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean_entropy, stderr_entropy;
  std::vector<double> mean_negativity, stderr_negativity;
};

// Arithmetic mean and standard error over the ensemble, per sample time.
EnsembleStats trajectory_averages(const std::vector<TrajectoryResult>& ensemble);
CorrelationMatrix ensemble_mean_final_state(
    const std::vector<TrajectoryResult>& ensemble);

}  // namespace fermibath
