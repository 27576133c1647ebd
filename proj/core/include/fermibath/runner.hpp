#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fermibath/fss.hpp"

namespace fermibath {

// Everything a run needs; defaults are the production values
// (J is the energy unit, times in 1/J, rates in J).
struct SimulationConfig {
  std::string mode;  // trajectories | unitary | master | random-bath | analyze

  int L = 6;
  double J = 1.0;
  double h_s = 5.0;
  std::vector<double> gammas{0.5};
  int M = 100;
  double omega_max = 10.0;
  double dt = 0.1;
  double t_s = 50.0;
  int n_tj = 256;
  int n_init = 256;
  std::vector<int> n_init_checkpoints;  // empty: report only at n_init
  std::uint64_t seed = 123456789;
  std::vector<double> sample_times;  // empty: every sample_every up to t_s
  double sample_every = 1.0;
  std::string outdir = "out";
  double x_min = 8.0;
  int max_modes = 16384;
  int threads = 1;
  // any subset of E (negativity), I (mutual information), C (correlation
  // weight), D (bath distance correlation)
  std::string measures = "E,I,C,D";
  double purity_tol = 1e-6;
  int purity_check_every = 1;

  // analyze inputs and collapse search ranges (gamma_c range 0,0 = from data)
  std::vector<std::string> inputs;
  double gamma_c_min = 0.0, gamma_c_max = 0.0;
  double nu_min = 0.5, nu_max = 2.5;
  double zeta_min = -0.5, zeta_max = 0.5;
  int n_boot = 200;
  int collapse_grid = 5;

  std::vector<double> resolved_sample_times() const;
  bool measure_enabled(char which) const;
  void validate() const;  // throws std::invalid_argument
};

// Files written by a pipeline run.
struct RunOutputs {
  std::vector<std::string> csv_paths;
  std::string manifest_path;
};

// Flat key=value snapshot of the configuration plus convention flags;
// readable back through the CLI's --config option.
void write_manifest(const std::string& path, const SimulationConfig& config);

RunOutputs run_unitary_pipeline(const SimulationConfig& config);
RunOutputs run_trajectory_pipeline(const SimulationConfig& config);
RunOutputs run_master_pipeline(const SimulationConfig& config);
RunOutputs run_random_bath_ensemble(const SimulationConfig& config);
RunOutputs run_analysis(const SimulationConfig& config);

// Dispatch on config.mode.
RunOutputs run(const SimulationConfig& config);

}  // namespace fermibath
