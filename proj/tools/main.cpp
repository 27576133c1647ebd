// Command-line front end: one subcommand per pipeline. Any flag can also be
// supplied through a flat key=value config file (--config); command-line
// values override the file. Exit codes: 0 success, 1 invalid configuration,
// 2 numerical failure, 3 resource guard.

#include <cstdint>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fermibath/errors.hpp"
#include "fermibath/runner.hpp"
#include "fermibath/version.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    if (pos != item.size()) throw CLI::ValidationError("bad number: " + item);
    out.push_back(v);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_double_list(text)) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct RawLists {
  std::string gammas;
  std::string sample_times;
  std::string checkpoints;
  std::string inputs;
};

void add_common_options(CLI::App* cmd, fermibath::SimulationConfig& cfg,
                        RawLists& raw) {
  cmd->set_config("--config", "", "flat key=value config file; flags override");
  cmd->add_option("--L", cfg.L, "linear lattice size (even)");
  cmd->add_option("--J", cfg.J, "hopping energy, the unit");
  cmd->add_option("--h_s", cfg.h_s, "on-site energy");
  cmd->add_option("--gamma", raw.gammas, "comma-separated coupling rates");
  cmd->add_option("--M", cfg.M, "bath modes per site");
  cmd->add_option("--omega_max", cfg.omega_max, "bath band edge");
  cmd->add_option("--dt", cfg.dt, "trajectory time step");
  cmd->add_option("--t_s", cfg.t_s, "total evolution time");
  cmd->add_option("--N_TJ", cfg.n_tj, "trajectory count");
  cmd->add_option("--N_init", cfg.n_init, "random-bath replica count");
  cmd->add_option("--N_init_checkpoints", raw.checkpoints,
                  "comma-separated replica counts to report at");
  cmd->add_option("--seed", cfg.seed, "base RNG seed");
  cmd->add_option("--sample_times", raw.sample_times,
                  "comma-separated sample times; empty = every sample_every");
  cmd->add_option("--sample_every", cfg.sample_every, "sample cadence");
  cmd->add_option("--outdir", cfg.outdir, "output directory");
  cmd->add_option("--x_min", cfg.x_min, "lower edge of the scaling-fit window");
  cmd->add_option("--max_modes", cfg.max_modes, "dense mode-count guard");
  cmd->add_option("--threads", cfg.threads, "worker threads");
  cmd->add_option("--measures", cfg.measures,
                  "subset of E,I,C,D to evaluate in the unitary pipeline");
  cmd->add_option("--purity_tol", cfg.purity_tol,
                  "abort threshold on trajectory purity");
  cmd->add_option("--purity_check_every", cfg.purity_check_every,
                  "steps between purity checks");
  cmd->add_option("--inputs", raw.inputs, "comma-separated measures CSVs");
  cmd->add_option("--gamma_c_min", cfg.gamma_c_min, "collapse gamma_c range low");
  cmd->add_option("--gamma_c_max", cfg.gamma_c_max, "collapse gamma_c range high");
  cmd->add_option("--nu_min", cfg.nu_min, "collapse nu range low");
  cmd->add_option("--nu_max", cfg.nu_max, "collapse nu range high");
  cmd->add_option("--zeta_min", cfg.zeta_min, "collapse zeta range low");
  cmd->add_option("--zeta_max", cfg.zeta_max, "collapse zeta range high");
  cmd->add_option("--n_boot", cfg.n_boot, "bootstrap resamples");
  cmd->add_option("--collapse_grid", cfg.collapse_grid,
                  "simplex starts per parameter axis");
}

void resolve_lists(fermibath::SimulationConfig& cfg, const RawLists& raw) {
  if (!raw.gammas.empty()) cfg.gammas = parse_double_list(raw.gammas);
  if (!raw.sample_times.empty())
    cfg.sample_times = parse_double_list(raw.sample_times);
  if (!raw.checkpoints.empty())
    cfg.n_init_checkpoints = parse_int_list(raw.checkpoints);
  if (!raw.inputs.empty()) cfg.inputs = parse_string_list(raw.inputs);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fermibath: free-fermion system-bath dynamics on the "
               "correlation-matrix level"};
  app.set_version_flag("--version", std::string(fermibath::kVersion));
  app.require_subcommand(1);

  fermibath::SimulationConfig cfg;
  RawLists raw;

  struct {
    const char* name;
    const char* help;
  } modes[] = {
      {"trajectories", "stroboscopic quantum-trajectory ensemble"},
      {"unitary", "deterministic unitary system+bath evolution"},
      {"master", "master-equation reference evolution"},
      {"random-bath", "unitary evolution averaged over random pure baths"},
      {"analyze", "scaling fits, size-invariance scan and FSS collapse"},
  };
  for (const auto& m : modes) {
    CLI::App* cmd = app.add_subcommand(m.name, m.help);
    add_common_options(cmd, cfg, raw);
    cmd->callback([&cfg, &raw, name = std::string(m.name)]() {
      cfg.mode = name;
      resolve_lists(cfg, raw);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const fermibath::RunOutputs out = fermibath::run(cfg);
    for (const auto& path : out.csv_paths) std::cout << path << "\n";
    std::cout << out.manifest_path << "\n";
    return 0;
  } catch (const fermibath::ResourceLimitError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return 3;
  } catch (const fermibath::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
