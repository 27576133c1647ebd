#include "fermibath/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>

#include "fermibath/errors.hpp"
#include "fermibath/gaussian.hpp"
#include "fermibath/io.hpp"
#include "fermibath/lattice.hpp"
#include "fermibath/lindblad.hpp"
#include "fermibath/measures.hpp"
#include "fermibath/trajectories.hpp"
#include "fermibath/version.hpp"

namespace fermibath {

namespace {

std::string join_num(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += CsvFile::num(xs[i]);
  }
  return out;
}

std::string join_num(const std::vector<int>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(xs[i]);
  }
  return out;
}

std::string exact_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string join_exact(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += exact_num(xs[i]);
  }
  return out;
}

std::string csv_path(const SimulationConfig& cfg, const std::string& name) {
  return (std::filesystem::path(cfg.outdir) / name).string();
}

void ensure_outdir(const SimulationConfig& cfg) {
  std::filesystem::create_directories(cfg.outdir);
}

// Config echo shared by every CSV. Output location and thread count are
// deliberately left out so reruns into a different directory stay
// byte-identical.
void common_meta(CsvFile& csv, const SimulationConfig& cfg) {
  csv.meta("code_version", std::string(kVersion));
  csv.meta("mode", cfg.mode);
  csv.meta("L", static_cast<std::int64_t>(cfg.L));
  csv.meta("J", cfg.J);
  csv.meta("h_s", cfg.h_s);
  csv.meta("gamma", join_num(cfg.gammas));
  csv.meta("M", static_cast<std::int64_t>(cfg.M));
  csv.meta("omega_max", cfg.omega_max);
  csv.meta("dt", cfg.dt);
  csv.meta("t_s", cfg.t_s);
  csv.meta("N_TJ", static_cast<std::int64_t>(cfg.n_tj));
  csv.meta("N_init", static_cast<std::int64_t>(cfg.n_init));
  csv.meta("seed", std::to_string(cfg.seed));
  csv.meta("sample_times", join_num(cfg.resolved_sample_times()));
  csv.meta("site_indexing", "row_major");
  csv.meta("bipartition", "vertical_half_cut");
  csv.meta("propagation", "R_dagger_C_R");
  csv.meta("sweep_order", "ascending_sites_gain_then_loss");
  csv.meta("pair_convention", "unordered");
}

double final_time(const std::vector<double>& times) { return times.back(); }

}  // namespace

std::vector<double> SimulationConfig::resolved_sample_times() const {
  std::vector<double> times = sample_times;
  if (times.empty()) {
    for (double t = sample_every; t < t_s - 1e-12; t += sample_every)
      times.push_back(t);
    times.push_back(t_s);
  }
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              times.end());
  return times;
}

bool SimulationConfig::measure_enabled(char which) const {
  return measures.find(which) != std::string::npos;
}

void SimulationConfig::validate() const {
  if (L < 2 || L % 2 != 0)
    throw std::invalid_argument("L must be even and at least 2");
  if (J <= 0.0) throw std::invalid_argument("J must be positive");
  if (h_s <= 0.0) throw std::invalid_argument("h_s must be positive");
  if (gammas.empty()) throw std::invalid_argument("at least one gamma is required");
  for (double g : gammas)
    if (g < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  if (M < 1) throw std::invalid_argument("M must be positive");
  if (omega_max <= 0.0) throw std::invalid_argument("omega_max must be positive");
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  if (t_s <= 0.0) throw std::invalid_argument("t_s must be positive");
  if (n_tj < 1) throw std::invalid_argument("N_TJ must be positive");
  if (n_init < 1) throw std::invalid_argument("N_init must be positive");
  if (sample_every <= 0.0) throw std::invalid_argument("sample_every must be positive");
  if (max_modes < 1) throw std::invalid_argument("max_modes must be positive");
  if (threads < 1) throw std::invalid_argument("threads must be positive");
  for (double t : sample_times)
    if (t < 0.0 || t > t_s + 1e-9)
      throw std::invalid_argument("sample times must lie in [0, t_s]");
}

void write_manifest(const std::string& path, const SimulationConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[64];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));

  out << "# fermibath run manifest; readable back via --config\n";
  out << "# code_version=" << kVersion << "\n";
  out << "# wall_clock_utc=" << stamp << "\n";
  out << "# mode=" << cfg.mode << "\n";
  out << "# conventions: propagation=R_dagger_C_R"
         " sweep_order=ascending_sites_gain_then_loss"
         " pair_convention=unordered site_indexing=row_major\n";
  out << "L=" << cfg.L << "\n";
  out << "J=" << exact_num(cfg.J) << "\n";
  out << "h_s=" << exact_num(cfg.h_s) << "\n";
  out << "gamma=" << join_exact(cfg.gammas) << "\n";
  out << "M=" << cfg.M << "\n";
  out << "omega_max=" << exact_num(cfg.omega_max) << "\n";
  out << "dt=" << exact_num(cfg.dt) << "\n";
  out << "t_s=" << exact_num(cfg.t_s) << "\n";
  out << "N_TJ=" << cfg.n_tj << "\n";
  out << "N_init=" << cfg.n_init << "\n";
  if (!cfg.n_init_checkpoints.empty())
    out << "N_init_checkpoints=" << join_num(cfg.n_init_checkpoints) << "\n";
  out << "seed=" << cfg.seed << "\n";
  if (!cfg.sample_times.empty())
    out << "sample_times=" << join_exact(cfg.sample_times) << "\n";
  out << "sample_every=" << exact_num(cfg.sample_every) << "\n";
  out << "x_min=" << exact_num(cfg.x_min) << "\n";
  out << "max_modes=" << cfg.max_modes << "\n";
  out << "threads=" << cfg.threads << "\n";
  out << "measures=" << cfg.measures << "\n";
  out << "purity_tol=" << exact_num(cfg.purity_tol) << "\n";
  out << "purity_check_every=" << cfg.purity_check_every << "\n";
  if (!cfg.inputs.empty()) {
    out << "inputs=";
    for (std::size_t i = 0; i < cfg.inputs.size(); ++i)
      out << (i ? "," : "") << cfg.inputs[i];
    out << "\n";
  }
  out << "nu_min=" << exact_num(cfg.nu_min) << "\n";
  out << "nu_max=" << exact_num(cfg.nu_max) << "\n";
  out << "zeta_min=" << exact_num(cfg.zeta_min) << "\n";
  out << "zeta_max=" << exact_num(cfg.zeta_max) << "\n";
  if (cfg.gamma_c_max > cfg.gamma_c_min) {
    out << "gamma_c_min=" << exact_num(cfg.gamma_c_min) << "\n";
    out << "gamma_c_max=" << exact_num(cfg.gamma_c_max) << "\n";
  }
  out << "n_boot=" << cfg.n_boot << "\n";
  out << "collapse_grid=" << cfg.collapse_grid << "\n";
}

RunOutputs run_unitary_pipeline(const SimulationConfig& cfg) {
  cfg.validate();
  const LatticeGeometry geom = LatticeGeometry::square(cfg.L);
  const int N = geom.num_sites();
  const long long D = static_cast<long long>(N) * (cfg.M + 1);
  if (D > cfg.max_modes)
    throw ResourceLimitError("total mode count " + std::to_string(D) +
                             " exceeds max_modes=" + std::to_string(cfg.max_modes) +
                             "; raise --max_modes to override");
  ensure_outdir(cfg);

  const bool want_E = cfg.measure_enabled('E');
  const bool want_I = cfg.measure_enabled('I');
  const bool want_C = cfg.measure_enabled('C');
  const bool want_D = cfg.measure_enabled('D');
  const bool need_full = want_E || want_I || want_D;

  const std::vector<double> times = cfg.resolved_sample_times();
  const double t_last = final_time(times);

  RunOutputs outputs;
  CsvFile measures_csv(csv_path(cfg, "unitary_measures.csv"));
  common_meta(measures_csv, cfg);
  measures_csv.meta("measures", cfg.measures);
  measures_csv.columns({"t", "gamma", "L", "M", "E", "I", "Cw_total", "Cw_SS",
                        "Cw_SB", "Cw_BB"});
  outputs.csv_paths.push_back(csv_path(cfg, "unitary_measures.csv"));

  CsvFile diag_csv(csv_path(cfg, "unitary_diagnostics.csv"));
  common_meta(diag_csv, cfg);
  diag_csv.columns({"t", "gamma", "diag_dev", "offdiag_dev", "me_dev"});
  outputs.csv_paths.push_back(csv_path(cfg, "unitary_diagnostics.csv"));

  std::unique_ptr<CsvFile> dist_csv;
  if (want_D) {
    dist_csv = std::make_unique<CsvFile>(csv_path(cfg, "unitary_distance.csv"));
    common_meta(*dist_csv, cfg);
    dist_csv->meta("distance_sampled_at", t_last);
    dist_csv->columns({"gamma", "L", "d", "D_of_d", "n_pairs"});
    outputs.csv_paths.push_back(csv_path(cfg, "unitary_distance.csv"));
  }

  const SingleParticleHamiltonian h_sys =
      build_system_hamiltonian(geom, cfg.J, cfg.h_s);
  const Propagator prop_sys = Propagator::diagonalize(h_sys);
  const CorrelationMatrix C0_sys = init_checkerboard(geom);

  for (double gamma : cfg.gammas) {
    auto [h_tot, layout] =
        build_total_hamiltonian(geom, cfg.J, cfg.h_s, gamma, cfg.M, cfg.omega_max);
    const Propagator prop = Propagator::diagonalize(h_tot);
    h_tot.matrix.resize(0, 0);  // free before the dense temporaries

    Eigen::VectorXd d0(layout.dim());
    d0.head(N) = checkerboard_occupations(geom);
    d0.tail(layout.dim() - N).setConstant(0.5);
    const Eigen::MatrixXd G = eigenbasis_diagonal_transform(prop, d0);

    const std::vector<int> sys = layout.system_canonical();
    const std::vector<int> left = layout.left_canonical();
    const std::vector<int> right = layout.right_canonical();

    for (double t : times) {
      const CorrelationMatrix C_me =
          evolve_master_equation(C0_sys, prop_sys, gamma, t);

      double e_val = std::nan("");
      double i_val = std::nan("");
      CorrelationWeights weights;
      bool have_weights = false;
      DeviationReport dev;

      if (need_full) {
        const CorrelationMatrix C = evolve_from_eigenbasis(prop, G, t);
        dev = deviation_report(extract_block(C, sys, sys), C_me);
        if (want_D && t == t_last) {
          const BathDistanceCorrelation dist =
              bath_density_correlation(C, geom, layout);
          for (std::size_t d = 0; d < dist.value.size(); ++d)
            dist_csv->row({CsvFile::num(gamma), std::to_string(cfg.L),
                           std::to_string(d), CsvFile::num(dist.value[d]),
                           std::to_string(dist.n_pairs[d])});
        }
        const CorrelationMatrix C_lr = reorder_to_partitions(layout, C);
        if (want_C) {
          weights = connected_correlation_weight(C_lr, layout);
          have_weights = true;
        }
        if (want_E || want_I) {
          if (want_E) {
            const NegativitySpectra spectra =
                negativity_spectra(C_lr, layout.n_left());
            e_val = negativity_from_spectra(spectra);
            if (want_I) {
              const int nl = layout.n_left();
              const double s_ll =
                  von_neumann_entropy(C_lr.topLeftCorner(nl, nl));
              const double s_rr = von_neumann_entropy(
                  C_lr.bottomRightCorner(C_lr.rows() - nl, C_lr.rows() - nl));
              i_val = std::max(
                  s_ll + s_rr - entropy_from_spectrum(spectra.lambda), 0.0);
            }
          } else {
            i_val = mutual_information(C_lr, layout);
          }
        }
      } else {
        const Eigen::MatrixXcd C_ss =
            evolve_block_from_eigenbasis(prop, G, t, sys, sys);
        dev = deviation_report(C_ss, C_me);
        if (want_C) {
          const Eigen::MatrixXcd lr_block =
              evolve_block_from_eigenbasis(prop, G, t, left, right);
          weights = correlation_weights_from_lr_block(lr_block, layout);
          have_weights = true;
        }
      }

      measures_csv.row(
          {CsvFile::num(t), CsvFile::num(gamma), std::to_string(cfg.L),
           std::to_string(cfg.M), CsvFile::num(e_val), CsvFile::num(i_val),
           CsvFile::num(have_weights ? weights.total : std::nan("")),
           CsvFile::num(have_weights ? weights.ss : std::nan("")),
           CsvFile::num(have_weights ? weights.sb : std::nan("")),
           CsvFile::num(have_weights ? weights.bb : std::nan(""))});
      diag_csv.row({CsvFile::num(t), CsvFile::num(gamma),
                    CsvFile::num(dev.diag_dev), CsvFile::num(dev.offdiag_dev),
                    CsvFile::num(dev.me_dev)});
    }
  }

  outputs.manifest_path = csv_path(cfg, "manifest.ini");
  write_manifest(outputs.manifest_path, cfg);
  return outputs;
}

RunOutputs run_trajectory_pipeline(const SimulationConfig& cfg) {
  cfg.validate();
  const LatticeGeometry geom = LatticeGeometry::square(cfg.L);
  ensure_outdir(cfg);

  const SingleParticleHamiltonian h_sys =
      build_system_hamiltonian(geom, cfg.J, cfg.h_s);
  const Propagator prop = Propagator::diagonalize(h_sys);

  RunOutputs outputs;
  CsvFile csv(csv_path(cfg, "trajectories_ensemble.csv"));
  common_meta(csv, cfg);
  csv.meta("purity_tol", cfg.purity_tol);
  csv.columns({"t", "gamma", "L", "mean_S", "stderr_S", "mean_E", "stderr_E",
               "N_TJ", "seed"});
  outputs.csv_paths.push_back(csv_path(cfg, "trajectories_ensemble.csv"));

  for (double gamma : cfg.gammas) {
    TrajectoryConfig traj;
    traj.dt = cfg.dt;
    traj.t_s = cfg.t_s;
    traj.gamma = gamma;
    traj.seed = cfg.seed;
    traj.sample_times = cfg.resolved_sample_times();
    traj.purity_tol = cfg.purity_tol;
    traj.purity_check_every = cfg.purity_check_every;

    const std::vector<TrajectoryResult> ensemble =
        run_ensemble(geom, traj, prop, cfg.n_tj, cfg.threads);
    const EnsembleStats stats = trajectory_averages(ensemble);
    for (std::size_t k = 0; k < stats.times.size(); ++k) {
      csv.row({CsvFile::num(stats.times[k]), CsvFile::num(gamma),
               std::to_string(cfg.L), CsvFile::num(stats.mean_entropy[k]),
               CsvFile::num(stats.stderr_entropy[k]),
               CsvFile::num(stats.mean_negativity[k]),
               CsvFile::num(stats.stderr_negativity[k]),
               std::to_string(cfg.n_tj), std::to_string(cfg.seed)});
    }
    const std::string snap =
        csv_path(cfg, "trajectories_mean_C_gamma" + CsvFile::num(gamma) + ".bin");
    save_matrix(snap, ensemble_mean_final_state(ensemble));
    outputs.csv_paths.push_back(snap);
  }

  outputs.manifest_path = csv_path(cfg, "manifest.ini");
  write_manifest(outputs.manifest_path, cfg);
  return outputs;
}

RunOutputs run_master_pipeline(const SimulationConfig& cfg) {
  cfg.validate();
  const LatticeGeometry geom = LatticeGeometry::square(cfg.L);
  ensure_outdir(cfg);

  const SingleParticleHamiltonian h_sys =
      build_system_hamiltonian(geom, cfg.J, cfg.h_s);
  const Propagator prop = Propagator::diagonalize(h_sys);
  const CorrelationMatrix C0 = init_checkerboard(geom);

  RunOutputs outputs;
  CsvFile csv(csv_path(cfg, "master_diagnostics.csv"));
  common_meta(csv, cfg);
  csv.columns({"t", "gamma", "diag_dev", "offdiag_dev", "me_dev"});
  outputs.csv_paths.push_back(csv_path(cfg, "master_diagnostics.csv"));

  for (double gamma : cfg.gammas) {
    for (double t : cfg.resolved_sample_times()) {
      const CorrelationMatrix C = evolve_master_equation(C0, prop, gamma, t);
      const DeviationReport dev = deviation_report(C, C);
      csv.row({CsvFile::num(t), CsvFile::num(gamma), CsvFile::num(dev.diag_dev),
               CsvFile::num(dev.offdiag_dev), CsvFile::num(0.0)});
    }
  }

  outputs.manifest_path = csv_path(cfg, "manifest.ini");
  write_manifest(outputs.manifest_path, cfg);
  return outputs;
}

RunOutputs run_random_bath_ensemble(const SimulationConfig& cfg) {
  cfg.validate();
  const LatticeGeometry geom = LatticeGeometry::square(cfg.L);
  const int N = geom.num_sites();
  const long long D = static_cast<long long>(N) * (cfg.M + 1);
  if (D > cfg.max_modes)
    throw ResourceLimitError("total mode count " + std::to_string(D) +
                             " exceeds max_modes=" + std::to_string(cfg.max_modes));
  ensure_outdir(cfg);

  std::vector<int> checkpoints = cfg.n_init_checkpoints;
  if (checkpoints.empty()) checkpoints = {cfg.n_init};
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()),
                    checkpoints.end());
  for (int c : checkpoints)
    if (c < 1 || c > cfg.n_init)
      throw std::invalid_argument("checkpoints must lie in [1, N_init]");

  const SingleParticleHamiltonian h_sys =
      build_system_hamiltonian(geom, cfg.J, cfg.h_s);
  const Propagator prop_sys = Propagator::diagonalize(h_sys);
  const CorrelationMatrix C0_sys = init_checkerboard(geom);
  const Eigen::VectorXd checker = checkerboard_occupations(geom);

  RunOutputs outputs;
  CsvFile csv(csv_path(cfg, "random_bath.csv"));
  common_meta(csv, cfg);
  csv.meta("N_init_checkpoints", join_num(checkpoints));
  csv.columns({"t", "gamma", "n_init", "diag_dev", "offdiag_dev", "me_dev",
               "diag_offdiag_ratio"});
  outputs.csv_paths.push_back(csv_path(cfg, "random_bath.csv"));

  const double t = cfg.t_s;
  for (double gamma : cfg.gammas) {
    auto [h_tot, layout] =
        build_total_hamiltonian(geom, cfg.J, cfg.h_s, gamma, cfg.M, cfg.omega_max);
    const Propagator prop = Propagator::diagonalize(h_tot);
    h_tot.matrix.resize(0, 0);

    const CorrelationMatrix C_me = evolve_master_equation(C0_sys, prop_sys, gamma, t);
    // C_ss(t) = Q^dag diag(d0) Q with Q = R(t)(:, system modes)
    const Eigen::MatrixXcd Q = prop.unitary_columns(t, layout.system_canonical());

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(N, N);
    std::size_t next_checkpoint = 0;
    for (int rep = 0; rep < cfg.n_init; ++rep) {
      RngStream rng(cfg.seed, static_cast<std::uint64_t>(rep));
      Eigen::VectorXd d0(layout.dim());
      d0.head(N) = checker;
      d0.tail(layout.dim() - N) =
          random_pure_bath_occupations(layout.dim() - N, rng);
      sum.noalias() += Q.adjoint() * d0.asDiagonal() * Q;

      while (next_checkpoint < checkpoints.size() &&
             rep + 1 == checkpoints[next_checkpoint]) {
        const Eigen::MatrixXcd avg = sum / static_cast<double>(rep + 1);
        const DeviationReport dev = deviation_report(avg, C_me);
        double mean_diag = 0.0, mean_offdiag = 0.0;
        for (int j = 0; j < N; ++j)
          for (int i = 0; i < N; ++i)
            (i == j ? mean_diag : mean_offdiag) += std::abs(avg(i, j));
        mean_diag /= N;
        mean_offdiag /= static_cast<double>(N) * (N - 1);
        const double ratio = mean_offdiag > 0.0 ? mean_diag / mean_offdiag
                                                : std::numeric_limits<double>::infinity();
        csv.row({CsvFile::num(t), CsvFile::num(gamma),
                 std::to_string(rep + 1), CsvFile::num(dev.diag_dev),
                 CsvFile::num(dev.offdiag_dev), CsvFile::num(dev.me_dev),
                 CsvFile::num(ratio)});
        ++next_checkpoint;
      }
    }
  }

  outputs.manifest_path = csv_path(cfg, "manifest.ini");
  write_manifest(outputs.manifest_path, cfg);
  return outputs;
}

RunOutputs run_analysis(const SimulationConfig& cfg) {
  if (cfg.inputs.empty())
    throw std::invalid_argument("analyze needs at least one input CSV");
  ensure_outdir(cfg);

  // steady-state Cw_total per (gamma, L): last sample time wins
  std::map<std::pair<double, int>, std::pair<double, double>> latest;  // -> (t, value)
  std::vector<std::string> problems;
  for (const std::string& path : cfg.inputs) {
    try {
      const CsvTable table = read_csv(path);
      const int ct = table.col("t"), cg = table.col("gamma"), cl = table.col("L"),
                cw = table.col("Cw_total");
      if (ct < 0 || cg < 0 || cl < 0 || cw < 0)
        throw std::runtime_error("missing required columns t,gamma,L,Cw_total");
      if (table.rows.empty()) throw std::runtime_error("no data rows");
      for (const auto& row : table.rows) {
        const double value = row[cw];
        if (std::isnan(value)) continue;
        const std::pair<double, int> key{row[cg], static_cast<int>(row[cl])};
        auto it = latest.find(key);
        if (it == latest.end() || row[ct] >= it->second.first)
          latest[key] = {row[ct], value};
      }
    } catch (const std::exception& e) {
      problems.push_back(path + ": " + e.what());
    }
  }
  if (!problems.empty()) {
    std::string msg = "analyze inputs failed:";
    for (const auto& p : problems) msg += "\n  " + p;
    throw std::invalid_argument(msg);
  }
  if (latest.empty())
    throw std::invalid_argument("analyze inputs carry no usable Cw_total data");

  std::map<double, std::vector<std::pair<double, double>>> by_gamma;  // (L, value)
  std::set<int> all_sizes;
  for (const auto& [key, tv] : latest) {
    by_gamma[key.first].emplace_back(static_cast<double>(key.second), tv.second);
    all_sizes.insert(key.second);
  }

  RunOutputs outputs;
  CsvFile fits_csv(csv_path(cfg, "analysis_fits.csv"));
  common_meta(fits_csv, cfg);
  fits_csv.meta("x_min", cfg.x_min);
  fits_csv.columns({"gamma", "L", "c", "b", "c_err", "b_err", "residual",
                    "n_points"});
  outputs.csv_paths.push_back(csv_path(cfg, "analysis_fits.csv"));

  std::vector<CollapsePoint> fit_curves;
  for (auto& [gamma, pts] : by_gamma) {
    std::sort(pts.begin(), pts.end());
    for (int window : all_sizes) {
      std::vector<std::pair<double, double>> in_window;
      for (const auto& [x, y] : pts)
        if (x >= cfg.x_min && x <= window + 1e-9) in_window.emplace_back(x, y);
      if (in_window.size() < 2) continue;
      const ScalingFit fit = fit_scaling_law(in_window, cfg.x_min);
      fits_csv.row({CsvFile::num(gamma), std::to_string(window),
                    CsvFile::num(fit.c), CsvFile::num(fit.b),
                    CsvFile::num(fit.c_err), CsvFile::num(fit.b_err),
                    CsvFile::num(fit.residual), std::to_string(fit.n_points)});
      fit_curves.push_back(
          {gamma, static_cast<double>(window), fit.c, fit.c_err});
    }
  }

  // crossing scan over c(gamma, L)
  CsvFile crossing_csv(csv_path(cfg, "analysis_crossing.csv"));
  common_meta(crossing_csv, cfg);
  outputs.csv_paths.push_back(csv_path(cfg, "analysis_crossing.csv"));
  std::string crossing_note;
  CrossingEstimate crossing;
  try {
    crossing = size_invariance_scan(fit_curves);
    if (!crossing.found) crossing_note = "no crossings in range";
  } catch (const std::invalid_argument& e) {
    crossing_note = e.what();
  }
  crossing_csv.meta("status", crossing.found ? "ok" : ("skipped: " + crossing_note));
  crossing_csv.columns({"gamma_star", "spread", "n_crossings"});
  if (crossing.found)
    crossing_csv.row({CsvFile::num(crossing.gamma), CsvFile::num(crossing.spread),
                      std::to_string(crossing.n_crossings)});

  // finite-size-scaling collapse of c(gamma, L)
  CsvFile collapse_csv(csv_path(cfg, "analysis_collapse.csv"));
  common_meta(collapse_csv, cfg);
  outputs.csv_paths.push_back(csv_path(cfg, "analysis_collapse.csv"));
  std::string collapse_note;
  bool collapse_ok = false;
  CollapseResult result;
  try {
    CollapseOptions opt;
    if (cfg.gamma_c_max > cfg.gamma_c_min) {
      opt.gamma_c = {cfg.gamma_c_min, cfg.gamma_c_max};
    } else {
      double lo = by_gamma.begin()->first, hi = by_gamma.rbegin()->first;
      opt.gamma_c = {lo, hi};
    }
    opt.nu = {cfg.nu_min, cfg.nu_max};
    opt.zeta = {cfg.zeta_min, cfg.zeta_max};
    opt.n_boot = cfg.n_boot;
    opt.grid = cfg.collapse_grid;
    opt.seed = cfg.seed;
    // drop sigmas unless every fit produced one; the objective expects
    // either all errors or none
    bool all_sigma = true;
    for (const auto& p : fit_curves) all_sigma = all_sigma && p.sigma > 0.0;
    std::vector<CollapsePoint> data = fit_curves;
    if (!all_sigma)
      for (auto& p : data) p.sigma = 0.0;
    result = collapse(data, opt);
    collapse_ok = true;
  } catch (const std::exception& e) {
    collapse_note = e.what();
    std::cerr << "analyze: collapse skipped: " << collapse_note << "\n";
  }
  collapse_csv.meta("status", collapse_ok ? "ok" : ("skipped: " + collapse_note));
  collapse_csv.columns({"gamma_c", "nu", "zeta", "d_gamma_c", "d_nu", "d_zeta",
                        "quality", "n_boot"});
  if (collapse_ok)
    collapse_csv.row({CsvFile::num(result.gamma_c), CsvFile::num(result.nu),
                      CsvFile::num(result.zeta), CsvFile::num(result.d_gamma_c),
                      CsvFile::num(result.d_nu), CsvFile::num(result.d_zeta),
                      CsvFile::num(result.quality), std::to_string(result.n_boot)});

  outputs.manifest_path = csv_path(cfg, "manifest.ini");
  write_manifest(outputs.manifest_path, cfg);
  return outputs;
}

RunOutputs run(const SimulationConfig& cfg) {
  if (cfg.mode == "unitary") return run_unitary_pipeline(cfg);
  if (cfg.mode == "trajectories") return run_trajectory_pipeline(cfg);
  if (cfg.mode == "master") return run_master_pipeline(cfg);
  if (cfg.mode == "random-bath") return run_random_bath_ensemble(cfg);
  if (cfg.mode == "analyze") return run_analysis(cfg);
  throw std::invalid_argument("unknown mode: " + cfg.mode);
}

}  // namespace fermibath
