#include "fermibath/trajectories.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fermibath/errors.hpp"
#include "fermibath/measures.hpp"

namespace fermibath {

using cplx = std::complex<double>;

namespace {
constexpr double kDivisionGuard = 1e-12;
constexpr double kProbabilityTol = 1e-9;

double checked_delta_p(double dp, const char* channel) {
  if (dp < -kProbabilityTol || dp > 1.0 + kProbabilityTol)
    throw NumericalError(std::string(channel) +
                         ": branch probability outside [0,1]: " +
                         std::to_string(dp));
  return std::clamp(dp, 0.0, 1.0);
}

void check_site(const CorrelationMatrix& C, int site) {
  if (site < 0 || site >= C.rows()) throw std::out_of_range("site index");
}
}  // namespace

int TrajectoryConfig::steps() const {
  return static_cast<int>(std::lround(t_s / dt));
}

void TrajectoryConfig::validate() const {
  if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
  if (t_s < 0.0) throw std::invalid_argument("t_s must be nonnegative");
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  if (jump_probability() >= 1.0)
    throw std::invalid_argument("gamma*dt must be below 1");
  if (purity_check_every < 1)
    throw std::invalid_argument("purity_check_every must be positive");
}

void apply_gain_jump(CorrelationMatrix& C, int site) {
  check_site(C, site);
  const double cnn = C(site, site).real();
  const double hole = 1.0 - cnn;
  if (hole < kDivisionGuard)
    throw NumericalError("gain jump on an occupied site");
  Eigen::VectorXcd v = -C.col(site);
  v(site) += 1.0;  // v_i = delta_in - C_in
  C.noalias() += (v * v.adjoint()) / hole;
  resymmetrize(C);
}

void apply_gain_no_jump(CorrelationMatrix& C, int site, double p) {
  check_site(C, site);
  const double cnn = C(site, site).real();
  const double denom = 1.0 - p * (1.0 - cnn);
  const double sq = std::sqrt(1.0 - p);
  const double a = 1.0 - sq;
  const Eigen::VectorXcd v = C.col(site);  // v_i = C_in
  C.noalias() -= (p / denom) * (v * v.adjoint());
  C(site, site) += a * a * cnn / denom;
  C.row(site).noalias() += (sq * a / denom) * v.adjoint();
  C.col(site).noalias() += (sq * a / denom) * v;
  resymmetrize(C);
}

void apply_loss_jump(CorrelationMatrix& C, int site) {
  check_site(C, site);
  const double cnn = C(site, site).real();
  if (cnn < kDivisionGuard) throw NumericalError("loss jump on an empty site");
  const Eigen::VectorXcd v = C.col(site);
  C.noalias() -= (v * v.adjoint()) / cnn;
  resymmetrize(C);
}

void apply_loss_no_jump(CorrelationMatrix& C, int site, double p) {
  check_site(C, site);
  const double cnn = C(site, site).real();
  const double denom = 1.0 - p * cnn;
  const double a = 1.0 - std::sqrt(1.0 - p);
  const Eigen::VectorXcd v = C.col(site);
  C.noalias() += (p / denom) * (v * v.adjoint());
  C(site, site) += a * a * cnn / denom;
  C.row(site).noalias() -= (a / denom) * v.adjoint();
  C.col(site).noalias() -= (a / denom) * v;
  resymmetrize(C);
}

ChannelOutcome gain_channel(CorrelationMatrix& C, int site, double p,
                            RngStream& rng) {
  check_site(C, site);
  const double hole = 1.0 - C(site, site).real();
  const double dp = checked_delta_p(p * hole, "gain channel");
  const double u = rng.uniform();
  // jump branch impossible when the site is already full
  if (u < dp && hole >= kDivisionGuard) {
    apply_gain_jump(C, site);
    return {true, dp};
  }
  apply_gain_no_jump(C, site, p);
  return {false, dp};
}

ChannelOutcome loss_channel(CorrelationMatrix& C, int site, double p,
                            RngStream& rng) {
  check_site(C, site);
  const double cnn = C(site, site).real();
  const double dp = checked_delta_p(p * cnn, "loss channel");
  const double u = rng.uniform();
  if (u < dp && cnn >= kDivisionGuard) {
    apply_loss_jump(C, site);
    return {true, dp};
  }
  apply_loss_no_jump(C, site, p);
  return {false, dp};
}

TrajectoryResult run_trajectory(const LatticeGeometry& geom,
                                const TrajectoryConfig& config,
                                const Propagator& prop, int trajectory_index) {
  config.validate();
  const int N = geom.num_sites();
  if (prop.dim() != N)
    throw std::invalid_argument("propagator does not match lattice");

  const ModeLayout layout = make_mode_layout(geom, 0);
  const std::vector<int> left = layout.left_canonical();
  const int n_steps = config.steps();
  const double p = config.jump_probability();

  // map sample times onto step indices
  std::vector<std::uint8_t> sampled(n_steps + 1, 0);
  if (config.sample_times.empty()) {
    sampled[n_steps] = 1;
  } else {
    for (double t : config.sample_times) {
      const int s = std::clamp(static_cast<int>(std::lround(t / config.dt)), 0,
                               n_steps);
      sampled[s] = 1;
    }
    sampled[n_steps] = 1;
  }

  RngStream rng(config.seed, static_cast<std::uint64_t>(trajectory_index));
  const Eigen::MatrixXcd R = prop.unitary(config.dt);
  const Eigen::MatrixXcd Rdag = R.adjoint();

  TrajectoryResult result;
  CorrelationMatrix C = init_checkerboard(geom);

  auto measure = [&](int step) {
    TrajectorySample s;
    s.t = step * config.dt;
    s.entropy_left = von_neumann_entropy(extract_block(C, left, left));
    s.negativity = log_fermionic_negativity(reorder_to_partitions(layout, C),
                                            layout.n_left());
    result.samples.push_back(s);
  };

  if (sampled[0]) measure(0);
  for (int step = 1; step <= n_steps; ++step) {
    C = (Rdag * C * R).eval();
    for (int site = 0; site < N; ++site) {
      if (gain_channel(C, site, p, rng).jumped) ++result.jumps;
      if (loss_channel(C, site, p, rng).jumped) ++result.jumps;
    }
    if (step % config.purity_check_every == 0 || step == n_steps) {
      const double dev = purity_deviation(C);
      result.max_purity_deviation = std::max(result.max_purity_deviation, dev);
      if (dev > config.purity_tol)
        throw NumericalError("trajectory purity violated: max|C^2-C| = " +
                             std::to_string(dev));
    }
    if (sampled[step]) measure(step);
  }
  result.final_state = std::move(C);
  return result;
}

std::vector<TrajectoryResult> run_ensemble(const LatticeGeometry& geom,
                                           const TrajectoryConfig& config,
                                           const Propagator& prop,
                                           int n_trajectories, int n_threads) {
  if (n_trajectories < 1)
    throw std::invalid_argument("trajectory count must be positive");
  config.validate();
  std::vector<TrajectoryResult> results(n_trajectories);

  if (n_threads <= 1) {
    for (int i = 0; i < n_trajectories; ++i)
      results[i] = run_trajectory(geom, config, prop, i);
    return results;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n_trajectories || failed.load()) return;
      try {
        results[i] = run_trajectory(geom, config, prop, i);
      } catch (const std::exception& e) {
        std::scoped_lock lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = e.what();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(n_threads, n_trajectories);
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load()) throw NumericalError(error_message);
  return results;
}

EnsembleStats trajectory_averages(const std::vector<TrajectoryResult>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  const std::size_t n_samples = ensemble.front().samples.size();
  for (const auto& r : ensemble)
    if (r.samples.size() != n_samples)
      throw std::invalid_argument("ensemble sample grids differ");

  const double n = static_cast<double>(ensemble.size());
  EnsembleStats stats;
  stats.times.resize(n_samples);
  stats.mean_entropy.assign(n_samples, 0.0);
  stats.stderr_entropy.assign(n_samples, 0.0);
  stats.mean_negativity.assign(n_samples, 0.0);
  stats.stderr_negativity.assign(n_samples, 0.0);

  for (std::size_t k = 0; k < n_samples; ++k) {
    stats.times[k] = ensemble.front().samples[k].t;
    double sum_s = 0.0, sum_e = 0.0;
    for (const auto& r : ensemble) {
      sum_s += r.samples[k].entropy_left;
      sum_e += r.samples[k].negativity;
    }
    const double mean_s = sum_s / n;
    const double mean_e = sum_e / n;
    stats.mean_entropy[k] = mean_s;
    stats.mean_negativity[k] = mean_e;
    if (ensemble.size() > 1) {
      double var_s = 0.0, var_e = 0.0;
      for (const auto& r : ensemble) {
        var_s += std::pow(r.samples[k].entropy_left - mean_s, 2);
        var_e += std::pow(r.samples[k].negativity - mean_e, 2);
      }
      stats.stderr_entropy[k] = std::sqrt(var_s / (n * (n - 1.0)));
      stats.stderr_negativity[k] = std::sqrt(var_e / (n * (n - 1.0)));
    }
  }
  return stats;
}

CorrelationMatrix ensemble_mean_final_state(
    const std::vector<TrajectoryResult>& ensemble) {
  if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
  CorrelationMatrix mean = ensemble.front().final_state;
  for (std::size_t i = 1; i < ensemble.size(); ++i)
    mean += ensemble[i].final_state;
  mean /= static_cast<double>(ensemble.size());
  return mean;
}

}  // namespace fermibath
