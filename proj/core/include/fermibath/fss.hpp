#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace fermibath {

// Least-squares fit of y = c * x ln(x) + b * x over points with x >= x_min.
struct ScalingFit {
  double c = 0.0;
  double b = 0.0;
  double c_err = 0.0;  // standard errors from the linear-model covariance
  double b_err = 0.0;
  double residual = 0.0;  // sum of squared errors
  double x_min = 0.0;
  double x_max = 0.0;
  int n_points = 0;
};

ScalingFit fit_scaling_law(const std::vector<std::pair<double, double>>& points,
                           double x_min = 8.0);

// One observation for the finite-size-scaling analysis.
struct CollapsePoint {
  double gamma = 0.0;
  double size = 0.0;   // linear size L
  double value = 0.0;  // e.g. c(gamma, L)
  double sigma = 0.0;  // optional 1-sigma error; 0 means unknown
};

struct ParameterRange {
  double lo = 0.0;
  double hi = 0.0;
};

struct CollapseOptions {
  ParameterRange gamma_c{0.0, 1.0};
  ParameterRange nu{0.5, 2.5};
  ParameterRange zeta{-0.5, 0.5};
  int grid = 5;             // simplex starts per axis
  int n_boot = 200;         // bootstrap resamples; 0 skips uncertainties
  std::uint64_t seed = 1;   // bootstrap stream seed
  int max_iterations = 600;
  double tolerance = 1e-12;  // simplex spread tolerance
};

struct CollapseResult {
  double gamma_c = 0.0;
  double nu = 1.0;
  double zeta = 0.0;
  double quality = 0.0;
  double d_gamma_c = 0.0;
  double d_nu = 0.0;
  double d_zeta = 0.0;
  int n_boot = 0;
};

// Master-curve collapse quality at fixed parameters: each scaled point is
// compared against a local weighted linear fit through the bracketing points
// of the other sizes. With supplied errors this is normalized so a perfect
// collapse with honest error bars scores about 1; without errors the mean
// squared deviation is normalized by the pooled variance of the scaled data.
double collapse_objective(const std::vector<CollapsePoint>& data, double gamma_c,
                          double nu, double zeta);

// Derivative-free simplex minimization of the objective from a deterministic
// grid of starts, plus bootstrap resampling for parameter uncertainties.
CollapseResult collapse(const std::vector<CollapsePoint>& data,
                        const CollapseOptions& options);

struct CrossingEstimate {
  bool found = false;
  double gamma = 0.0;
  double spread = 0.0;
  int n_crossings = 0;
};

// Locates the coupling where c(gamma, L) curves for different sizes
// intersect: pairwise sign-change crossings aggregated by median.
CrossingEstimate size_invariance_scan(const std::vector<CollapsePoint>& curves);

}  // namespace fermibath
