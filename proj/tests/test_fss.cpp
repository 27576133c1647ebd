#include <doctest.h>

#include <cmath>
#include <random>

#include "fermibath/errors.hpp"
#include "fermibath/fss.hpp"

using namespace fermibath;

namespace {

// forward model c(gamma, L) = L^(zeta/nu) f(L^(1/nu) (gamma - gamma_c))
std::vector<CollapsePoint> forward_model(double gamma_c, double nu, double zeta,
                                         const std::vector<double>& sizes,
                                         const std::vector<double>& gammas,
                                         double noise, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  std::vector<CollapsePoint> data;
  for (double L : sizes) {
    for (double g : gammas) {
      const double u = std::pow(L, 1.0 / nu) * (g - gamma_c);
      const double f = 1.0 / (1.0 + u * u);
      double value = std::pow(L, zeta / nu) * f;
      double sigma = 0.0;
      if (noise > 0.0) {
        sigma = noise * std::abs(value);
        value += sigma * normal(gen);
      }
      data.push_back({g, L, value, sigma});
    }
  }
  return data;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  return out;
}

}  // namespace

TEST_CASE("scaling fit recovers exact models with zero residual") {
  std::vector<std::pair<double, double>> pure_area;
  std::vector<std::pair<double, double>> mixed;
  for (double x : {8.0, 10.0, 12.0, 16.0, 20.0}) {
    pure_area.emplace_back(x, 3.0 * x);
    mixed.emplace_back(x, 2.0 * x * std::log(x) + 1.0 * x);
  }
  const ScalingFit a = fit_scaling_law(pure_area);
  CHECK(a.c == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(a.b == doctest::Approx(3.0).epsilon(1e-10));
  CHECK(a.residual < 1e-18);
  CHECK(a.n_points == 5);
  CHECK(a.x_min == 8.0);
  CHECK(a.x_max == 20.0);

  const ScalingFit m = fit_scaling_law(mixed);
  CHECK(m.c == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(m.b == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(m.residual < 1e-16);
}

TEST_CASE("scaling fit recovers noisy synthetic data within 3 sigma") {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> normal(0.0, 0.1);
  std::vector<std::pair<double, double>> pts;
  for (int x = 8; x <= 30; ++x)
    pts.emplace_back(x, 0.5 * x * std::log(x) + 0.2 * x + normal(gen));
  const ScalingFit fit = fit_scaling_law(pts);
  REQUIRE(fit.c_err > 0.0);
  CHECK(std::abs(fit.c - 0.5) < 3.0 * fit.c_err);
  CHECK(std::abs(fit.b - 0.2) < 3.0 * fit.b_err);
}

TEST_CASE("scaling fit rejects degenerate inputs") {
  CHECK_THROWS_AS(fit_scaling_law({{9.0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(fit_scaling_law({{3.0, 1.0}, {4.0, 2.0}}, 8.0),
                  std::invalid_argument);
  // two identical abscissas cannot fix two parameters
  CHECK_THROWS_AS(fit_scaling_law({{9.0, 1.0}, {9.0, 1.1}}),
                  std::invalid_argument);
}

TEST_CASE("collapse recovers the zero-noise forward model precisely") {
  const double gamma_c = 0.13, nu = 1.3, zeta = 0.0;
  const auto data = forward_model(gamma_c, nu, zeta, {12, 16, 20, 24},
                                  linspace(0.05, 0.21, 9), 0.0, 0);
  CollapseOptions opt;
  opt.gamma_c = {0.06, 0.20};
  opt.nu = {0.6, 2.2};
  opt.zeta = {-0.3, 0.3};
  opt.n_boot = 25;
  const CollapseResult res = collapse(data, opt);
  CHECK(std::abs(res.gamma_c - gamma_c) / gamma_c < 1e-3);
  CHECK(std::abs(res.nu - nu) / nu < 1e-3);
  CHECK(std::abs(res.zeta) < 1e-3);
  CHECK(res.quality < 1e-10);
  CHECK(res.n_boot == 25);
}

TEST_CASE("collapse objective prefers the planted parameters") {
  const auto data = forward_model(0.13, 1.3, 0.0, {12, 16, 20, 24},
                                  linspace(0.05, 0.21, 9), 0.0, 0);
  const double at_truth = collapse_objective(data, 0.13, 1.3, 0.0);
  CHECK(at_truth < collapse_objective(data, 0.10, 1.3, 0.0));
  CHECK(at_truth < collapse_objective(data, 0.13, 1.8, 0.0));
  CHECK(at_truth < collapse_objective(data, 0.13, 1.3, 0.15));
}

TEST_CASE("collapse objective is invariant under size relabeling and duplication") {
  const auto data = forward_model(0.12, 1.1, 0.05, {10, 14, 18},
                                  linspace(0.04, 0.20, 9), 0.0, 3);
  const double base = collapse_objective(data, 0.125, 1.2, 0.03);

  std::vector<CollapsePoint> shuffled(data.rbegin(), data.rend());
  CHECK(collapse_objective(shuffled, 0.125, 1.2, 0.03) ==
        doctest::Approx(base).epsilon(1e-12));

  std::vector<CollapsePoint> doubled = data;
  doubled.insert(doubled.end(), data.begin(), data.end());
  CHECK(collapse_objective(doubled, 0.125, 1.2, 0.03) ==
        doctest::Approx(base).epsilon(1e-9));
}

TEST_CASE("flat data collapses onto zeta = 0 with a flat objective in gamma_c") {
  // size-independent curves: pure area law everywhere
  std::vector<CollapsePoint> data;
  for (double L : {8.0, 12.0, 16.0})
    for (double g : linspace(0.05, 0.25, 7)) data.push_back({g, L, 2.0 + g, 0.0});
  CollapseOptions opt;
  opt.gamma_c = {0.08, 0.22};
  opt.nu = {0.6, 2.0};
  opt.zeta = {-0.3, 0.3};
  opt.n_boot = 0;
  const CollapseResult res = collapse(data, opt);
  CHECK(std::abs(res.zeta) < 0.02);
  // no transition: the objective cannot distinguish gamma_c values
  const double q1 = collapse_objective(data, 0.10, res.nu, res.zeta);
  const double q2 = collapse_objective(data, 0.20, res.nu, res.zeta);
  CHECK(std::abs(q1 - q2) < 1e-6);
}

TEST_CASE("collapse enforces its preconditions") {
  CollapseOptions opt;
  std::vector<CollapsePoint> two_sizes;
  for (double L : {8.0, 12.0})
    for (double g : linspace(0.1, 0.2, 6)) two_sizes.push_back({g, L, 1.0, 0.0});
  CHECK_THROWS_AS(collapse(two_sizes, opt), std::invalid_argument);

  std::vector<CollapsePoint> sparse;
  for (double L : {8.0, 12.0, 16.0})
    for (double g : linspace(0.1, 0.2, 3)) sparse.push_back({g, L, 1.0, 0.0});
  CHECK_THROWS_AS(collapse(sparse, opt), std::invalid_argument);
}

TEST_CASE("size-invariance scan finds a constructed crossing exactly") {
  const double gamma0 = 0.14;
  std::vector<CollapsePoint> curves;
  for (double L : {10.0, 14.0, 18.0}) {
    const double slope = 0.3 + 0.05 * L;
    for (double g : linspace(0.06, 0.22, 9))
      curves.push_back({g, L, (gamma0 - g) * slope + 2.0, 0.0});
  }
  const CrossingEstimate est = size_invariance_scan(curves);
  REQUIRE(est.found);
  CHECK(est.gamma == doctest::Approx(gamma0).epsilon(1e-10));
  CHECK(est.spread < 1e-10);
  CHECK(est.n_crossings == 3);
}

TEST_CASE("size-invariance scan reports missing crossings") {
  std::vector<CollapsePoint> parallel;
  for (double L : {10.0, 14.0, 18.0})
    for (double g : linspace(0.06, 0.22, 9))
      parallel.push_back({g, L, g + L, 0.0});
  const CrossingEstimate est = size_invariance_scan(parallel);
  CHECK(!est.found);
  CHECK(est.n_crossings == 0);

  CHECK_THROWS_AS(size_invariance_scan({{0.1, 8.0, 1.0, 0.0}}),
                  std::invalid_argument);
}

TEST_CASE("size-invariance scan lands near the planted transition") {
  const auto data = forward_model(0.13, 1.3, 0.0, {12, 16, 20, 24},
                                  linspace(0.05, 0.21, 17), 0.0, 0);
  const CrossingEstimate est = size_invariance_scan(data);
  REQUIRE(est.found);
  CHECK(std::abs(est.gamma - 0.13) / 0.13 < 0.10);
}
