#include "fermibath/fss.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "fermibath/errors.hpp"
#include "fermibath/rng.hpp"

namespace fermibath {

ScalingFit fit_scaling_law(const std::vector<std::pair<double, double>>& points,
                           double x_min) {
  std::vector<std::pair<double, double>> sel;
  for (const auto& p : points)
    if (p.first >= x_min) sel.push_back(p);
  if (sel.size() < 2)
    throw std::invalid_argument("scaling fit needs at least two points with x >= x_min");

  // normal equations for the basis {x ln x, x}
  double s11 = 0, s12 = 0, s22 = 0, r1 = 0, r2 = 0;
  double x_lo = sel.front().first, x_hi = sel.front().first;
  for (const auto& [x, y] : sel) {
    if (x < 2.0)
      throw std::invalid_argument("scaling fit needs x >= 2 for a nondegenerate basis");
    const double f1 = x * std::log(x), f2 = x;
    s11 += f1 * f1;
    s12 += f1 * f2;
    s22 += f2 * f2;
    r1 += f1 * y;
    r2 += f2 * y;
    x_lo = std::min(x_lo, x);
    x_hi = std::max(x_hi, x);
  }
  const double det = s11 * s22 - s12 * s12;
  if (!(det > 0.0) || det < 1e-12 * s11 * s22)
    throw std::invalid_argument("scaling fit basis is collinear; need two distinct x");

  ScalingFit fit;
  fit.c = (s22 * r1 - s12 * r2) / det;
  fit.b = (s11 * r2 - s12 * r1) / det;
  fit.x_min = x_lo;
  fit.x_max = x_hi;
  fit.n_points = static_cast<int>(sel.size());
  for (const auto& [x, y] : sel) {
    const double model = fit.c * x * std::log(x) + fit.b * x;
    fit.residual += (y - model) * (y - model);
  }
  if (sel.size() > 2) {
    const double sigma2 = fit.residual / (sel.size() - 2);
    fit.c_err = std::sqrt(sigma2 * s22 / det);
    fit.b_err = std::sqrt(sigma2 * s11 / det);
  }
  return fit;
}

namespace {

struct SizeSeries {
  double size = 0.0;
  std::vector<double> gamma, value, sigma;  // sorted by gamma
};

std::vector<SizeSeries> group_by_size(const std::vector<CollapsePoint>& data) {
  std::map<double, std::vector<CollapsePoint>> by_size;
  for (const auto& p : data) by_size[p.size].push_back(p);
  std::vector<SizeSeries> series;
  for (auto& [size, pts] : by_size) {
    std::sort(pts.begin(), pts.end(),
              [](const CollapsePoint& a, const CollapsePoint& b) {
                return a.gamma < b.gamma;
              });
    SizeSeries s;
    s.size = size;
    for (const auto& p : pts) {
      s.gamma.push_back(p.gamma);
      s.value.push_back(p.value);
      s.sigma.push_back(p.sigma);
    }
    series.push_back(std::move(s));
  }
  return series;
}

struct ScaledSeries {
  std::vector<double> u, w, dw;  // sorted by u
};

// Weighted straight-line estimate Y(u) +- dY through the given points.
// With zero weights supplied falls back to the unweighted fit.
bool master_curve_at(const std::vector<double>& us, const std::vector<double>& ws,
                     const std::vector<double>& vars, double u, double& y,
                     double& dy2) {
  double K = 0, Kx = 0, Kxx = 0, Ky = 0, Kxy = 0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    const double wgt = vars[i] > 0.0 ? 1.0 / vars[i] : 1.0;
    K += wgt;
    Kx += wgt * us[i];
    Kxx += wgt * us[i] * us[i];
    Ky += wgt * ws[i];
    Kxy += wgt * us[i] * ws[i];
  }
  const double delta = K * Kxx - Kx * Kx;
  if (std::abs(delta) < 1e-14 * std::max(1.0, K * Kxx)) {
    if (K <= 0.0) return false;
    y = Ky / K;  // all abscissas coincide: weighted mean
    dy2 = 1.0 / K;
    return true;
  }
  y = ((Kxx - u * Kx) * Ky + (u * K - Kx) * Kxy) / delta;
  dy2 = (Kxx - 2.0 * u * Kx + u * u * K) / delta;
  return true;
}

double objective_impl(const std::vector<SizeSeries>& series, double gamma_c,
                      double nu, double zeta) {
  if (nu < 0.05) return 1e30;  // keep the rescaling finite

  const std::size_t n_series = series.size();
  std::vector<ScaledSeries> scaled(n_series);
  bool have_errors = true;
  for (std::size_t i = 0; i < n_series; ++i) {
    const double lx = std::pow(series[i].size, 1.0 / nu);
    const double ly = std::pow(series[i].size, -zeta / nu);
    auto& s = scaled[i];
    s.u.resize(series[i].gamma.size());
    s.w.resize(series[i].gamma.size());
    s.dw.resize(series[i].gamma.size());
    for (std::size_t j = 0; j < series[i].gamma.size(); ++j) {
      s.u[j] = lx * (series[i].gamma[j] - gamma_c);
      s.w[j] = ly * series[i].value[j];
      s.dw[j] = ly * series[i].sigma[j];
      if (!(series[i].sigma[j] > 0.0)) have_errors = false;
    }
  }

  double sum = 0.0;
  double pooled = 0.0, pooled_mean = 0.0;
  std::size_t count = 0, total = 0;
  for (const auto& s : scaled)
    for (double w : s.w) {
      pooled_mean += w;
      ++total;
    }
  pooled_mean /= static_cast<double>(total);
  for (const auto& s : scaled)
    for (double w : s.w) pooled += (w - pooled_mean) * (w - pooled_mean);
  pooled /= static_cast<double>(total);

  std::vector<double> us, ws, vars;
  for (std::size_t i = 0; i < n_series; ++i) {
    for (std::size_t j = 0; j < scaled[i].u.size(); ++j) {
      const double u = scaled[i].u[j];
      us.clear();
      ws.clear();
      vars.clear();
      for (std::size_t k = 0; k < n_series; ++k) {
        if (k == i) continue;
        const auto& other = scaled[k];
        // bracketing pair around u in the other size's grid
        auto it = std::lower_bound(other.u.begin(), other.u.end(), u);
        if (it == other.u.begin() || it == other.u.end()) continue;
        const std::size_t hi = static_cast<std::size_t>(it - other.u.begin());
        const std::size_t lo = hi - 1;
        us.push_back(other.u[lo]);
        ws.push_back(other.w[lo]);
        vars.push_back(other.dw[lo] * other.dw[lo]);
        us.push_back(other.u[hi]);
        ws.push_back(other.w[hi]);
        vars.push_back(other.dw[hi] * other.dw[hi]);
      }
      if (us.empty()) continue;  // outside every other size's support
      double y = 0.0, dy2 = 0.0;
      if (!master_curve_at(us, ws, vars, u, y, dy2)) continue;
      const double diff = scaled[i].w[j] - y;
      if (have_errors) {
        const double denom = scaled[i].dw[j] * scaled[i].dw[j] + dy2;
        if (denom > 0.0) {
          sum += diff * diff / denom;
          ++count;
        }
      } else {
        sum += diff * diff;
        ++count;
      }
    }
  }
  if (count == 0) return std::numeric_limits<double>::infinity();
  double q = sum / static_cast<double>(count);
  if (!have_errors && pooled > 0.0) q /= pooled;
  return q;
}

using Point3 = std::array<double, 3>;

// Standard Nelder-Mead on 3 parameters; deterministic for fixed input.
template <typename F>
std::pair<Point3, double> nelder_mead(F&& f, const Point3& x0,
                                      const Point3& step, int max_iter,
                                      double tol) {
  constexpr int n = 3;
  std::array<Point3, n + 1> simplex;
  std::array<double, n + 1> value;
  simplex[0] = x0;
  for (int i = 0; i < n; ++i) {
    simplex[i + 1] = x0;
    simplex[i + 1][i] += step[i];
  }
  for (int i = 0; i <= n; ++i) value[i] = f(simplex[i]);

  auto order = [&]() {
    for (int i = 0; i <= n; ++i)
      for (int j = i + 1; j <= n; ++j)
        if (value[j] < value[i]) {
          std::swap(value[i], value[j]);
          std::swap(simplex[i], simplex[j]);
        }
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    order();
    if (std::abs(value[n] - value[0]) <=
        tol * (std::abs(value[0]) + std::abs(value[n])) + 1e-300)
      break;
    Point3 centroid{0, 0, 0};
    for (int i = 0; i < n; ++i)
      for (int d = 0; d < 3; ++d) centroid[d] += simplex[i][d] / n;

    auto blend = [&](double coeff) {
      Point3 p;
      for (int d = 0; d < 3; ++d)
        p[d] = centroid[d] + coeff * (simplex[n][d] - centroid[d]);
      return p;
    };

    const Point3 reflected = blend(-1.0);
    const double fr = f(reflected);
    if (fr < value[0]) {
      const Point3 expanded = blend(-2.0);
      const double fe = f(expanded);
      if (fe < fr) {
        simplex[n] = expanded;
        value[n] = fe;
      } else {
        simplex[n] = reflected;
        value[n] = fr;
      }
    } else if (fr < value[n - 1]) {
      simplex[n] = reflected;
      value[n] = fr;
    } else {
      const Point3 contracted = blend(fr < value[n] ? -0.5 : 0.5);
      const double fc = f(contracted);
      if (fc < std::min(fr, value[n])) {
        simplex[n] = contracted;
        value[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          for (int d = 0; d < 3; ++d)
            simplex[i][d] = simplex[0][d] + 0.5 * (simplex[i][d] - simplex[0][d]);
          value[i] = f(simplex[i]);
        }
      }
    }
  }
  order();
  return {simplex[0], value[0]};
}

void check_collapse_preconditions(const std::vector<SizeSeries>& series) {
  if (series.size() < 3)
    throw std::invalid_argument("collapse needs at least 3 distinct sizes");
  for (const auto& s : series)
    if (s.gamma.size() < 5)
      throw std::invalid_argument("collapse needs at least 5 gamma points per size");
}

std::pair<Point3, double> minimize_from_grid(const std::vector<SizeSeries>& series,
                                             const CollapseOptions& opt) {
  if (!(opt.gamma_c.hi > opt.gamma_c.lo) || !(opt.nu.hi > opt.nu.lo) ||
      !(opt.zeta.hi >= opt.zeta.lo))
    throw std::invalid_argument("degenerate collapse parameter ranges");

  const std::array<ParameterRange, 3> ranges{opt.gamma_c, opt.nu, opt.zeta};
  auto penalized = [&](const Point3& p) {
    double pen = 0.0;
    for (int d = 0; d < 3; ++d) {
      const double span = std::max(ranges[d].hi - ranges[d].lo, 1e-12);
      if (p[d] < ranges[d].lo)
        pen += std::pow((ranges[d].lo - p[d]) / span, 2) * 1e6;
      if (p[d] > ranges[d].hi)
        pen += std::pow((p[d] - ranges[d].hi) / span, 2) * 1e6;
    }
    return objective_impl(series, p[0], p[1], p[2]) + pen;
  };

  const int g = std::max(opt.grid, 1);
  Point3 best{0, 0, 0};
  double best_value = std::numeric_limits<double>::infinity();
  bool any_finite = false;
  for (int ig = 0; ig < g; ++ig) {
    for (int in = 0; in < g; ++in) {
      for (int iz = 0; iz < g; ++iz) {
        const Point3 x0{
            opt.gamma_c.lo + (ig + 0.5) * (opt.gamma_c.hi - opt.gamma_c.lo) / g,
            opt.nu.lo + (in + 0.5) * (opt.nu.hi - opt.nu.lo) / g,
            opt.zeta.lo + (iz + 0.5) * (opt.zeta.hi - opt.zeta.lo) / g};
        const Point3 step{(opt.gamma_c.hi - opt.gamma_c.lo) / (2.0 * g),
                          (opt.nu.hi - opt.nu.lo) / (2.0 * g),
                          std::max((opt.zeta.hi - opt.zeta.lo) / (2.0 * g), 1e-3)};
        auto [x, v] = nelder_mead(penalized, x0, step, opt.max_iterations,
                                  opt.tolerance);
        if (std::isfinite(v)) any_finite = true;
        // ties resolved lexicographically so the reduction is deterministic
        if (v < best_value ||
            (v == best_value && std::lexicographical_compare(
                                    x.begin(), x.end(), best.begin(), best.end()))) {
          best_value = v;
          best = x;
        }
      }
    }
  }
  if (!any_finite)
    throw NumericalError(
        "collapse: rescaled supports do not overlap anywhere in the search ranges");
  return {best, best_value};
}

}  // namespace

double collapse_objective(const std::vector<CollapsePoint>& data, double gamma_c,
                          double nu, double zeta) {
  return objective_impl(group_by_size(data), gamma_c, nu, zeta);
}

CollapseResult collapse(const std::vector<CollapsePoint>& data,
                        const CollapseOptions& options) {
  const std::vector<SizeSeries> series = group_by_size(data);
  check_collapse_preconditions(series);

  auto [best, best_value] = minimize_from_grid(series, options);
  CollapseResult result;
  result.gamma_c = best[0];
  result.nu = best[1];
  result.zeta = best[2];
  result.quality = best_value;
  result.n_boot = std::max(options.n_boot, 0);

  if (options.n_boot > 0) {
    RngStream rng(options.seed, 0);
    std::vector<double> bs_gc, bs_nu, bs_zeta;
    for (int b = 0; b < options.n_boot; ++b) {
      // resample within each size, merging duplicate gammas
      std::vector<SizeSeries> resampled(series.size());
      for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& src = series[i];
        std::map<double, std::pair<double, double>> acc;  // gamma -> (sum, count)
        std::map<double, double> sig;
        for (std::size_t j = 0; j < src.gamma.size(); ++j) {
          const std::size_t pick = static_cast<std::size_t>(
              rng.uniform() * static_cast<double>(src.gamma.size()));
          const std::size_t k = std::min(pick, src.gamma.size() - 1);
          auto& slot = acc[src.gamma[k]];
          slot.first += src.value[k];
          slot.second += 1.0;
          sig[src.gamma[k]] = src.sigma[k];
        }
        resampled[i].size = src.size;
        for (const auto& [g, slot] : acc) {
          resampled[i].gamma.push_back(g);
          resampled[i].value.push_back(slot.first / slot.second);
          resampled[i].sigma.push_back(sig[g]);
        }
      }
      bool usable = true;
      for (const auto& s : resampled)
        if (s.gamma.size() < 2) usable = false;
      if (!usable) continue;

      auto f = [&](const Point3& p) {
        return objective_impl(resampled, p[0], p[1], p[2]);
      };
      const Point3 step{0.02 * (options.gamma_c.hi - options.gamma_c.lo),
                        0.02 * (options.nu.hi - options.nu.lo),
                        std::max(0.02 * (options.zeta.hi - options.zeta.lo), 1e-3)};
      auto [x, v] = nelder_mead(f, best, step, options.max_iterations,
                                options.tolerance);
      if (!std::isfinite(v)) continue;
      bs_gc.push_back(x[0]);
      bs_nu.push_back(x[1]);
      bs_zeta.push_back(x[2]);
    }
    auto stddev = [](const std::vector<double>& xs) {
      if (xs.size() < 2) return 0.0;
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      return std::sqrt(var / static_cast<double>(xs.size() - 1));
    };
    result.d_gamma_c = stddev(bs_gc);
    result.d_nu = stddev(bs_nu);
    result.d_zeta = stddev(bs_zeta);
  }
  return result;
}

CrossingEstimate size_invariance_scan(const std::vector<CollapsePoint>& curves) {
  const std::vector<SizeSeries> series = group_by_size(curves);
  if (series.size() < 3)
    throw std::invalid_argument("size-invariance scan needs at least 3 sizes");

  std::vector<double> crossings;
  for (std::size_t a = 0; a < series.size(); ++a) {
    for (std::size_t b = a + 1; b < series.size(); ++b) {
      // walk the shared gamma grid of the two curves
      std::vector<std::pair<double, double>> diff;  // (gamma, c_a - c_b)
      for (std::size_t i = 0; i < series[a].gamma.size(); ++i) {
        for (std::size_t j = 0; j < series[b].gamma.size(); ++j) {
          if (std::abs(series[a].gamma[i] - series[b].gamma[j]) < 1e-12) {
            diff.emplace_back(series[a].gamma[i],
                              series[a].value[i] - series[b].value[j]);
            break;
          }
        }
      }
      for (std::size_t i = 0; i + 1 < diff.size(); ++i) {
        const auto [g0, d0] = diff[i];
        const auto [g1, d1] = diff[i + 1];
        if (d0 == 0.0) {
          crossings.push_back(g0);
        } else if (d0 * d1 < 0.0) {
          crossings.push_back(g0 + (g1 - g0) * d0 / (d0 - d1));
        }
      }
    }
  }
  CrossingEstimate est;
  est.n_crossings = static_cast<int>(crossings.size());
  if (crossings.empty()) return est;
  std::sort(crossings.begin(), crossings.end());
  est.found = true;
  const std::size_t n = crossings.size();
  est.gamma = (n % 2 == 1) ? crossings[n / 2]
                           : 0.5 * (crossings[n / 2 - 1] + crossings[n / 2]);
  double var = 0.0;
  for (double g : crossings) var += (g - est.gamma) * (g - est.gamma);
  est.spread = std::sqrt(var / static_cast<double>(n));
  return est;
}

}  // namespace fermibath
