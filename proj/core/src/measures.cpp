#include "fermibath/measures.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "fermibath/errors.hpp"

namespace fermibath {

using cplx = std::complex<double>;

namespace {
constexpr double kSpectrumTol = 1e-9;
constexpr double kMuTol = 1e-7;

double clamp_occupation(double nu, double tol, const char* what) {
  if (nu < -tol || nu > 1.0 + tol)
    throw NumericalError(std::string(what) + " eigenvalue outside [0,1]: " +
                         std::to_string(nu));
  return std::clamp(nu, 0.0, 1.0);
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& A) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(A, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("Hermitian eigensolver failed");
  return es.eigenvalues();
}
}  // namespace

double entropy_from_spectrum(const Eigen::VectorXd& occupations) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < occupations.size(); ++k) {
    const double nu = clamp_occupation(occupations(k), kSpectrumTol, "entropy");
    if (nu > 0.0) s -= nu * std::log(nu);
    if (nu < 1.0) s -= (1.0 - nu) * std::log(1.0 - nu);
  }
  return s;
}

double von_neumann_entropy(const CorrelationMatrix& block) {
  if (block.rows() != block.cols())
    throw std::invalid_argument("entropy needs a square block");
  if (block.rows() == 0) return 0.0;
  return entropy_from_spectrum(hermitian_eigenvalues(block));
}

NegativitySpectra negativity_spectra(const CorrelationMatrix& C_lr, int n_left) {
  const Eigen::Index n = C_lr.rows();
  if (C_lr.cols() != n) throw std::invalid_argument("correlation matrix not square");
  if (n_left < 1 || n_left >= n)
    throw std::invalid_argument("cut position outside the mode range");
  const Eigen::Index nl = n_left, nr = n - n_left;

  // Gamma = 2C - 1, blocks twisted by +/- i on the off-diagonal and a sign
  // flip on the RR block
  Eigen::MatrixXcd gamma = 2.0 * C_lr - Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd gamma_plus(n, n);
  const cplx iu(0.0, 1.0);
  gamma_plus.topLeftCorner(nl, nl) = gamma.topLeftCorner(nl, nl);
  gamma_plus.topRightCorner(nl, nr) = iu * gamma.topRightCorner(nl, nr);
  gamma_plus.bottomLeftCorner(nr, nl) = iu * gamma.bottomLeftCorner(nr, nl);
  gamma_plus.bottomRightCorner(nr, nr) = -gamma.bottomRightCorner(nr, nr);

  // Gamma_- = Gamma_+^dag, so
  //   Gamma_* = (1 - (1 + G+ G-)^{-1} (G+ + G-)) / 2
  // shares its spectrum with the Hermitian pencil L^{-1} B L^{-dag} where
  // A = 1 + G+ G+^dag = L L^dag and B = G+ + G+^dag.
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n);
  A.noalias() += gamma_plus * gamma_plus.adjoint();
  Eigen::LLT<Eigen::MatrixXcd> llt(A);
  if (llt.info() != Eigen::Success)
    throw NumericalError("negativity: 1 + Gamma+ Gamma- is ill-conditioned");
  Eigen::MatrixXcd B = gamma_plus + gamma_plus.adjoint();
  Eigen::MatrixXcd X = llt.matrixL().solve(B);
  Eigen::MatrixXcd M = llt.matrixL().solve(X.adjoint()).adjoint();

  NegativitySpectra out;
  const Eigen::VectorXd x = hermitian_eigenvalues(M);
  out.mu.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) out.mu(j) = 0.5 * (1.0 - x(j));
  out.lambda = hermitian_eigenvalues(C_lr);
  return out;
}

double negativity_from_spectra(const NegativitySpectra& spectra) {
  double e = 0.0;
  for (Eigen::Index j = 0; j < spectra.mu.size(); ++j) {
    const double mu = clamp_occupation(spectra.mu(j), kMuTol, "negativity mu");
    e += std::log(std::sqrt(mu) + std::sqrt(1.0 - mu));
  }
  for (Eigen::Index j = 0; j < spectra.lambda.size(); ++j) {
    const double lam =
        clamp_occupation(spectra.lambda(j), kSpectrumTol, "negativity lambda");
    e += 0.5 * std::log(1.0 - 2.0 * lam + 2.0 * lam * lam);
  }
  if (e < -kSpectrumTol)
    throw NumericalError("negativity came out negative: " + std::to_string(e));
  return std::max(e, 0.0);
}

double log_fermionic_negativity(const CorrelationMatrix& C_lr, int n_left) {
  return negativity_from_spectra(negativity_spectra(C_lr, n_left));
}

double log_fermionic_negativity(const CorrelationMatrix& C_lr,
                                const ModeLayout& layout) {
  return log_fermionic_negativity(C_lr, layout.n_left());
}

double mutual_information(const CorrelationMatrix& C_lr, int n_left) {
  const Eigen::Index n = C_lr.rows();
  if (n_left < 1 || n_left >= n)
    throw std::invalid_argument("cut position outside the mode range");
  const double s_ll = von_neumann_entropy(C_lr.topLeftCorner(n_left, n_left));
  const double s_rr =
      von_neumann_entropy(C_lr.bottomRightCorner(n - n_left, n - n_left));
  const double s_all = von_neumann_entropy(C_lr);
  const double mi = s_ll + s_rr - s_all;
  if (mi < -1e-8)
    throw NumericalError("mutual information violated subadditivity: " +
                         std::to_string(mi));
  return std::max(mi, 0.0);
}

double mutual_information(const CorrelationMatrix& C_lr, const ModeLayout& layout) {
  return mutual_information(C_lr, layout.n_left());
}

CorrelationWeights correlation_weights_from_lr_block(
    const Eigen::MatrixXcd& lr_block, const ModeLayout& layout) {
  const std::vector<int> left = layout.left_canonical();
  const std::vector<int> right = layout.right_canonical();
  if (lr_block.rows() != static_cast<Eigen::Index>(left.size()) ||
      lr_block.cols() != static_cast<Eigen::Index>(right.size()))
    throw std::invalid_argument("L/R block does not match mode layout");

  CorrelationWeights w;
  double cross = 0.0;
  for (std::size_t j = 0; j < right.size(); ++j) {
    const bool col_sys = layout.mode_is_system(right[j]);
    for (std::size_t i = 0; i < left.size(); ++i) {
      const double a2 = std::norm(lr_block(static_cast<Eigen::Index>(i),
                                           static_cast<Eigen::Index>(j)));
      const bool row_sys = layout.mode_is_system(left[i]);
      if (row_sys && col_sys)
        w.ss += a2;
      else if (!row_sys && !col_sys)
        w.bb += a2;
      else
        cross += a2;
      w.total += a2;
    }
  }
  w.sb = 0.5 * cross;
  return w;
}

CorrelationWeights connected_correlation_weight(const CorrelationMatrix& C_lr,
                                                const ModeLayout& layout) {
  const Eigen::Index n = layout.dim();
  if (C_lr.rows() != n || C_lr.cols() != n)
    throw std::invalid_argument("correlation matrix does not match mode layout");
  const Eigen::Index nl = layout.n_left();
  return correlation_weights_from_lr_block(C_lr.topRightCorner(nl, n - nl),
                                           layout);
}

BathDistanceCorrelation bath_density_correlation(const CorrelationMatrix& C,
                                                 const LatticeGeometry& geom,
                                                 const ModeLayout& layout) {
  if (C.rows() != layout.dim() || C.cols() != layout.dim())
    throw std::invalid_argument("correlation matrix does not match mode layout");
  const int N = geom.num_sites();
  const int M = layout.bath_modes_per_site();
  const int d_max = 2 * (geom.linear_size() - 1);

  BathDistanceCorrelation out;
  out.value.assign(d_max + 1, 0.0);
  out.n_pairs.assign(d_max + 1, 0);

  for (int n = 0; n < N; ++n) {
    for (int np = n; np < N; ++np) {
      const int d = geom.city_block(n, np);
      double sum = 0.0;
      for (int m = 1; m <= M; ++m) {
        const int row = layout.bath_mode(n, m);
        for (int mp = 1; mp <= M; ++mp) {
          if (n == np && m == mp) continue;  // trivial self-correlation
          sum += std::norm(C(row, layout.bath_mode(np, mp)));
        }
      }
      out.value[d] += sum;
      out.n_pairs[d] += 1;
    }
  }
  for (int d = 0; d <= d_max; ++d)
    if (out.n_pairs[d] > 0) out.value[d] /= static_cast<double>(out.n_pairs[d]);
  return out;
}

}  // namespace fermibath
