#include "fermibath/gaussian.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "fermibath/errors.hpp"

#ifdef FERMIBATH_WITH_LAPACKE
#include <lapacke.h>
#endif

namespace fermibath {

using cplx = std::complex<double>;

bool is_hermitian(const CorrelationMatrix& C, double tol) {
  return (C - C.adjoint()).cwiseAbs().maxCoeff() < tol;
}

double purity_deviation(const CorrelationMatrix& C) {
  return (C * C - C).cwiseAbs().maxCoeff();
}

bool is_pure(const CorrelationMatrix& C, double tol) {
  return purity_deviation(C) < tol;
}

void check_correlation_spectrum(const CorrelationMatrix& C, double tol) {
  Eigen::SelfAdjointEigenSolver<CorrelationMatrix> es(C, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo < -tol || hi > 1.0 + tol)
    throw NumericalError("correlation spectrum outside [0,1]: [" +
                         std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

void resymmetrize(CorrelationMatrix& C) {
  const Eigen::Index n = C.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    C(j, j) = cplx(C(j, j).real(), 0.0);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const cplx avg = 0.5 * (C(i, j) + std::conj(C(j, i)));
      C(i, j) = avg;
      C(j, i) = std::conj(avg);
    }
  }
}

Propagator Propagator::diagonalize(const SingleParticleHamiltonian& h) {
  const int n = h.dim();
  if (n == 0) throw std::invalid_argument("empty Hamiltonian");
  if ((h.matrix - h.matrix.transpose()).cwiseAbs().maxCoeff() >= 1e-12)
    throw std::invalid_argument("Hamiltonian coefficient matrix is not symmetric");

  Propagator prop;
#ifdef FERMIBATH_WITH_LAPACKE
  prop.basis_ = h.matrix;
  prop.energies_.resize(n);
  const lapack_int info =
      LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, prop.basis_.data(), n,
                     prop.energies_.data());
  if (info != 0) throw NumericalError("dsyevd failed with info " + std::to_string(info));
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.matrix);
  if (es.info() != Eigen::Success)
    throw NumericalError("eigendecomposition failed");
  prop.basis_ = es.eigenvectors();
  prop.energies_ = es.eigenvalues();
#endif
  return prop;
}

Eigen::MatrixXcd Propagator::unitary(double t) const {
  const int n = dim();
  Eigen::VectorXcd phase(n);
  for (int k = 0; k < n; ++k)
    phase(k) = std::polar(1.0, -energies_(k) * t);
  Eigen::MatrixXcd tmp = basis_.cast<cplx>() * phase.asDiagonal();
  return tmp * basis_.transpose().cast<cplx>();
}

Eigen::MatrixXcd Propagator::unitary_columns(double t,
                                             const std::vector<int>& cols) const {
  const int n = dim();
  const int m = static_cast<int>(cols.size());
  Eigen::MatrixXd Wc(n, m);
  for (int j = 0; j < m; ++j) {
    if (cols[j] < 0 || cols[j] >= n) throw std::out_of_range("column index");
    Wc.col(j) = basis_.row(cols[j]).transpose();
  }
  Eigen::MatrixXcd Z(n, m);
  for (int k = 0; k < n; ++k) {
    const cplx ph = std::polar(1.0, -energies_(k) * t);
    Z.row(k) = ph * Wc.row(k);
  }
  // R(:, cols) = W * diag(exp(-i eps t)) * W(cols, :)^T
  Eigen::MatrixXcd out(n, m);
  out.real() = basis_ * Z.real();
  out.imag() = basis_ * Z.imag();
  return out;
}

namespace {

// Y_kl *= exp(i (eps_k - eps_l) t), in place on split real/imag parts.
void apply_phase_twist(const Eigen::VectorXd& eps, double t, Eigen::MatrixXd& Yr,
                       Eigen::MatrixXd& Yi) {
  const Eigen::Index n = eps.size();
  Eigen::VectorXd c(n), s(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    c(k) = std::cos(eps(k) * t);
    s(k) = std::sin(eps(k) * t);
  }
  for (Eigen::Index l = 0; l < n; ++l) {
    const double cl = c(l), sl = s(l);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double cr = c(k) * cl + s(k) * sl;   // cos((eps_k - eps_l) t)
      const double si = s(k) * cl - c(k) * sl;   // sin((eps_k - eps_l) t)
      const double yr = Yr(k, l), yi = Yi(k, l);
      Yr(k, l) = cr * yr - si * yi;
      Yi(k, l) = si * yr + cr * yi;
    }
  }
}

// W(sel, :) as a contiguous matrix
Eigen::MatrixXd rows_of(const Eigen::MatrixXd& W, const std::vector<int>& sel) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(sel.size()), W.cols());
  for (std::size_t i = 0; i < sel.size(); ++i) {
    if (sel[i] < 0 || sel[i] >= W.rows()) throw std::out_of_range("mode index");
    out.row(static_cast<Eigen::Index>(i)) = W.row(sel[i]);
  }
  return out;
}

}  // namespace

CorrelationMatrix evolve(const CorrelationMatrix& C, const Propagator& prop,
                         double t) {
  const int n = prop.dim();
  if (C.rows() != n || C.cols() != n)
    throw std::invalid_argument("correlation matrix does not match propagator");
  if (t == 0.0) return C;

  const Eigen::MatrixXd& W = prop.basis();
  // Y = W^T C W, done on split parts so the products stay real GEMMs
  Eigen::MatrixXd Yr = W.transpose() * (C.real() * W).eval();
  Eigen::MatrixXd Yi = W.transpose() * (C.imag() * W).eval();
  apply_phase_twist(prop.energies(), t, Yr, Yi);
  CorrelationMatrix out(n, n);
  out.real() = W * (Yr * W.transpose()).eval();
  out.imag() = W * (Yi * W.transpose()).eval();
  return out;
}

Eigen::MatrixXd eigenbasis_diagonal_transform(const Propagator& prop,
                                              const Eigen::VectorXd& occupations) {
  if (occupations.size() != prop.dim())
    throw std::invalid_argument("occupation vector does not match propagator");
  const Eigen::MatrixXd& W = prop.basis();
  Eigen::MatrixXd scaled = occupations.asDiagonal() * W;
  return W.transpose() * scaled;
}

CorrelationMatrix evolve_from_eigenbasis(const Propagator& prop,
                                         const Eigen::MatrixXd& G, double t) {
  const int n = prop.dim();
  if (G.rows() != n || G.cols() != n)
    throw std::invalid_argument("eigenbasis matrix does not match propagator");
  Eigen::MatrixXd Yr = G;
  Eigen::MatrixXd Yi = Eigen::MatrixXd::Zero(n, n);
  apply_phase_twist(prop.energies(), t, Yr, Yi);
  const Eigen::MatrixXd& W = prop.basis();
  CorrelationMatrix out(n, n);
  out.real() = W * (Yr * W.transpose()).eval();
  out.imag() = W * (Yi * W.transpose()).eval();
  return out;
}

Eigen::MatrixXcd evolve_block_from_eigenbasis(const Propagator& prop,
                                              const Eigen::MatrixXd& G, double t,
                                              const std::vector<int>& rows,
                                              const std::vector<int>& cols) {
  const int n = prop.dim();
  if (G.rows() != n || G.cols() != n)
    throw std::invalid_argument("eigenbasis matrix does not match propagator");
  Eigen::MatrixXd Yr = G;
  Eigen::MatrixXd Yi = Eigen::MatrixXd::Zero(n, n);
  apply_phase_twist(prop.energies(), t, Yr, Yi);
  const Eigen::MatrixXd Wr = rows_of(prop.basis(), rows);
  const Eigen::MatrixXd Wc = rows_of(prop.basis(), cols);
  Eigen::MatrixXcd out(Wr.rows(), Wc.rows());
  out.real() = Wr * (Yr * Wc.transpose()).eval();
  out.imag() = Wr * (Yi * Wc.transpose()).eval();
  return out;
}

CorrelationMatrix evolve_rk4(const CorrelationMatrix& C,
                             const SingleParticleHamiltonian& h, double t,
                             int steps) {
  if (C.rows() != h.dim() || C.cols() != h.dim())
    throw std::invalid_argument("correlation matrix does not match Hamiltonian");
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  const Eigen::MatrixXcd hc = h.matrix.cast<cplx>();
  const cplx iu(0.0, 1.0);
  auto rhs = [&](const Eigen::MatrixXcd& X) -> Eigen::MatrixXcd {
    return iu * (hc * X - X * hc);
  };
  Eigen::MatrixXcd X = C;
  const double dt = t / steps;
  for (int s = 0; s < steps; ++s) {
    Eigen::MatrixXcd k1 = rhs(X);
    Eigen::MatrixXcd k2 = rhs(X + 0.5 * dt * k1);
    Eigen::MatrixXcd k3 = rhs(X + 0.5 * dt * k2);
    Eigen::MatrixXcd k4 = rhs(X + dt * k3);
    X += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return X;
}

Eigen::VectorXd checkerboard_occupations(const LatticeGeometry& geom) {
  const int N = geom.num_sites();
  Eigen::VectorXd occ(N);
  for (int n = 0; n < N; ++n) {
    auto [r, c] = geom.site_coords(n);
    occ(n) = static_cast<double>((r + c) % 2);
  }
  return occ;
}

CorrelationMatrix init_checkerboard(const LatticeGeometry& geom) {
  return checkerboard_occupations(geom).cast<cplx>().asDiagonal();
}

CorrelationMatrix init_infinite_temperature(int dim) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  return 0.5 * Eigen::MatrixXcd::Identity(dim, dim);
}

Eigen::VectorXd random_pure_bath_occupations(int dim, RngStream& rng) {
  if (dim < 1) throw std::invalid_argument("dimension must be positive");
  Eigen::VectorXd occ(dim);
  for (int i = 0; i < dim; ++i) occ(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
  return occ;
}

CorrelationMatrix init_random_pure_bath(int dim, RngStream& rng) {
  return random_pure_bath_occupations(dim, rng).cast<cplx>().asDiagonal();
}

Eigen::MatrixXcd extract_block(const CorrelationMatrix& C,
                               const std::vector<int>& rows,
                               const std::vector<int>& cols) {
  for (int r : rows)
    if (r < 0 || r >= C.rows()) throw std::out_of_range("row index");
  for (int c : cols)
    if (c < 0 || c >= C.cols()) throw std::out_of_range("column index");
  Eigen::MatrixXcd out(static_cast<Eigen::Index>(rows.size()),
                       static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          C(rows[i], cols[j]);
  return out;
}

}  // namespace fermibath
