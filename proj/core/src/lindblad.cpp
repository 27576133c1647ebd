#include "fermibath/lindblad.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace fermibath {

using cplx = std::complex<double>;

CorrelationMatrix evolve_master_equation(const CorrelationMatrix& C0,
                                         const Propagator& prop, double gamma,
                                         double t) {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  const int n = prop.dim();
  if (C0.rows() != n || C0.cols() != n)
    throw std::invalid_argument("correlation matrix does not match propagator");
  const Eigen::MatrixXcd half = 0.5 * Eigen::MatrixXcd::Identity(n, n);
  CorrelationMatrix rotated = evolve(C0 - half, prop, t);
  return half + std::exp(-2.0 * gamma * t) * rotated;
}

CorrelationMatrix evolve_master_equation(const CorrelationMatrix& C0,
                                         const SingleParticleHamiltonian& h,
                                         double gamma, double t) {
  return evolve_master_equation(C0, Propagator::diagonalize(h), gamma, t);
}

CorrelationMatrix evolve_master_equation_rk4(const CorrelationMatrix& C0,
                                             const SingleParticleHamiltonian& h,
                                             double gamma, double t, int steps) {
  if (gamma < 0.0) throw std::invalid_argument("gamma must be nonnegative");
  if (C0.rows() != h.dim() || C0.cols() != h.dim())
    throw std::invalid_argument("correlation matrix does not match Hamiltonian");
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  const Eigen::MatrixXcd hc = h.matrix.cast<cplx>();
  const Eigen::MatrixXcd half =
      0.5 * Eigen::MatrixXcd::Identity(C0.rows(), C0.cols());
  const cplx iu(0.0, 1.0);
  auto rhs = [&](const Eigen::MatrixXcd& X) -> Eigen::MatrixXcd {
    return iu * (hc * X - X * hc) - 2.0 * gamma * (X - half);
  };
  Eigen::MatrixXcd X = C0;
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

DeviationReport deviation_report(const CorrelationMatrix& C_sys,
                                 const CorrelationMatrix& C_ref) {
  if (C_sys.rows() != C_ref.rows() || C_sys.cols() != C_ref.cols())
    throw std::invalid_argument("deviation report needs equal dimensions");
  DeviationReport rep;
  const Eigen::Index n = C_sys.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == j)
        rep.diag_dev += std::norm(C_sys(i, i) - cplx(0.5, 0.0));
      else
        rep.offdiag_dev += std::norm(C_sys(i, j));
      rep.me_dev += std::norm(C_ref(i, j) - C_sys(i, j));
    }
  }
  return rep;
}

}  // namespace fermibath
