#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fermibath/lattice.hpp"
#include "fermibath/rng.hpp"

namespace fermibath {

// C_ij = <c_i^dag c_j>; Hermitian with spectrum in [0, 1].
using CorrelationMatrix = Eigen::MatrixXcd;

bool is_hermitian(const CorrelationMatrix& C, double tol = 1e-10);
// max |(C^2 - C)_ij|; zero for pure Gaussian states
double purity_deviation(const CorrelationMatrix& C);
bool is_pure(const CorrelationMatrix& C, double tol = 1e-8);
// throws NumericalError if any eigenvalue leaves [-tol, 1+tol]
void check_correlation_spectrum(const CorrelationMatrix& C, double tol = 1e-9);
// averages C with its adjoint in place
void resymmetrize(CorrelationMatrix& C);

// Cached eigendecomposition of a single-particle Hamiltonian,
// h = W diag(eps) W^T with orthogonal W. Read-only after construction and
// shareable across threads.
class Propagator {
 public:
  static Propagator diagonalize(const SingleParticleHamiltonian& h);

  int dim() const { return static_cast<int>(energies_.size()); }
  const Eigen::MatrixXd& basis() const { return basis_; }
  const Eigen::VectorXd& energies() const { return energies_; }

  // R(t) = exp(-i h t)
  Eigen::MatrixXcd unitary(double t) const;
  // R(t)(:, cols), cheaper than the full unitary when few columns are needed
  Eigen::MatrixXcd unitary_columns(double t, const std::vector<int>& cols) const;

 private:
  Eigen::MatrixXd basis_;
  Eigen::VectorXd energies_;
};

// Exact one-shot propagation C(t) = R(t)^dag C R(t) with R = exp(-i h t).
// The index convention is pinned by the two-site transfer test:
// h = [[0,-J],[-J,0]], C = diag(1,0) maps to diag(0,1) at t = pi/(2J).
CorrelationMatrix evolve(const CorrelationMatrix& C, const Propagator& prop,
                         double t);

// Propagation of diagonal initial data to isolated times: build
// G = W^T diag(occ) W once, then each sample time costs one back-transform.
Eigen::MatrixXd eigenbasis_diagonal_transform(const Propagator& prop,
                                              const Eigen::VectorXd& occupations);
CorrelationMatrix evolve_from_eigenbasis(const Propagator& prop,
                                         const Eigen::MatrixXd& G, double t);
// Selected block of the same result: C(t)(rows, cols).
Eigen::MatrixXcd evolve_block_from_eigenbasis(const Propagator& prop,
                                              const Eigen::MatrixXd& G, double t,
                                              const std::vector<int>& rows,
                                              const std::vector<int>& cols);

// Fixed-step RK4 of dC/dt = i[h, C]; cross-validation of `evolve` only.
CorrelationMatrix evolve_rk4(const CorrelationMatrix& C,
                             const SingleParticleHamiltonian& h, double t,
                             int steps);

// Half-filled pure product state with occupation (row+col) mod 2.
CorrelationMatrix init_checkerboard(const LatticeGeometry& geom);
Eigen::VectorXd checkerboard_occupations(const LatticeGeometry& geom);

// C = 1/2 on every mode.
CorrelationMatrix init_infinite_temperature(int dim);

// Diagonal pure state with i.i.d. Bernoulli(1/2) occupations,
// drawn in ascending mode order.
CorrelationMatrix init_random_pure_bath(int dim, RngStream& rng);
Eigen::VectorXd random_pure_bath_occupations(int dim, RngStream& rng);

// Submatrix copy C(rows, cols); throws std::out_of_range on bad indices.
Eigen::MatrixXcd extract_block(const CorrelationMatrix& C,
                               const std::vector<int>& rows,
                               const std::vector<int>& cols);

}  // namespace fermibath
