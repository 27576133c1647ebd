#pragma once

// Dense Fock-space machinery used as an independent oracle in the tests.
// Everything here works on the full 2^n-dimensional Hilbert space with
// Jordan-Wigner operators (mode k lives on bit k of the basis index), so it
// shares no code path with the correlation-matrix implementation it checks.

#include <Eigen/Dense>
#include <vector>

namespace fock {

// c_k with the Jordan-Wigner string on modes below k
Eigen::MatrixXcd annihilation_op(int mode, int n_modes);
Eigen::MatrixXcd creation_op(int mode, int n_modes);
Eigen::MatrixXcd number_op(int mode, int n_modes);

Eigen::VectorXcd vacuum(int n_modes);

// Slater determinant over the given orthonormal single-particle orbitals
// (columns of `orbitals`); normalized.
Eigen::VectorXcd slater_state(const Eigen::MatrixXcd& orbitals, int n_modes);

// rho of the number-conserving Gaussian state with correlation matrix C;
// asserts Tr(rho c_i^dag c_j) reproduces C before returning.
Eigen::MatrixXcd gaussian_density_matrix(const Eigen::MatrixXcd& C);

Eigen::MatrixXcd correlation_from_state(const Eigen::VectorXcd& psi);
Eigen::MatrixXcd correlation_from_density(const Eigen::MatrixXcd& rho);

// conventional partial transpose over the first n_left modes (low bits)
Eigen::MatrixXcd partial_transpose_left(const Eigen::MatrixXcd& rho, int n_left,
                                        int n_modes);

double trace_norm(const Eigen::MatrixXcd& hermitian);
double entropy(const Eigen::MatrixXcd& rho);

// exp(-i H t) for the quadratic Hamiltonian sum_ij h_ij c_i^dag c_j
Eigen::MatrixXcd evolution_op(const Eigen::MatrixXd& h, double t);

// random Haar-ish unitary and Gaussian states with reproducible draws
Eigen::MatrixXcd random_unitary(int n, std::uint64_t seed);
struct RandomGaussian {
  Eigen::MatrixXcd C;
  Eigen::MatrixXcd rho;  // same state, dense
};
RandomGaussian random_mixed_state(int n_modes, std::uint64_t seed);
struct RandomPure {
  Eigen::MatrixXcd C;
  Eigen::VectorXcd psi;
};
RandomPure random_pure_state(int n_modes, int n_particles, std::uint64_t seed);

}  // namespace fock
