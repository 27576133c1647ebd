#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fermibath/gaussian.hpp"
#include "fermibath/lattice.hpp"

namespace fermibath {

// S = -sum_k [nu ln nu + (1-nu) ln(1-nu)] over the block's eigenvalues,
// natural logarithm, 0 ln 0 = 0. Eigenvalues outside [-1e-9, 1+1e-9] abort;
// smaller excursions are clamped into [0, 1].
double von_neumann_entropy(const CorrelationMatrix& block);
double entropy_from_spectrum(const Eigen::VectorXd& occupations);

// Eigenvalues entering the negativity: mu of Gamma_* and lambda of C.
// C must be in L/R order with the first n_left modes on the left.
struct NegativitySpectra {
  Eigen::VectorXd mu;
  Eigen::VectorXd lambda;
};
NegativitySpectra negativity_spectra(const CorrelationMatrix& C_lr, int n_left);
double negativity_from_spectra(const NegativitySpectra& spectra);

// E = sum_j [ ln(sqrt(mu_j) + sqrt(1-mu_j)) + 1/2 ln(1 - 2 lambda_j + 2 lambda_j^2) ].
// The second term carries the logarithm: without it an uncorrelated pure
// product state would come out with nonzero negativity. Pinned against the
// dense partial-transpose oracle in the tests.
double log_fermionic_negativity(const CorrelationMatrix& C_lr, int n_left);
double log_fermionic_negativity(const CorrelationMatrix& C_lr,
                                const ModeLayout& layout);

// I = S(C_LL) + S(C_RR) - S(C)
double mutual_information(const CorrelationMatrix& C_lr, int n_left);
double mutual_information(const CorrelationMatrix& C_lr, const ModeLayout& layout);

// Squared Frobenius weight of the cross-partition block, split by mode kind.
// `sb` averages the two cross orientations (system-left/bath-right and
// bath-left/system-right) so that total = ss + 2*sb + bb holds exactly.
struct CorrelationWeights {
  double total = 0.0;
  double ss = 0.0;
  double sb = 0.0;
  double bb = 0.0;
};
CorrelationWeights connected_correlation_weight(const CorrelationMatrix& C_lr,
                                                const ModeLayout& layout);
// Same weights from just the upper-right L/R block (rows = left modes in
// canonical order, columns = right modes in canonical order).
CorrelationWeights correlation_weights_from_lr_block(
    const Eigen::MatrixXcd& lr_block, const ModeLayout& layout);

// Steady-state bath density-density correlation versus city-block distance,
// averaged over unordered site pairs; on-site (d = 0) terms skip m = m'.
// Input is the full correlation matrix in canonical order.
struct BathDistanceCorrelation {
  std::vector<double> value;        // indexed by distance d = 0 .. 2(L-1)
  std::vector<long long> n_pairs;   // unordered pair count at each distance
};
BathDistanceCorrelation bath_density_correlation(const CorrelationMatrix& C,
                                                 const LatticeGeometry& geom,
                                                 const ModeLayout& layout);

}  // namespace fermibath
