#pragma once

#include "fermibath/gaussian.hpp"
#include "fermibath/lattice.hpp"

namespace fermibath {

// Steady-state deviation diagnostics. None of the sums is normalized per site.
struct DeviationReport {
  double diag_dev = 0.0;     // sum_n |C_nn - 1/2|^2          (first argument)
  double offdiag_dev = 0.0;  // sum_{n != n'} |C_nn'|^2       (first argument)
  double me_dev = 0.0;       // sum_{nn'} |C - C_ref|^2 between the two
};

// Master-equation evolution for equal gain/loss rate gamma on every site.
// The dissipator acts as a uniform affine contraction toward 1/2, which
// commutes with the unitary rotation, so the evolution is closed-form:
//   C(t) = 1/2 + exp(-2 gamma t) * U_t[C0 - 1/2].
// Validated against the RK4 integrator below before being trusted.
CorrelationMatrix evolve_master_equation(const CorrelationMatrix& C0,
                                         const Propagator& prop, double gamma,
                                         double t);
CorrelationMatrix evolve_master_equation(const CorrelationMatrix& C0,
                                         const SingleParticleHamiltonian& h,
                                         double gamma, double t);

// Fixed-step RK4 of dC/dt = i[h, C] - 2 gamma (C - 1/2); cross-validation only.
CorrelationMatrix evolve_master_equation_rk4(const CorrelationMatrix& C0,
                                             const SingleParticleHamiltonian& h,
                                             double gamma, double t, int steps);

DeviationReport deviation_report(const CorrelationMatrix& C_sys,
                                 const CorrelationMatrix& C_ref);

}  // namespace fermibath
