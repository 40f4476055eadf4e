#pragma once

// Semilinear drivers and the reference-integrator wrappers that return the same bundle.

#include "wavest/rk_reference.hpp"
#include "wavest/solver_linear.hpp"

namespace wavest {

/// Any MethodId. The two reference integrators are run on the semi-discrete system with
/// s = p_t (Gauss) or s = p_t + 1 (Lobatto IIIA/IIIB); their displacement polynomials
/// are stored as U, the nodal velocities as node_velocity.
SolutionBundle solve_semilinear(const WaveProblem& problem, const Nonlinearity& g, MethodId method,
                                const FixedPointConfig& fp = {});

struct EquivalenceReport {
  double u_discrepancy = 0.0;  // max |U_stab - U_dgcg| over all coefficients
  double v_discrepancy = 0.0;  // max over Legendre coefficients of Pi(Vtilde) - Pi(V)
  double scale = 0.0;          // max(|U|, |V|) of the stabilized run
};

/// Runs Stabilized2nd and DgCgFirstOrder with the same settings and compares.
EquivalenceReport semilinear_equivalence_check(const WaveProblem& problem, const Nonlinearity& g,
                                               const FixedPointConfig& fp = {});

}  // namespace wavest
