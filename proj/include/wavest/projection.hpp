#pragma once

// Slab-wise temporal L2 projection onto discontinuous degree p_t-1, Gauss-Legendre
// interpolation, initial-data projections, velocity reconstruction and the
// postprocessed displacement.

#include <Eigen/Dense>
#include <functional>

#include "wavest/mesh_spaces.hpp"
#include "wavest/semidiscrete.hpp"

namespace wavest {

using TimeFn = std::function<Eigen::VectorXd(double)>;

/// Function in dS_{h_t}^{p_t} (degree p_t-1 per slab, discontinuous) with vector values.
/// Column n*p_t + r holds the coefficient of the endpoint-normalized Legendre
/// polynomial L_r on slab n.
struct DgCoefficients {
  TemporalMesh mesh;
  Eigen::MatrixXd coeffs;

  int per_slab() const { return mesh.degree(); }
  Eigen::Index rows() const { return coeffs.rows(); }
  /// Value inside slab n at reference time tau in [0,1].
  Eigen::VectorXd slab_value(int n, double tau) const;
  /// Value at t; at interior nodes the right limit is returned unless from_left.
  Eigen::VectorXd at(double t, bool from_left = false) const;
};

/// Legendre coefficients (r = 0..deg) of the polynomial with the given values at the
/// deg+1 Gauss-Lobatto nodes of (0,1): returns T with c = T * values.
Eigen::MatrixXd nodal_to_legendre(int deg);
/// Inverse map: values at the Gauss-Lobatto nodes from Legendre coefficients.
Eigen::MatrixXd legendre_to_nodal(int deg);

/// Slab-wise L2 projection; p_t+8 Gauss points per slab for general functions.
DgCoefficients project_dg(const TimeFn& u, const TemporalMesh& mesh);
DgCoefficients project_dg(const SpaceTimeSolution& u);
/// Slab-wise Lagrange interpolant at the p_t Gauss-Legendre nodes.
DgCoefficients interpolate_gl(const TimeFn& u, const TemporalMesh& mesh);
/// Exact time derivative of a continuous solution of degree p_t.
DgCoefficients time_derivative(const SpaceTimeSolution& u);

/// Solve K u = (c^2 U0', phi').
Eigen::VectorXd project_initial_displacement(const WaveProblem& problem, const SpatialOperators& ops);
/// Solve M v = (V0, phi).
Eigen::VectorXd project_initial_velocity(const WaveProblem& problem, const SpatialOperators& ops);

/// The continuous degree-p_t function V with V(0) = V0h and Pi V = dtU.
SpaceTimeSolution reconstruct_velocity(const DgCoefficients& dtU, const SpatialMesh1D& space,
                                       const Eigen::VectorXd& V0h);
/// U*(t) = U0h + int_0^t Vtilde, of degree p_t+1 per slab.
SpaceTimeSolution postprocess_displacement(const SpaceTimeSolution& Vtilde, const Eigen::VectorXd& U0h);

/// Legendre coefficients of slab n of a continuous solution, (rows, degree+1).
Eigen::MatrixXd slab_legendre(const SpaceTimeSolution& u, int n);

}  // namespace wavest
