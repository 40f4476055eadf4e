#pragma once

// Time marching for the linear schemes and the common solution bundle.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "wavest/mesh_spaces.hpp"
#include "wavest/semidiscrete.hpp"
#include "wavest/slab_scheme.hpp"

namespace wavest {

/// Sup-norm above which a marching run is declared blown up.
inline constexpr double kBlowupThreshold = 1e10;

struct SolutionBundle {
  MethodId method = MethodId::Stabilized2nd;
  SpaceTimeSolution U;
  /// Continuous-in-time velocity: the reconstruction for the second-order schemes,
  /// the computed V for DG-CG. Absent after a blow-up and for the RK references.
  std::optional<SpaceTimeSolution> V;
  /// Velocity at the temporal mesh nodes carried by the marching state: M^{-1} q_n for
  /// the second-order schemes, V(t_n) for DG-CG and the RK references. (n, N_t+1).
  Eigen::MatrixXd node_velocity;
  Eigen::VectorXd U0h;
  Eigen::VectorXd V0h;
  std::vector<int> iterations;  // per slab
  /// 1-based index of the first slab whose end value exceeded the threshold or was not finite.
  std::optional<std::size_t> blowup_slab;

  bool blew_up() const { return blowup_slab.has_value(); }
};

/// Discrete initial data (elliptic projection of U0, L2 projection of V0).
struct InitialData {
  Eigen::VectorXd u0;
  Eigen::VectorXd v0;
};
InitialData project_initial_data(const WaveProblem& problem, const SpatialOperators& ops);

/// Shared marching driver for the second-order schemes and DG-CG.
SolutionBundle march(const WaveProblem& problem, const Nonlinearity& g, MethodId method, const FixedPointConfig& fp);

SolutionBundle solve_stabilized(const WaveProblem& problem);
SolutionBundle solve_unstabilized(const WaveProblem& problem);
SolutionBundle solve_dgcg_first_order(const WaveProblem& problem);
/// Crank-Nicolson on (M, K) with the slab mean of F; requires p_t = 1.
SolutionBundle crank_nicolson_reference(const WaveProblem& problem);

}  // namespace wavest
