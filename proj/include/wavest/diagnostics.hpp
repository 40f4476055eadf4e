#pragma once

// Energy traces, error norms against exact solutions, EOC and blow-up detection.

#include <optional>
#include <string>
#include <vector>

#include "wavest/solver_linear.hpp"

namespace wavest {

enum class EnergyVariant { LinearNodal, SemilinearNodal, Hamiltonian };
/// Velocity used at the temporal nodes: the reconstruction Vtilde, the one-sided time
/// derivative of U_h (left limit, right limit at t_0), or the marching flux M^{-1} q.
enum class VelocitySource { Reconstruction, RawTimeDerivative, Flux };

std::string to_string(EnergyVariant v);
std::string to_string(VelocitySource v);

struct EnergyTrace {
  std::vector<double> times;
  std::vector<double> values;
  EnergyVariant variant = EnergyVariant::LinearNodal;
  VelocitySource source = VelocitySource::Reconstruction;
  std::optional<std::size_t> blowup_slab;
  bool potential_inexact = false;  // G-integral evaluated by quadrature of a non-polynomial

  /// max_j |E_j - E_0| / |E_0| (absolute drift when E_0 = 0).
  double max_relative_drift() const;
  double max_abs_drift() const;
  /// max_j E_j / E_0.
  double growth() const;
};

/// Spatial integrals by p_x+4 Gauss points per element. g is used for the SemilinearNodal
/// and Hamiltonian variants.
EnergyTrace energy_trace(const SolutionBundle& sol, const WaveProblem& problem, EnergyVariant variant,
                         VelocitySource source, const Nonlinearity& g = Nonlinearity::none());

struct ErrorReport {
  double c0_l2_u = 0.0;
  double c0_l2_v = 0.0;
  double l2l2_dtu = 0.0;
  double c0_l2_gradu = 0.0;
  double h_t = 0.0;
  double h_x = 0.0;
  int p_t = 0;
  int p_x = 0;
};

inline const std::vector<std::string>& norm_names() {
  static const std::vector<std::string> names{"C0_L2_U", "C0_L2_V", "L2L2_dtU", "C0_L2_gradU"};
  return names;
}
double norm_value(const ErrorReport& r, const std::string& name);

/// C0 norms sampled at slab endpoints and p_t+3 Gauss points per slab; the L2L2 norm by
/// (p_t+4) x (p_x+4) tensor quadrature. The velocity is sol.V (reconstructed on demand).
/// dxU may be empty, in which case c0_l2_gradu is NaN.
ErrorReport error_norms(const SolutionBundle& sol, const ExactSolution& exact);

/// rate_k = log(e_k / e_{k+1}) / log(h_k / h_{k+1}).
std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors);

/// Column j of trace holds the state at t_j; returns the first j whose sup-norm exceeds
/// threshold or that holds a non-finite value.
std::optional<std::size_t> detect_blowup(const Eigen::MatrixXd& trace, double threshold = kBlowupThreshold);

/// The velocity Vtilde of a bundle: sol.V if present, else reconstructed from U.
SpaceTimeSolution velocity_of(const SolutionBundle& sol);

}  // namespace wavest
