#pragma once

// Problem data and the spatially semi-discrete system M u'' + K u + N(u) = F(t).

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>

#include "wavest/mesh_spaces.hpp"

namespace wavest {

struct Nonlinearity {
  enum class Kind { None, SineGordon, KleinGordonLinear, KleinGordonDefocusing, Custom };

  Kind kind = Kind::None;
  ScalarFn g;   // g(u)
  ScalarFn G;   // primitive, G(0) = 0
  ScalarFn dg;  // g'(u), optional
  double coefficient = 0.0;
  double exponent = 0.0;
  std::string label = "none";

  bool is_zero() const { return kind == Kind::None; }

  static Nonlinearity none();
  /// g(u) = c2 sin u, G(u) = c2 (1 - cos u).
  static Nonlinearity sine_gordon(double c2 = 1.0);
  /// g(u) = c2 u.
  static Nonlinearity klein_gordon_linear(double c2);
  /// g(u) = c2^2 u + c2 |u|^rho u.
  static Nonlinearity klein_gordon_defocusing(double c2, double rho);
  static Nonlinearity custom(ScalarFn g, ScalarFn G, std::string label = "custom");

  /// eps * g, with primitive eps * G.
  Nonlinearity scaled(double eps) const;
};

struct ExactSolution {
  SpaceTimeFn U;
  SpaceTimeFn dtU;
  SpaceTimeFn dxU;  // optional
};

struct WaveProblem {
  SpatialMesh1D space;
  TemporalMesh time;
  ScalarFn c = [](double) { return 1.0; };
  SpaceTimeFn F;     // empty means F = 0
  ScalarFn U0;       // empty means 0
  ScalarFn dU0;      // derivative of U0; finite differences if empty
  ScalarFn V0;       // empty means 0
  Nonlinearity g;    // default for solve_semilinear callers that do not pass one
  std::optional<ExactSolution> exact;
  std::string name = "custom";

  bool has_source() const { return static_cast<bool>(F); }
};

/// M u'' + K u + N(u) = F(t) on the interior spatial DOFs.
struct SemiDiscreteSystem {
  SpMat M;
  SpMat K;
  std::shared_ptr<const Eigen::SimplicialLLT<SpMat>> mass_solver;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> nonlinear;  // empty: N = 0
  std::function<double(const Eigen::VectorXd&)> potential;           // integral of G(u_h)
  std::function<Eigen::VectorXd(double)> load;                       // empty: F = 0

  Eigen::Index size() const { return M.rows(); }
  bool linear() const { return !nonlinear; }
  Eigen::VectorXd solve_mass(const Eigen::VectorXd& b) const { return mass_solver->solve(b); }
  Eigen::VectorXd N(const Eigen::VectorXd& u) const;
  Eigen::VectorXd F(double t) const;
  /// F(t) - K u - N(u).
  Eigen::VectorXd force(const Eigen::VectorXd& u, double t) const;

  static SemiDiscreteSystem from_problem(const WaveProblem& problem, const Nonlinearity& g);
  static SemiDiscreteSystem from_problem(const WaveProblem& problem, const Nonlinearity& g,
                                         const SpatialOperators& ops);
  /// Raw matrices, e.g. a scalar oscillator M = 1, K = omega^2.
  static SemiDiscreteSystem from_matrices(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K);
};

/// Derivative of U0 for the elliptic projection: dU0 when given, else central differences.
ScalarFn initial_gradient(const WaveProblem& problem);

}  // namespace wavest
