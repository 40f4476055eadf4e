#include "wavest/semidiscrete.hpp"

#include <cmath>

#include "wavest/errors.hpp"

namespace wavest {

Nonlinearity Nonlinearity::none() { return Nonlinearity{}; }

Nonlinearity Nonlinearity::sine_gordon(double c2) {
  Nonlinearity n;
  n.kind = Kind::SineGordon;
  n.coefficient = c2;
  n.g = [c2](double u) { return c2 * std::sin(u); };
  n.G = [c2](double u) { return c2 * (1.0 - std::cos(u)); };
  n.dg = [c2](double u) { return c2 * std::cos(u); };
  n.label = "sine-gordon";
  return n;
}

Nonlinearity Nonlinearity::klein_gordon_linear(double c2) {
  Nonlinearity n;
  n.kind = Kind::KleinGordonLinear;
  n.coefficient = c2;
  n.g = [c2](double u) { return c2 * u; };
  n.G = [c2](double u) { return 0.5 * c2 * u * u; };
  n.dg = [c2](double) { return c2; };
  n.label = "klein-gordon-linear";
  return n;
}

Nonlinearity Nonlinearity::klein_gordon_defocusing(double c2, double rho) {
  if (!(rho > 0.0)) throw DomainError("Klein-Gordon exponent must be positive");
  Nonlinearity n;
  n.kind = Kind::KleinGordonDefocusing;
  n.coefficient = c2;
  n.exponent = rho;
  n.g = [c2, rho](double u) { return c2 * c2 * u + c2 * std::pow(std::abs(u), rho) * u; };
  n.G = [c2, rho](double u) {
    return 0.5 * c2 * c2 * u * u + c2 * std::pow(std::abs(u), rho + 2.0) / (rho + 2.0);
  };
  n.dg = [c2, rho](double u) { return c2 * c2 + c2 * (rho + 1.0) * std::pow(std::abs(u), rho); };
  n.label = "klein-gordon-defocusing";
  return n;
}

Nonlinearity Nonlinearity::custom(ScalarFn g, ScalarFn G, std::string label) {
  if (!g || !G) throw DomainError("custom nonlinearity needs both g and G");
  Nonlinearity n;
  n.kind = Kind::Custom;
  n.g = std::move(g);
  n.G = std::move(G);
  n.label = std::move(label);
  return n;
}

Nonlinearity Nonlinearity::scaled(double eps) const {
  if (is_zero()) return *this;
  Nonlinearity n = *this;
  n.g = [g = g, eps](double u) { return eps * g(u); };
  n.G = [G = G, eps](double u) { return eps * G(u); };
  if (dg) n.dg = [dg = dg, eps](double u) { return eps * dg(u); };
  n.coefficient *= eps;
  return n;
}

Eigen::VectorXd SemiDiscreteSystem::N(const Eigen::VectorXd& u) const {
  return nonlinear ? nonlinear(u) : Eigen::VectorXd::Zero(u.size());
}

Eigen::VectorXd SemiDiscreteSystem::F(double t) const {
  return load ? load(t) : Eigen::VectorXd::Zero(size());
}

Eigen::VectorXd SemiDiscreteSystem::force(const Eigen::VectorXd& u, double t) const {
  Eigen::VectorXd r = -(K * u);
  if (load) r += load(t);
  if (nonlinear) r -= nonlinear(u);
  return r;
}

SemiDiscreteSystem SemiDiscreteSystem::from_problem(const WaveProblem& problem, const Nonlinearity& g) {
  return from_problem(problem, g, assemble_spatial(problem.space, problem.c));
}

SemiDiscreteSystem SemiDiscreteSystem::from_problem(const WaveProblem& problem, const Nonlinearity& g,
                                                    const SpatialOperators& ops) {
  SemiDiscreteSystem s;
  s.M = ops.mass;
  s.K = ops.stiffness;
  s.mass_solver = ops.mass_solver;
  const SpatialMesh1D mesh = problem.space;
  if (!g.is_zero()) {
    s.nonlinear = [mesh, fn = g.g](const Eigen::VectorXd& u) { return nonlinear_load(mesh, u, fn); };
    s.potential = [mesh, fn = g.G](const Eigen::VectorXd& u) { return potential_integral(mesh, u, fn); };
  }
  if (problem.F) {
    s.load = [mesh, F = problem.F](double t) {
      return load_vector(mesh, [&](double x) { return F(x, t); });
    };
  }
  return s;
}

SemiDiscreteSystem SemiDiscreteSystem::from_matrices(const Eigen::MatrixXd& M, const Eigen::MatrixXd& K) {
  if (M.rows() != M.cols() || K.rows() != K.cols() || M.rows() != K.rows())
    throw DomainError("mass and stiffness must be square with equal size");
  SemiDiscreteSystem s;
  s.M = M.sparseView();
  s.K = K.sparseView();
  auto solver = std::make_shared<Eigen::SimplicialLLT<SpMat>>(s.M);
  if (solver->info() != Eigen::Success) throw NumericalError("mass matrix is not positive definite", 0);
  s.mass_solver = std::move(solver);
  return s;
}

ScalarFn initial_gradient(const WaveProblem& problem) {
  if (problem.dU0) return problem.dU0;
  if (!problem.U0) return [](double) { return 0.0; };
  return [U0 = problem.U0](double x) {
    const double h = 1e-5 * std::max(1.0, std::abs(x));
    return (U0(x + h) - U0(x - h)) / (2.0 * h);
  };
}

}  // namespace wavest
