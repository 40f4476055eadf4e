#include "wavest/solver_linear.hpp"

#include <cmath>
#include <limits>

#include "wavest/errors.hpp"
#include "wavest/projection.hpp"

namespace wavest {
namespace {

bool exceeded(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) return true;
  return x.size() > 0 && x.cwiseAbs().maxCoeff() > kBlowupThreshold;
}

void fill_nan(Eigen::MatrixXd& m, Eigen::Index from_col) {
  if (from_col < m.cols())
    m.rightCols(m.cols() - from_col).setConstant(std::numeric_limits<double>::quiet_NaN());
}

}  // namespace

InitialData project_initial_data(const WaveProblem& problem, const SpatialOperators& ops) {
  return {project_initial_displacement(problem, ops), project_initial_velocity(problem, ops)};
}

SolutionBundle march(const WaveProblem& problem, const Nonlinearity& g, MethodId method, const FixedPointConfig& fp) {
  fp.validate();
  const SpatialOperators ops = assemble_spatial(problem.space, problem.c);
  const SemiDiscreteSystem sys = SemiDiscreteSystem::from_problem(problem, g, ops);
  const InitialData init = project_initial_data(problem, ops);
  const TemporalMesh& tm = problem.time;
  const int p = tm.degree();
  const Eigen::Index n = problem.space.dofs();

  SolutionBundle out;
  out.method = method;
  out.U0h = init.u0;
  out.V0h = init.v0;
  out.iterations.reserve(tm.slabs());
  Eigen::MatrixXd U(n, tm.dofs());
  Eigen::MatrixXd Vn(n, tm.slabs() + 1);
  U.col(0) = init.u0;
  Vn.col(0) = init.v0;

  if (method == MethodId::DgCgFirstOrder) {
    const DgCgStepper stepper(sys, p, fp);
    Eigen::MatrixXd V(n, tm.dofs());
    V.col(0) = init.v0;
    Eigen::VectorXd u = init.u0;
    Eigen::VectorXd v = init.v0;
    for (int s = 0; s < tm.slabs(); ++s) {
      const auto st = stepper.step(u, v, tm.nodes()[s], tm.width(s), s + 1);
      out.iterations.push_back(st.iterations);
      U.middleCols(static_cast<Eigen::Index>(s) * p, p + 1) = st.u;
      V.middleCols(static_cast<Eigen::Index>(s) * p, p + 1) = st.v;
      u = st.u.col(p);
      v = st.v.col(p);
      Vn.col(s + 1) = v;
      if (exceeded(u) || exceeded(v)) {
        out.blowup_slab = static_cast<std::size_t>(s + 1);
        fill_nan(U, static_cast<Eigen::Index>(s + 1) * p + 1);
        fill_nan(V, static_cast<Eigen::Index>(s + 1) * p + 1);
        fill_nan(Vn, s + 2);
        break;
      }
    }
    out.U = SpaceTimeSolution(problem.space, tm, p, SpaceTag::Continuous, std::move(U));
    if (!out.blew_up()) out.V = SpaceTimeSolution(problem.space, tm, p, SpaceTag::Continuous, std::move(V));
    out.node_velocity = std::move(Vn);
    return out;
  }

  const SecondOrderStepper stepper(sys, method, p, fp);
  Eigen::VectorXd u = init.u0;
  Eigen::VectorXd q = sys.M * init.v0;
  for (int s = 0; s < tm.slabs(); ++s) {
    const auto st = stepper.step(u, q, tm.nodes()[s], tm.width(s), s + 1);
    out.iterations.push_back(st.iterations);
    U.middleCols(static_cast<Eigen::Index>(s) * p, p + 1) = st.nodes;
    u = st.nodes.col(p);
    q = st.q;
    Vn.col(s + 1) = sys.solve_mass(q);
    if (exceeded(u) || exceeded(q)) {
      out.blowup_slab = static_cast<std::size_t>(s + 1);
      fill_nan(U, static_cast<Eigen::Index>(s + 1) * p + 1);
      fill_nan(Vn, s + 2);
      break;
    }
  }
  out.U = SpaceTimeSolution(problem.space, tm, p, SpaceTag::Continuous, std::move(U));
  if (!out.blew_up()) out.V = reconstruct_velocity(time_derivative(out.U), problem.space, init.v0);
  out.node_velocity = std::move(Vn);
  return out;
}

SolutionBundle solve_stabilized(const WaveProblem& problem) {
  return march(problem, Nonlinearity::none(), MethodId::Stabilized2nd, {});
}

SolutionBundle solve_unstabilized(const WaveProblem& problem) {
  return march(problem, Nonlinearity::none(), MethodId::Unstabilized, {});
}

SolutionBundle solve_dgcg_first_order(const WaveProblem& problem) {
  return march(problem, Nonlinearity::none(), MethodId::DgCgFirstOrder, {});
}

SolutionBundle crank_nicolson_reference(const WaveProblem& problem) {
  const TemporalMesh& tm = problem.time;
  if (tm.degree() != 1) throw DomainError("Crank-Nicolson reference requires p_t = 1");
  const SpatialOperators ops = assemble_spatial(problem.space, problem.c);
  const InitialData init = project_initial_data(problem, ops);
  const Eigen::Index n = problem.space.dofs();
  const QuadratureRule rule = gauss_legendre_rule(5);

  SolutionBundle out;
  out.method = MethodId::Stabilized2nd;
  out.U0h = init.u0;
  out.V0h = init.v0;
  Eigen::MatrixXd U(n, tm.dofs());
  Eigen::MatrixXd V(n, tm.slabs() + 1);
  U.col(0) = init.u0;
  V.col(0) = init.v0;
  Eigen::VectorXd u = init.u0;
  Eigen::VectorXd v = init.v0;
  std::map<double, std::unique_ptr<Eigen::SparseLU<SpMat>>> cache;
  for (int s = 0; s < tm.slabs(); ++s) {
    const double h = tm.width(s);
    auto it = cache.find(h);
    if (it == cache.end()) {
      SpMat L = (2.0 / h) * ops.mass + (0.5 * h) * ops.stiffness;
      auto lu = std::make_unique<Eigen::SparseLU<SpMat>>();
      lu->compute(L);
      if (lu->info() != Eigen::Success) throw NumericalError("Crank-Nicolson factorization failed", s + 1);
      it = cache.emplace(h, std::move(lu)).first;
    }
    Eigen::VectorXd rhs = (2.0 / h) * (ops.mass * u) - (0.5 * h) * (ops.stiffness * u) + 2.0 * (ops.mass * v);
    if (problem.F) {
      const double t0 = tm.nodes()[s];
      Eigen::VectorXd fbar = Eigen::VectorXd::Zero(n);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = t0 + h * rule.nodes[q];
        fbar += rule.weights[q] * load_vector(problem.space, [&](double x) { return problem.F(x, t); });
      }
      rhs += h * fbar;
    }
    const Eigen::VectorXd u1 = it->second->solve(rhs);
    v = 2.0 * (u1 - u) / h - v;
    u = u1;
    U.col(s + 1) = u;
    V.col(s + 1) = v;
  }
  out.U = SpaceTimeSolution(problem.space, tm, 1, SpaceTag::Continuous, std::move(U));
  out.node_velocity = std::move(V);
  out.iterations.assign(tm.slabs(), 1);
  return out;
}

}  // namespace wavest
