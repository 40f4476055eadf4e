#include "wavest/solver_semilinear.hpp"

#include <cmath>
#include <limits>

#include "wavest/errors.hpp"
#include "wavest/projection.hpp"

namespace wavest {
namespace {

SolutionBundle run_reference(const WaveProblem& problem, const Nonlinearity& g, MethodId method,
                             const FixedPointConfig& fp) {
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
  Eigen::MatrixXd U(n, tm.dofs());
  Eigen::MatrixXd Vn(n, tm.slabs() + 1);
  U.col(0) = init.u0;
  Vn.col(0) = init.v0;

  const bool gauss = method == MethodId::GaussRkReference;
  const GaussRkIntegrator gi(sys, gauss ? p : 1, fp);
  const LobattoIIIABIntegrator li(sys, gauss ? 2 : p + 1, fp);
  OdeState st{init.u0, init.v0};
  for (int s = 0; s < tm.slabs(); ++s) {
    RkStep r;
    try {
      r = gauss ? gi.step(st, tm.nodes()[s], tm.width(s)) : li.step(st, tm.nodes()[s], tm.width(s));
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(static_cast<std::size_t>(s + 1), e.residual(), fp.max_iterations);
    }
    st = r.next;
    out.iterations.push_back(r.iterations);
    U.middleCols(static_cast<Eigen::Index>(s) * p, p + 1) = r.slab;
    Vn.col(s + 1) = st.v;
    const double sup = std::max(st.u.cwiseAbs().maxCoeff(), st.v.cwiseAbs().maxCoeff());
    if (!st.u.allFinite() || !st.v.allFinite() || sup > kBlowupThreshold) {
      out.blowup_slab = static_cast<std::size_t>(s + 1);
      const Eigen::Index from = static_cast<Eigen::Index>(s + 1) * p + 1;
      U.rightCols(U.cols() - from).setConstant(std::numeric_limits<double>::quiet_NaN());
      if (s + 2 < Vn.cols()) Vn.rightCols(Vn.cols() - s - 2).setConstant(std::numeric_limits<double>::quiet_NaN());
      break;
    }
  }
  out.U = SpaceTimeSolution(problem.space, tm, p, SpaceTag::Continuous, std::move(U));
  out.node_velocity = std::move(Vn);
  return out;
}

}  // namespace

SolutionBundle solve_semilinear(const WaveProblem& problem, const Nonlinearity& g, MethodId method,
                                const FixedPointConfig& fp) {
  fp.validate();
  if (method == MethodId::GaussRkReference || method == MethodId::LobattoIIIABReference)
    return run_reference(problem, g, method, fp);
  return march(problem, g, method, fp);
}

EquivalenceReport semilinear_equivalence_check(const WaveProblem& problem, const Nonlinearity& g,
                                               const FixedPointConfig& fp) {
  const SolutionBundle a = solve_semilinear(problem, g, MethodId::Stabilized2nd, fp);
  const SolutionBundle b = solve_semilinear(problem, g, MethodId::DgCgFirstOrder, fp);
  if (a.blew_up() || b.blew_up() || !a.V || !b.V)
    throw NumericalError("equivalence check needs bounded runs", a.blowup_slab.value_or(b.blowup_slab.value_or(0)));
  EquivalenceReport rep;
  rep.u_discrepancy = (a.U.coefficients() - b.U.coefficients()).cwiseAbs().maxCoeff();
  const DgCoefficients pa = project_dg(*a.V);
  const DgCoefficients pb = project_dg(*b.V);
  rep.v_discrepancy = (pa.coeffs - pb.coeffs).cwiseAbs().maxCoeff();
  rep.scale = std::max(a.U.coefficients().cwiseAbs().maxCoeff(), a.V->coefficients().cwiseAbs().maxCoeff());
  return rep;
}

}  // namespace wavest
