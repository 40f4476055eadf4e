#include "wavest/projection.hpp"

#include <algorithm>
#include <cmath>

#include "wavest/errors.hpp"

namespace wavest {
namespace {

double sign_pow(int r) { return (r % 2 == 0) ? 1.0 : -1.0; }

// Legendre coefficients from values on an arbitrary reference rule (weights on (0,1)).
template <class Values>
Eigen::MatrixXd legendre_moments(const QuadratureRule& rule, int deg, const Values& values, Eigen::Index rows) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(rows, deg + 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::VectorXd v = values(rule.nodes[q]);
    const double xi = 2.0 * rule.nodes[q] - 1.0;
    for (int r = 0; r <= deg; ++r) c.col(r) += rule.weights[q] * (2.0 * r + 1.0) * legendre_reference(r, xi) * v;
  }
  return c;
}

// Integral over (0,tau) of P_r(2s-1) ds.
double legendre_antiderivative(int r, double tau) {
  const double xi = 2.0 * tau - 1.0;
  if (r == 0) return tau;
  return 0.5 * (legendre_reference(r + 1, xi) - legendre_reference(r - 1, xi)) / (2.0 * r + 1.0);
}

}  // namespace

Eigen::VectorXd DgCoefficients::slab_value(int n, double tau) const {
  const int p = per_slab();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(coeffs.rows());
  const double xi = 2.0 * tau - 1.0;
  for (int r = 0; r < p; ++r) v += legendre_reference(r, xi) * coeffs.col(static_cast<Eigen::Index>(n) * p + r);
  return v;
}

Eigen::VectorXd DgCoefficients::at(double t, bool from_left) const {
  int n = mesh.locate(t);
  const auto& nodes = mesh.nodes();
  if (!from_left && t == nodes[n + 1] && n + 1 < mesh.slabs()) ++n;
  return slab_value(n, (t - nodes[n]) / mesh.width(n));
}

Eigen::MatrixXd legendre_to_nodal(int deg) {
  const auto nodes = gauss_lobatto_rule(deg + 1).nodes;
  Eigen::MatrixXd V(deg + 1, deg + 1);
  for (int k = 0; k <= deg; ++k)
    for (int r = 0; r <= deg; ++r) V(k, r) = legendre_reference(r, 2.0 * nodes[k] - 1.0);
  return V;
}

Eigen::MatrixXd nodal_to_legendre(int deg) {
  // Gauss points exact for products of degree 2*deg.
  const QuadratureRule rule = gauss_legendre_rule(deg + 1);
  const auto nodes = gauss_lobatto_rule(deg + 1).nodes;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(deg + 1, deg + 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double xi = 2.0 * rule.nodes[q] - 1.0;
    for (int k = 0; k <= deg; ++k) {
      const double lk = lagrange_eval(nodes, k, rule.nodes[q]);
      for (int r = 0; r <= deg; ++r) T(r, k) += rule.weights[q] * (2.0 * r + 1.0) * legendre_reference(r, xi) * lk;
    }
  }
  return T;
}

DgCoefficients project_dg(const TimeFn& u, const TemporalMesh& mesh) {
  const int p = mesh.degree();
  const QuadratureRule rule = gauss_legendre_rule(std::min(p + 8, kMaxQuadratureNodes));
  DgCoefficients out{mesh, {}};
  for (int n = 0; n < mesh.slabs(); ++n) {
    const double t0 = mesh.nodes()[n];
    const double h = mesh.width(n);
    auto values = [&](double tau) { return u(t0 + tau * h); };
    if (n == 0) out.coeffs.resize(u(t0 + rule.nodes[0] * h).size(), static_cast<Eigen::Index>(mesh.slabs()) * p);
    out.coeffs.middleCols(static_cast<Eigen::Index>(n) * p, p) =
        legendre_moments(rule, p - 1, values, out.coeffs.rows());
  }
  return out;
}

DgCoefficients project_dg(const SpaceTimeSolution& u) {
  const TemporalMesh& mesh = u.time();
  const int p = mesh.degree();
  const QuadratureRule rule = gauss_legendre_rule(p + 4);
  DgCoefficients out{mesh, Eigen::MatrixXd(u.coefficients().rows(), static_cast<Eigen::Index>(mesh.slabs()) * p)};
  for (int n = 0; n < mesh.slabs(); ++n) {
    auto values = [&](double tau) { return u.slab_value(n, tau); };
    out.coeffs.middleCols(static_cast<Eigen::Index>(n) * p, p) = legendre_moments(rule, p - 1, values, out.rows());
  }
  return out;
}

DgCoefficients interpolate_gl(const TimeFn& u, const TemporalMesh& mesh) {
  const int p = mesh.degree();
  // The p-point rule integrates (interpolant) * L_r exactly, so the moments are the
  // interpolant's Legendre coefficients.
  const QuadratureRule rule = gauss_legendre_rule(p);
  DgCoefficients out{mesh, {}};
  for (int n = 0; n < mesh.slabs(); ++n) {
    const double t0 = mesh.nodes()[n];
    const double h = mesh.width(n);
    auto values = [&](double tau) { return u(t0 + tau * h); };
    if (n == 0) out.coeffs.resize(u(t0 + rule.nodes[0] * h).size(), static_cast<Eigen::Index>(mesh.slabs()) * p);
    out.coeffs.middleCols(static_cast<Eigen::Index>(n) * p, p) =
        legendre_moments(rule, p - 1, values, out.coeffs.rows());
  }
  return out;
}

DgCoefficients time_derivative(const SpaceTimeSolution& u) {
  if (u.tag() != SpaceTag::Continuous) throw DomainError("time_derivative expects a degree-p_t solution");
  const TemporalMesh& mesh = u.time();
  const int p = mesh.degree();
  const QuadratureRule rule = gauss_legendre_rule(p);
  DgCoefficients out{mesh, Eigen::MatrixXd(u.coefficients().rows(), static_cast<Eigen::Index>(mesh.slabs()) * p)};
  for (int n = 0; n < mesh.slabs(); ++n) {
    auto values = [&](double tau) { return u.slab_derivative(n, tau); };
    out.coeffs.middleCols(static_cast<Eigen::Index>(n) * p, p) = legendre_moments(rule, p - 1, values, out.rows());
  }
  return out;
}

Eigen::VectorXd project_initial_displacement(const WaveProblem& problem, const SpatialOperators& ops) {
  if (!problem.U0) return Eigen::VectorXd::Zero(problem.space.dofs());
  const Eigen::VectorXd b = elliptic_load(problem.space, problem.c, initial_gradient(problem));
  return ops.solve_stiffness(b);
}

Eigen::VectorXd project_initial_velocity(const WaveProblem& problem, const SpatialOperators& ops) {
  if (!problem.V0) return Eigen::VectorXd::Zero(problem.space.dofs());
  return ops.solve_mass(load_vector(problem.space, problem.V0));
}

SpaceTimeSolution reconstruct_velocity(const DgCoefficients& dtU, const SpatialMesh1D& space,
                                       const Eigen::VectorXd& V0h) {
  const TemporalMesh& mesh = dtU.mesh;
  const int p = mesh.degree();
  if (V0h.size() != dtU.rows() || dtU.rows() != space.dofs() ||
      dtU.coeffs.cols() != static_cast<Eigen::Index>(mesh.slabs()) * p)
    throw DomainError("reconstruct_velocity: size mismatch");
  const Eigen::MatrixXd toNodal = legendre_to_nodal(p);
  Eigen::MatrixXd out(dtU.rows(), mesh.dofs());
  Eigen::MatrixXd c(dtU.rows(), p + 1);
  Eigen::VectorXd left = V0h;
  for (int n = 0; n < mesh.slabs(); ++n) {
    c.leftCols(p) = dtU.coeffs.middleCols(static_cast<Eigen::Index>(n) * p, p);
    // L_r(t_{n-1}) = (-1)^r fixes the top coefficient from the left value.
    Eigen::VectorXd s = left;
    for (int r = 0; r < p; ++r) s -= sign_pow(r) * c.col(r);
    c.col(p) = sign_pow(p) * s;
    Eigen::MatrixXd block = c * toNodal.transpose();
    block.col(0) = left;
    out.middleCols(static_cast<Eigen::Index>(n) * p, p + 1) = block;
    left = c.rowwise().sum();
    out.col(static_cast<Eigen::Index>(n + 1) * p) = left;
  }
  return SpaceTimeSolution(space, mesh, p, SpaceTag::Continuous, std::move(out));
}

SpaceTimeSolution postprocess_displacement(const SpaceTimeSolution& Vtilde, const Eigen::VectorXd& U0h) {
  if (Vtilde.tag() != SpaceTag::Continuous) throw DomainError("postprocess expects a continuous velocity");
  const TemporalMesh& mesh = Vtilde.time();
  const int p = mesh.degree();
  const int q = p + 1;
  const auto nodes = gauss_lobatto_rule(q + 1).nodes;
  Eigen::MatrixXd anti(q + 1, p + 1);
  for (int k = 0; k <= q; ++k)
    for (int r = 0; r <= p; ++r) anti(k, r) = legendre_antiderivative(r, nodes[k]);
  Eigen::MatrixXd out(U0h.size(), static_cast<Eigen::Index>(mesh.slabs()) * q + 1);
  Eigen::VectorXd left = U0h;
  for (int n = 0; n < mesh.slabs(); ++n) {
    const Eigen::MatrixXd c = slab_legendre(Vtilde, n);
    Eigen::MatrixXd block = (mesh.width(n) * c * anti.transpose()).colwise() + left;
    block.col(0) = left;
    out.middleCols(static_cast<Eigen::Index>(n) * q, q + 1) = block;
    left = block.col(q);
  }
  return SpaceTimeSolution(Vtilde.space(), mesh, q, SpaceTag::Postprocessed, std::move(out));
}

Eigen::MatrixXd slab_legendre(const SpaceTimeSolution& u, int n) {
  return u.slab_block(n) * nodal_to_legendre(u.degree()).transpose();
}

}  // namespace wavest
