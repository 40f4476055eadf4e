#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "wavest/diagnostics.hpp"
#include "wavest/harness.hpp"
#include "wavest/polyquad.hpp"
#include "wavest/projection.hpp"
#include "wavest/solver_linear.hpp"

namespace wavest::props {
namespace {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  std::mt19937_64& engine() { return rng_; }

  Interval interval() {
    const double a = real(-2.0, 2.0);
    return {a, a + real(0.1, 3.0)};
  }

  /// Strictly increasing nodes with jitter around a uniform grid.
  std::vector<double> nodes(int count, double a, double b) {
    std::vector<double> x(count);
    const double h = (b - a) / count;
    for (int i = 0; i < count; ++i) x[i] = a + h * (i + real(0.2, 0.8));
    return x;
  }

  TemporalMesh temporal_mesh(int slabs, int degree) {
    std::vector<double> t{0.0};
    for (int i = 0; i < slabs; ++i) t.push_back(t.back() + real(0.1, 0.6));
    return TemporalMesh(t, degree);
  }

  /// Smooth scalar function of time: a short random trigonometric sum.
  std::function<double(double)> smooth() {
    const double a0 = real(-1, 1), a1 = real(-1, 1), w0 = real(0.5, 4), w1 = real(0.5, 4), c0 = real(0, 3), c1 = real(0, 3);
    return [=](double t) { return a0 * std::sin(w0 * t + c0) + a1 * std::exp(-0.3 * t) * std::cos(w1 * t + c1); };
  }

  Eigen::MatrixXd matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (auto& x : m.reshaped()) x = real(-1, 1);
    return m;
  }

 private:
  std::mt19937_64 rng_;
};

struct Tracker {
  PropertyResult r;
  double tol;
  Tracker(std::string name, double tolerance) : tol(tolerance) { r.name = std::move(name); }
  void check(double measure) {
    ++r.cases;
    if (!(measure <= tol)) r.passed = false;
    if (std::isnan(measure) || measure > r.worst) r.worst = std::isnan(measure) ? INFINITY : measure;
  }
  PropertyResult done() {
    char buf[64];
    std::snprintf(buf, sizeof buf, "tol=%.0e", tol);
    r.detail = buf;
    return r;
  }
};

double monomial_integral(int k, Interval I) { return (std::pow(I.b, k + 1) - std::pow(I.a, k + 1)) / (k + 1); }
double abs_monomial_integral(int k, Interval I) {
  auto F = [k](double x) { return std::copysign(std::pow(std::abs(x), k + 1) / (k + 1), x); };
  return F(I.b) - F(I.a);
}

PropertyResult quadrature_exactness(Gen& g) {
  Tracker t("quadrature exactness", 1e-12);
  for (int trial = 0; trial < 50; ++trial) {
    const Interval I = g.interval();
    for (int m = 1; m <= 6; ++m)
      for (bool lobatto : {false, true}) {
        if (lobatto && m < 2) continue;
        const QuadratureRule q = lobatto ? gauss_lobatto_rule(m, I) : gauss_legendre_rule(m, I);
        for (int k = 0; k <= q.exactness_degree; ++k) {
          const double v = q.integrate([k](double x) { return std::pow(x, k); });
          t.check(std::abs(v - monomial_integral(k, I)) / abs_monomial_integral(k, I));
        }
      }
  }
  return t.done();
}

PropertyResult lobatto_inexactness(Gen& g) {
  Tracker t("lobatto inexact beyond its degree", 0.0);
  for (int trial = 0; trial < 50; ++trial) {
    // (t - a)^k has an interval-independent relative quadrature error.
    const Interval J = g.interval();
    for (int m = 2; m <= 6; ++m) {
      const QuadratureRule q = gauss_lobatto_rule(m, J);
      const int k = q.exactness_degree + 1;
      const double exact = std::pow(J.length(), k + 1) / (k + 1);
      const double rel =
          std::abs(q.integrate([k, a = J.a](double x) { return std::pow(x - a, k); }) - exact) / exact;
      t.check(rel > 1e-6 ? 0.0 : 1.0);
    }
  }
  return t.done();
}

PropertyResult legendre_orthogonality(Gen& g) {
  Tracker t("legendre orthogonality", 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const Interval I = g.interval();
    const LegendreBasis b(I, 8);
    const QuadratureRule q = gauss_legendre_rule(10, I);
    for (int r = 0; r <= 8; ++r)
      for (int s = 0; s < r; ++s) {
        const double ip = q.integrate([&](double x) { return b.value(r, x) * b.value(s, x); });
        t.check(std::abs(ip) / std::sqrt(b.norm_squared(r) * b.norm_squared(s)));
      }
  }
  return t.done();
}

PropertyResult gauss_nodes_are_roots(Gen&) {
  Tracker t("gauss-legendre nodes are legendre roots", 1e-11);
  const LegendreBasis b({0.0, 1.0}, kMaxQuadratureNodes);
  for (int m = 1; m <= kMaxQuadratureNodes; ++m)
    for (double x : gauss_legendre_rule(m).nodes) t.check(std::abs(legendre_eval(b, m, x)));
  return t.done();
}

PropertyResult lagrange_partition(Gen& g) {
  Tracker t("lagrange partition of unity", 1e-13);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = g.integer(1, 8);
    const Interval I = g.interval();
    const auto x = g.nodes(n, I.a, I.b);
    for (int k = 0; k < 5; ++k) {
      const double s = g.real(I.a, I.b);
      double sum = 0.0;
      for (int j = 0; j < n; ++j) sum += lagrange_eval(x, j, s);
      t.check(std::abs(sum - 1.0));
    }
  }
  return t.done();
}

PropertyResult projection_orthogonality(Gen& g) {
  Tracker t("projection orthogonality", 1e-11);
  for (int trial = 0; trial < 40; ++trial) {
    const int p = g.integer(1, 4);
    const TemporalMesh mesh = g.temporal_mesh(g.integer(1, 5), p);
    const auto f = g.smooth();
    const DgCoefficients d = project_dg([&](double s) { return Eigen::VectorXd::Constant(1, f(s)); }, mesh);
    for (int n = 0; n < mesh.slabs(); ++n) {
      const Interval I{mesh.nodes()[n], mesh.nodes()[n + 1]};
      const LegendreBasis b(I, p);
      const QuadratureRule q = gauss_legendre_rule(kMaxQuadratureNodes, I);
      const double unorm = std::sqrt(q.integrate([&](double s) { return f(s) * f(s); }));
      for (int r = 0; r < p; ++r) {
        const double ip = q.integrate([&](double s) {
          return (f(s) - d.slab_value(n, (s - I.a) / I.length())[0]) * b.value(r, s);
        });
        t.check(std::abs(ip) / (unorm * std::sqrt(b.norm_squared(r)) + 1e-300));
      }
    }
  }
  return t.done();
}

SpaceTimeSolution random_continuous(Gen& g, const SpatialMesh1D& s, const TemporalMesh& m) {
  return SpaceTimeSolution(s, m, m.degree(), SpaceTag::Continuous, g.matrix(s.dofs(), m.dofs()));
}

PropertyResult gauss_node_identity(Gen& g) {
  Tracker t("projection exact at gauss nodes", 1e-12);
  const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 3, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const TemporalMesh m = g.temporal_mesh(g.integer(1, 4), g.integer(1, 5));
    const SpaceTimeSolution v = random_continuous(g, s, m);
    const DgCoefficients pv = project_dg(v);
    const double vmax = v.coefficients().cwiseAbs().maxCoeff();
    const auto nodes = gauss_legendre_rule(m.degree()).nodes;
    double worst = 0.0;
    for (int n = 0; n < m.slabs(); ++n)
      for (double tau : nodes) worst = std::max(worst, (v.slab_value(n, tau) - pv.slab_value(n, tau)).cwiseAbs().maxCoeff());
    t.check(worst / vmax);
  }
  return t.done();
}

PropertyResult reconstruction_linearity(Gen& g) {
  Tracker t("reconstruction linear and unique", 1e-12);
  const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 4, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const TemporalMesh m = g.temporal_mesh(g.integer(1, 5), g.integer(1, 5));
    const Eigen::Index cols = static_cast<Eigen::Index>(m.slabs()) * m.degree();
    const DgCoefficients d1{m, g.matrix(s.dofs(), cols)}, d2{m, g.matrix(s.dofs(), cols)};
    const Eigen::VectorXd v1 = g.matrix(s.dofs(), 1), v2 = g.matrix(s.dofs(), 1);
    const double a = g.real(-2, 2), b = g.real(-2, 2);
    const SpaceTimeSolution r1 = reconstruct_velocity(d1, s, v1), r2 = reconstruct_velocity(d2, s, v2);
    const SpaceTimeSolution r = reconstruct_velocity({m, a * d1.coeffs + b * d2.coeffs}, s, a * v1 + b * v2);
    const Eigen::MatrixXd comb = a * r1.coefficients() + b * r2.coefficients();
    t.check((r.coefficients() - comb).cwiseAbs().maxCoeff() / std::max(1.0, comb.cwiseAbs().maxCoeff()));
    // Defining conditions: V(0) = V0 and Pi V = dtU.
    t.check((r1.node_value(0) - v1).cwiseAbs().maxCoeff());
    t.check((project_dg(r1).coeffs - d1.coeffs).cwiseAbs().maxCoeff() / std::max(1.0, d1.coeffs.cwiseAbs().maxCoeff()));
    const SpaceTimeSolution z =
        reconstruct_velocity({m, Eigen::MatrixXd::Zero(s.dofs(), cols)}, s, Eigen::VectorXd::Zero(s.dofs()));
    t.check(z.coefficients().cwiseAbs().maxCoeff() == 0.0 ? 0.0 : 1.0);
  }
  return t.done();
}

PropertyResult postprocess_consistency(Gen& g) {
  Tracker t("postprocessed derivative equals velocity", 1e-12);
  const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 3, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const TemporalMesh m = g.temporal_mesh(g.integer(1, 4), g.integer(1, 5));
    const SpaceTimeSolution V = random_continuous(g, s, m);
    const Eigen::VectorXd u0 = g.matrix(s.dofs(), 1);
    const SpaceTimeSolution U = postprocess_displacement(V, u0);
    double worst = (U.node_value(0) - u0).cwiseAbs().maxCoeff();
    for (int n = 0; n < m.slabs(); ++n)
      for (double tau : {0.0, 0.21, 0.5, 0.77, 1.0})
        worst = std::max(worst, (U.slab_derivative(n, tau) - V.slab_value(n, tau)).cwiseAbs().maxCoeff());
    t.check(worst / std::max(1.0, V.coefficients().cwiseAbs().maxCoeff()));
  }
  return t.done();
}

PropertyResult superposition(Gen& g) {
  Tracker t("solution map is linear in the data", 1e-10);
  for (int trial = 0; trial < 10; ++trial) {
    RandomProblemLimits lim;
    lim.max_nt = 5;
    lim.max_nx = 8;
    const WaveProblem pa = random_problem(g.engine(), lim);
    const double a = pa.space.a(), b = pa.space.b();
    WaveProblem pb = pa;
    pb.U0 = [=](double x) { return (x - a) * (b - x); };
    pb.dU0 = [=](double x) { return a + b - 2.0 * x; };
    pb.V0 = [=](double x) { return std::sin(std::numbers::pi * (x - a) / (b - a)); };
    pb.F = [=](double x, double s) { return (x - a) * (b - x) * std::cos(s); };
    const double ca = g.real(-2, 2), cb = g.real(-2, 2);
    WaveProblem ps = pa;
    ps.U0 = [=](double x) { return ca * pa.U0(x) + cb * pb.U0(x); };
    ps.dU0 = [=](double x) { return ca * pa.dU0(x) + cb * pb.dU0(x); };
    ps.V0 = [=](double x) { return ca * pa.V0(x) + cb * pb.V0(x); };
    ps.F = [=](double x, double s) { return ca * pa.F(x, s) + cb * pb.F(x, s); };
    for (MethodId m : {MethodId::Stabilized2nd, MethodId::DgCgFirstOrder}) {
      const auto A = march(pa, Nonlinearity::none(), m, {}).U.coefficients();
      const auto B = march(pb, Nonlinearity::none(), m, {}).U.coefficients();
      const auto S = march(ps, Nonlinearity::none(), m, {}).U.coefficients();
      const Eigen::MatrixXd comb = ca * A + cb * B;
      t.check((S - comb).cwiseAbs().maxCoeff() / std::max(1.0, comb.cwiseAbs().maxCoeff()));
    }
  }
  return t.done();
}

PropertyResult error_norm_triangle(Gen& g) {
  Tracker t("error norms satisfy the triangle inequality", 1e-14);
  const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 4, 2);
  const ExactSolution zero{[](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                           [](double, double) { return 0.0; }};
  for (int trial = 0; trial < 20; ++trial) {
    const TemporalMesh m = g.temporal_mesh(g.integer(1, 4), g.integer(1, 3));
    auto bundle = [&](const Eigen::MatrixXd& c, const Eigen::VectorXd& v0) {
      SolutionBundle b;
      b.U = SpaceTimeSolution(s, m, m.degree(), SpaceTag::Continuous, c);
      b.U0h = c.col(0);
      b.V0h = v0;
      return b;
    };
    const Eigen::MatrixXd ca = g.matrix(s.dofs(), m.dofs()), cb = g.matrix(s.dofs(), m.dofs());
    const Eigen::VectorXd va = g.matrix(s.dofs(), 1), vb = g.matrix(s.dofs(), 1);
    const ErrorReport ea = error_norms(bundle(ca, va), zero), eb = error_norms(bundle(cb, vb), zero);
    const ErrorReport es = error_norms(bundle(ca + cb, va + vb), zero);
    for (const auto& n : norm_names()) {
      const double lhs = norm_value(es, n), rhs = norm_value(ea, n) + norm_value(eb, n);
      t.check(std::max(0.0, lhs - rhs) / rhs);
    }
  }
  return t.done();
}

PropertyResult first_order_energy(Gen& g) {
  Tracker t("first-order form conserves the nodal energy", 1e-11);
  for (int trial = 0; trial < 10; ++trial) {
    RandomProblemLimits lim;
    lim.source = false;
    lim.max_nt = 6;
    lim.max_nx = 10;
    const WaveProblem pb = random_problem(g.engine(), lim);
    const SolutionBundle b = solve_dgcg_first_order(pb);
    t.check(energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::Reconstruction).max_relative_drift());
  }
  return t.done();
}

PropertyResult hamiltonian_matches_energy(Gen& g) {
  Tracker t("hamiltonian equals the linear energy", 1e-12);
  for (int trial = 0; trial < 10; ++trial) {
    RandomProblemLimits lim;
    lim.source = false;
    lim.max_nt = 6;
    lim.max_nx = 10;
    const WaveProblem pb = random_problem(g.engine(), lim);
    const SolutionBundle b = solve_stabilized(pb);
    const EnergyTrace lin = energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::Flux);
    const EnergyTrace ham = energy_trace(b, pb, EnergyVariant::Hamiltonian, VelocitySource::Flux);
    for (std::size_t j = 0; j < lin.values.size(); ++j)
      t.check(std::abs(lin.values[j] - ham.values[j]) / std::max(1e-300, std::abs(lin.values[0])));
  }
  return t.done();
}

}  // namespace

std::vector<PropertyResult> run_property_suite(std::uint64_t seed) {
  std::vector<PropertyResult> out;
  const std::vector<PropertyResult (*)(Gen&)> props{
      quadrature_exactness,   lobatto_inexactness,      legendre_orthogonality, gauss_nodes_are_roots,
      lagrange_partition,     projection_orthogonality, gauss_node_identity,    reconstruction_linearity,
      postprocess_consistency, superposition,           error_norm_triangle,    first_order_energy,
      hamiltonian_matches_energy};
  std::uint64_t k = 0;
  for (auto* p : props) {
    Gen g(seed * 1000003ULL + k++);
    try {
      out.push_back(p(g));
    } catch (const std::exception& e) {
      PropertyResult r;
      r.name = "property " + std::to_string(k);
      r.passed = false;
      r.detail = std::string("threw: ") + e.what();
      out.push_back(r);
    }
  }
  return out;
}

}  // namespace wavest::props
