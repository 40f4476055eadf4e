#include <cmath>
#include <random>

#include "doctest.h"
#include "wavest/diagnostics.hpp"
#include "wavest/errors.hpp"
#include "wavest/harness.hpp"
#include "wavest/presets.hpp"
#include "wavest/solver_semilinear.hpp"

using namespace wavest;

namespace {

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

FixedPointConfig tight() {
  FixedPointConfig fp;
  fp.tolerance = 1e-13;
  fp.max_iterations = 300;
  return fp;
}

}  // namespace

TEST_SUITE("solver_semilinear") {
  TEST_CASE("primitives differentiate to the nonlinearities") {
    const std::vector<Nonlinearity> gs{Nonlinearity::sine_gordon(1.3), Nonlinearity::klein_gordon_linear(0.7),
                                       Nonlinearity::klein_gordon_defocusing(0.8, 2.0),
                                       Nonlinearity::sine_gordon().scaled(0.25)};
    const double d = 1e-5;
    for (const auto& g : gs) {
      CHECK(g.G(0.0) == doctest::Approx(0.0));
      for (double u : {-2.1, -0.4, 0.0, 0.9, 1.7}) {
        const double fd = (g.G(u + d) - g.G(u - d)) / (2 * d);
        CHECK(fd == doctest::Approx(g.g(u)).epsilon(1e-8));
      }
    }
    CHECK_THROWS_AS(Nonlinearity::custom(nullptr, [](double u) { return u; }), DomainError);
  }

  TEST_CASE("zero nonlinearity reduces to the linear driver") {
    const WaveProblem pb = preset_manufactured(6, 6, 2, 2);
    const auto lin = march(pb, Nonlinearity::none(), MethodId::Stabilized2nd, {});
    const auto sl = solve_semilinear(pb, Nonlinearity::custom([](double) { return 0.0; }, [](double) { return 0.0; }),
                                     MethodId::Stabilized2nd);
    CHECK(max_diff(lin.U.coefficients(), sl.U.coefficients()) < 1e-13);
  }

  TEST_CASE("stabilized and first-order forms agree on sine-Gordon") {
    for (int p = 1; p <= 3; ++p) {
      const WaveProblem pb = preset_fig2(10, 20, p, 1);
      const EquivalenceReport r = semilinear_equivalence_check(pb, pb.g, tight());
      CHECK(r.u_discrepancy <= 1e-10 * std::max(1.0, r.scale));
      CHECK(r.v_discrepancy <= 1e-10 * std::max(1.0, r.scale));
    }
  }

  TEST_CASE("Gauss-Legendre scheme agrees with the Gauss collocation method") {
    for (int p = 1; p <= 2; ++p) {
      const WaveProblem pb = preset_fig2(10, 10, p, 1);
      const auto a = solve_semilinear(pb, pb.g, MethodId::GaussLegendre2nd, tight());
      const auto b = solve_semilinear(pb, pb.g, MethodId::GaussRkReference, tight());
      CHECK(max_diff(a.U.coefficients(), b.U.coefficients()) < 1e-9);
      CHECK(max_diff(a.node_velocity, b.node_velocity) < 1e-9);
    }
  }

  TEST_CASE("Gauss-Lobatto scheme agrees with Lobatto IIIA/IIIB") {
    for (int p = 1; p <= 2; ++p) {
      const WaveProblem pb = preset_fig2(40, 10, p, 1);
      REQUIRE(cfl_number(pb) <= kLobattoComparisonCfl);
      for (const Nonlinearity& g : {Nonlinearity::none(), pb.g}) {
        const auto a = solve_semilinear(pb, g, MethodId::GaussLobatto2nd, tight());
        const auto b = solve_semilinear(pb, g, MethodId::LobattoIIIABReference, tight());
        CHECK(max_diff(a.U.coefficients(), b.U.coefficients()) < 1e-9);
        CHECK(max_diff(a.node_velocity, b.node_velocity) < 1e-9);
      }
    }
  }

  TEST_CASE("stabilized scheme conserves the semilinear energy") {
    const WaveProblem pb = preset_fig2(20, 40, 2, 2);
    const auto b = solve_semilinear(pb, pb.g, MethodId::Stabilized2nd, tight());
    const EnergyTrace e = energy_trace(b, pb, EnergyVariant::SemilinearNodal, VelocitySource::Flux, pb.g);
    CHECK(e.potential_inexact);
    CHECK(e.max_relative_drift() < 1e-10);
  }

  TEST_CASE("small perturbations act linearly") {
    const WaveProblem pb = preset_manufactured(8, 8, 2, 2);
    const auto base = solve_semilinear(pb, Nonlinearity::none(), MethodId::Stabilized2nd);
    std::vector<double> d;
    for (double eps : {1e-2, 5e-3, 2.5e-3}) {
      const auto b = solve_semilinear(pb, Nonlinearity::sine_gordon().scaled(eps), MethodId::Stabilized2nd, tight());
      d.push_back(max_diff(b.U.coefficients(), base.U.coefficients()));
    }
    CHECK(d[0] / d[1] == doctest::Approx(2.0).epsilon(0.02));
    CHECK(d[1] / d[2] == doctest::Approx(2.0).epsilon(0.02));
  }

  TEST_CASE("non-convergence names the slab") {
    const WaveProblem pb = preset_fig2(4, 20, 2, 1);
    FixedPointConfig fp;
    fp.max_iterations = 1;
    fp.tolerance = 1e-15;
    for (MethodId m : {MethodId::Stabilized2nd, MethodId::DgCgFirstOrder, MethodId::GaussRkReference}) {
      try {
        solve_semilinear(pb, pb.g, m, fp);
        FAIL("expected a convergence failure");
      } catch (const ConvergenceError& e) {
        CHECK(e.slab() == 1);
      }
    }
  }
}
