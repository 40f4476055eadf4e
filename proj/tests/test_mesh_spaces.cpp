#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "wavest/diagnostics.hpp"
#include "wavest/errors.hpp"
#include "wavest/mesh_spaces.hpp"

using namespace wavest;

namespace {

// Composite Simpson, independent of the library's Gauss rules.
double simpson(const std::function<double(double)>& f, double a, double b, int n = 4000) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("mesh_spaces") {
  TEST_CASE("temporal meshes") {
    const TemporalMesh m = build_temporal_mesh(10.0, 128, 1);
    CHECK(m.width(0) == doctest::Approx(0.078125));
    CHECK(m.dofs() == 129);
    const TemporalMesh one = build_temporal_mesh(1.0, 1, 2);
    CHECK(one.slabs() == 1);
    CHECK(one.final_time() == 1.0);
    const TemporalMesh e = build_temporal_mesh({0.0, 0.3, 1.0}, 1);
    CHECK(e.width(0) == doctest::Approx(0.3));
    CHECK(e.width(1) == doctest::Approx(0.7));
    CHECK(e.locate(0.3) == 0);
    CHECK(e.locate(0.31) == 1);
    CHECK(e.locate(0.0) == 0);
    CHECK(e.locate(1.0) == 1);
    CHECK_THROWS_AS(build_temporal_mesh(0.0, 4, 1), DomainError);
    CHECK_THROWS_AS(build_temporal_mesh(1.0, 0, 1), DomainError);
    CHECK_THROWS_AS(build_temporal_mesh(std::vector<double>{}, 1), DomainError);
    CHECK_THROWS_AS(build_temporal_mesh({0.0, 0.5, 0.4}, 1), DomainError);
  }

  TEST_CASE("spatial dof map") {
    const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 5, 3);
    CHECK(s.dofs() == 14);
    CHECK(s.dof(0, 0) == -1);
    CHECK(s.dof(4, 3) == -1);
    CHECK(s.dof(0, 3) == s.dof(1, 0));
  }

  TEST_CASE("P1 matrices are the textbook tridiagonals") {
    const int E = 6;
    const double h = 1.0 / E;
    const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, E, 1);
    const SpatialOperators ops = assemble_spatial(s, [](double) { return 1.0; });
    const Eigen::MatrixXd K(ops.stiffness), M(ops.mass);
    for (int i = 0; i < E - 1; ++i)
      for (int j = 0; j < E - 1; ++j) {
        const double k = i == j ? 2.0 / h : (std::abs(i - j) == 1 ? -1.0 / h : 0.0);
        const double m = i == j ? 4.0 * h / 6.0 : (std::abs(i - j) == 1 ? h / 6.0 : 0.0);
        CHECK(K(i, j) == doctest::Approx(k).epsilon(1e-13));
        CHECK(M(i, j) == doctest::Approx(m).epsilon(1e-13));
      }
  }

  TEST_CASE("variable wave speed entry") {
    const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 2, 1);
    const SpatialOperators ops = assemble_spatial(s, [](double x) { return 1.0 + x; });
    // phi_1 is the hat at x = 1/2 with slope +-2.
    const double oracle = simpson([](double x) { return (1.0 + x) * (1.0 + x) * 4.0; }, 0.0, 1.0);
    CHECK(Eigen::MatrixXd(ops.stiffness)(0, 0) == doctest::Approx(oracle).epsilon(1e-12));
    CHECK_THROWS_AS(assemble_spatial(s, [](double x) { return x - 0.3; }), DataError);
  }

  TEST_CASE("mass is an inner product and K x_h is boundary supported") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int p = 1; p <= 3; ++p) {
      const SpatialMesh1D s = SpatialMesh1D::uniform(-1.0, 2.0, 7, p);
      const SpatialOperators ops = assemble_spatial(s, [](double) { return 1.0; });
      for (int k = 0; k < 100; ++k) {
        Eigen::VectorXd v(s.dofs());
        for (auto& x : v) x = N(rng);
        CHECK(v.dot(ops.mass * v) > 0.0);
      }
      // K applied to the interior values of x vanishes except in rows coupled to the boundary DOFs.
      const Eigen::VectorXd xh = s.interpolate([](double x) { return x; });
      const Eigen::VectorXd r = ops.stiffness * xh;
      CHECK(r.cwiseAbs().maxCoeff() > 1e-3);
      for (int e = 1; e + 1 < s.elements(); ++e)
        for (int i = 0; i < p; ++i)
          if (!(i == 0 && e == 1)) CHECK(std::abs(r[s.dof(e, i)]) < 1e-12);
    }
  }

  TEST_CASE("stiffness energy converges with order 2 p_x") {
    using std::numbers::pi;
    for (int p = 1; p <= 2; ++p) {
      std::vector<double> h, err;
      for (int E : {4, 8, 16}) {
        const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, E, p);
        const SpatialOperators ops = assemble_spatial(s, [](double) { return 1.0; });
        const Eigen::VectorXd u = s.interpolate([](double x) { return std::sin(pi * x); });
        h.push_back(1.0 / E);
        err.push_back(std::abs(u.dot(ops.stiffness * u) - pi * pi / 2.0));
      }
      const auto rates = eoc(h, err);
      CHECK(rates.back() == doctest::Approx(2.0 * p).epsilon(0.1));
    }
  }

  TEST_CASE("space-time solution shape checks") {
    const SpatialMesh1D s = SpatialMesh1D::uniform(0.0, 1.0, 3, 1);
    const TemporalMesh t = TemporalMesh::uniform(1.0, 2, 2);
    CHECK_NOTHROW(SpaceTimeSolution(s, t, 2, SpaceTag::Continuous, Eigen::MatrixXd::Zero(2, 5)));
    CHECK_THROWS_AS(SpaceTimeSolution(s, t, 2, SpaceTag::Continuous, Eigen::MatrixXd::Zero(2, 4)), DomainError);
    CHECK_THROWS_AS(SpaceTimeSolution(s, t, 2, SpaceTag::Postprocessed, Eigen::MatrixXd::Zero(2, 5)), DomainError);
    Eigen::MatrixXd c(2, 5);
    for (int j = 0; j < 5; ++j) c.col(j).setConstant(j);
    const SpaceTimeSolution u(s, t, 2, SpaceTag::Continuous, c);
    CHECK(u.at(0.5)[0] == doctest::Approx(2.0));
    CHECK(u.at(0.25)[1] == doctest::Approx(1.0));
    CHECK(u.slab_derivative(0, 0.3)[0] == doctest::Approx(4.0));
  }
}
