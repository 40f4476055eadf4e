#include <cmath>
#include <limits>

#include "doctest.h"
#include "wavest/diagnostics.hpp"
#include "wavest/errors.hpp"
#include "wavest/presets.hpp"
#include "wavest/solver_semilinear.hpp"

using namespace wavest;

TEST_SUITE("diagnostics") {
  TEST_CASE("eoc examples") {
    CHECK(eoc({1.0, 0.5}, {1.0, 0.25})[0] == doctest::Approx(2.0));
    CHECK(eoc({1.0, 0.5}, {1.0, 0.125})[0] == doctest::Approx(3.0));
    std::vector<double> h{0.1, 0.05, 0.025}, e;
    for (double x : h) e.push_back(3.0 * std::pow(x, 1.5) + 1e-15);
    for (double r : eoc(h, e)) CHECK(std::abs(r - 1.5) <= 1e-6);
    CHECK_THROWS_AS(eoc({1.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {1.0}), DomainError);
    CHECK_THROWS_AS(eoc({1.0, 0.5}, {1.0, 0.0}), DomainError);
    CHECK_THROWS_AS(eoc({1.0, 1.0}, {1.0, 0.5}), DomainError);
  }

  TEST_CASE("blow-up detection") {
    Eigen::MatrixXd tr = Eigen::MatrixXd::Ones(3, 10);
    CHECK(!detect_blowup(tr).has_value());
    tr(1, 7) = std::numeric_limits<double>::quiet_NaN();
    CHECK(detect_blowup(tr) == std::optional<std::size_t>(7));
    tr(2, 4) = 1e11;
    CHECK(detect_blowup(tr) == std::optional<std::size_t>(4));
    CHECK(detect_blowup(tr, 1e12) == std::optional<std::size_t>(7));
  }

  TEST_CASE("energy of the zero solution") {
    WaveProblem pb{SpatialMesh1D::uniform(0.0, 1.0, 5, 2), TemporalMesh::uniform(1.0, 3, 2)};
    const SolutionBundle b = solve_stabilized(pb);
    for (auto v : {EnergyVariant::LinearNodal, EnergyVariant::SemilinearNodal, EnergyVariant::Hamiltonian})
      for (auto s : {VelocitySource::Reconstruction, VelocitySource::RawTimeDerivative, VelocitySource::Flux}) {
        const EnergyTrace e = energy_trace(b, pb, v, s, Nonlinearity::sine_gordon());
        REQUIRE(e.values.size() == 4);
        for (double x : e.values) CHECK(x == 0.0);
      }
  }

  TEST_CASE("reconstructed velocity separates from the raw derivative") {
    for (int p = 1; p <= 2; ++p) {
      const WaveProblem pb = preset_fig1(32, 96, p, 1);
      const SolutionBundle b = solve_stabilized(pb);
      const double rec = energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::Reconstruction).max_relative_drift();
      const double raw = energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::RawTimeDerivative).max_relative_drift();
      CHECK(rec <= 1e-10);
      CHECK(raw >= 1e3 * rec);
    }
  }

  TEST_CASE("blown-up runs give infinite energy after the blow-up slab") {
    const WaveProblem pb = preset_fig1(38, 384, 1, 1);
    const SolutionBundle b = solve_unstabilized(pb);
    REQUIRE(b.blew_up());
    const EnergyTrace e = energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::Flux);
    CHECK(e.blowup_slab == b.blowup_slab);
    CHECK(std::isinf(e.values.back()));
    CHECK(std::isinf(e.growth()));
    CHECK_THROWS_AS(energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::Reconstruction), DataError);
    const ErrorReport r = error_norms(b, *pb.exact);
    CHECK(std::isinf(r.c0_l2_u));
  }

  TEST_CASE("error norms of the breather") {
    const WaveProblem pb = preset_fig2(20, 40, 1, 1);
    const SolutionBundle b = solve_semilinear(pb, pb.g, MethodId::Stabilized2nd);
    const ErrorReport r = error_norms(b, *pb.exact);
    CHECK(r.h_t == doctest::Approx(0.05));
    CHECK(r.h_x == doctest::Approx(1.0));
    for (const auto& n : norm_names()) {
      CHECK(norm_value(r, n) >= 0.0);
      CHECK(norm_value(r, n) < 1.0);
    }
    CHECK_THROWS_AS(norm_value(r, "H2"), DomainError);
  }

  TEST_CASE("a missing spatial derivative leaves the gradient norm undefined") {
    WaveProblem pb = preset_manufactured(4, 4, 1, 1);
    ExactSolution ex = *pb.exact;
    ex.dxU = nullptr;
    const ErrorReport r = error_norms(solve_stabilized(pb), ex);
    CHECK(std::isnan(r.c0_l2_gradu));
    CHECK(std::isfinite(r.c0_l2_u));
  }
}
