#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "properties.hpp"
#include "wavest/diagnostics.hpp"
#include "wavest/harness.hpp"
#include "wavest/presets.hpp"
#include "wavest/rk_reference.hpp"
#include "wavest/solver_semilinear.hpp"

using namespace wavest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::string detail;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) passed = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

double max_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).cwiseAbs().maxCoeff(); }

FixedPointConfig fp_tol(double tol) {
  FixedPointConfig fp;
  fp.tolerance = tol;
  fp.max_iterations = 500;
  return fp;
}

struct Fig1Drifts {
  double rec = 0.0, raw = 0.0, secs = 0.0;
};

Fig1Drifts fig1_drifts(int Nt, int Nx, int p) {
  const auto t0 = Clock::now();
  const WaveProblem pb = preset_fig1(Nt, Nx, p, p);
  const SolutionBundle b = solve_stabilized(pb);
  Fig1Drifts d;
  d.rec = energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::Reconstruction).max_relative_drift();
  d.secs = seconds_since(t0);
  d.raw = energy_trace(b, pb, EnergyVariant::LinearNodal, VelocitySource::RawTimeDerivative).max_relative_drift();
  return d;
}

Fig1Drifts g_fig1[2];

Outcome criterion1() {
  Outcome o;
  for (int p = 1; p <= 2; ++p) {
    g_fig1[p - 1] = fig1_drifts(128, 384, p);
    const auto& d = g_fig1[p - 1];
    o.require(d.rec <= 1e-10, "p=" + std::to_string(p) + " drift " + fmt("%.2e", d.rec));
    o.require(d.secs <= 120.0, fmt("%.2f s", d.secs));
    const Fig1Drifts q = fig1_drifts(32, 96, p);
    o.require(q.rec <= 1e-10 && q.secs <= 10.0, "quick drift " + fmt("%.2e", q.rec));
  }
  return o;
}

Outcome criterion2() {
  Outcome o;
  for (int p = 1; p <= 2; ++p) {
    const auto& d = g_fig1[p - 1];
    const double ratio = d.raw / std::max(d.rec, 1e-300);
    o.require(ratio >= 1e3, "p=" + std::to_string(p) + " raw drift " + fmt("%.2e", d.raw) + " ratio " + fmt("%.1e", ratio));
  }
  return o;
}

std::array<double, 3> fig2_rates(int p, const std::vector<std::pair<int, int>>& ladder) {
  std::vector<double> h, eu, ev, ed;
  for (auto [Nt, Nx] : ladder) {
    const WaveProblem pb = preset_fig2(Nt, Nx, p, p);
    const SolutionBundle b = solve_semilinear(pb, pb.g, MethodId::Stabilized2nd);
    const ErrorReport r = error_norms(b, *pb.exact);
    h.push_back(r.h_t);
    eu.push_back(r.c0_l2_u);
    ev.push_back(r.c0_l2_v);
    ed.push_back(r.l2l2_dtu);
  }
  return {eoc(h, eu).back(), eoc(h, ev).back(), eoc(h, ed).back()};
}

Outcome criterion3() {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<std::pair<int, int>> ladder;
  for (int k = 0; k <= 4; ++k) ladder.emplace_back(20 << k, 40 << k);
  const char* names[3] = {"C0L2(U)", "C0L2(V)", "L2L2(dtU)"};
  for (int p = 1; p <= 2; ++p) {
    const auto r = fig2_rates(p, ladder);
    const double expect[3] = {p + 1.0, p + 1.0, static_cast<double>(p)};
    for (int k = 0; k < 3; ++k)
      o.require(std::abs(r[k] - expect[k]) <= 0.2, "p=" + std::to_string(p) + " " + names[k] + " " + fmt("%.3f", r[k]));
  }
  o.require(seconds_since(t0) <= 600.0, fmt("%.1f s", seconds_since(t0)));
  // Matched refinement h_t = h_x, where neither discretization dominates.
  std::vector<std::pair<int, int>> matched;
  for (int k = 1; k <= 4; ++k) matched.emplace_back(2 << k, 80 << k);
  for (int p = 1; p <= 2; ++p) {
    const auto r = fig2_rates(p, matched);
    std::ostringstream s;
    s << "with h_t = h_x, p=" << p << ": " << fmt("%.3f", r[0]) << ", " << fmt("%.3f", r[1]) << ", " << fmt("%.3f", r[2]);
    o.notes.push_back(s.str());
  }
  return o;
}

Outcome equivalence_criterion(bool semilinear) {
  Outcome o;
  std::mt19937_64 rng(semilinear ? 505 : 404);
  double worst = 0.0;
  const FixedPointConfig fp = fp_tol(semilinear ? 1e-13 : 1e-12);
  for (int trial = 0; trial < 20; ++trial) {
    const WaveProblem pb = random_problem(rng);
    const Nonlinearity g = semilinear ? Nonlinearity::sine_gordon() : Nonlinearity::none();
    const EquivalenceReport r = semilinear_equivalence_check(pb, g, fp);
    worst = std::max(worst, std::max(r.u_discrepancy, r.v_discrepancy) / std::max(1.0, r.scale));
  }
  o.require(worst <= 1e-9, "20 problems, worst scaled discrepancy " + fmt("%.2e", worst));
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(606);
  RandomProblemLimits lim;
  lim.max_nx = 10;
  lim.max_pt = 2;
  lim.max_cfl = kLobattoComparisonCfl;
  const FixedPointConfig fp = fp_tol(1e-13);
  double worst_gl = 0.0, worst_gll = 0.0;
  int cases = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const WaveProblem pb = random_problem(rng, lim);
    for (const Nonlinearity& g : {Nonlinearity::none(), Nonlinearity::sine_gordon()}) {
      auto compare = [&](MethodId a, MethodId b) {
        const auto x = solve_semilinear(pb, g, a, fp), y = solve_semilinear(pb, g, b, fp);
        const double scale = std::max(1.0, x.U.coefficients().cwiseAbs().maxCoeff());
        return std::max(max_diff(x.U.coefficients(), y.U.coefficients()), max_diff(x.node_velocity, y.node_velocity)) / scale;
      };
      worst_gl = std::max(worst_gl, compare(MethodId::GaussLegendre2nd, MethodId::GaussRkReference));
      worst_gll = std::max(worst_gll, compare(MethodId::GaussLobatto2nd, MethodId::LobattoIIIABReference));
      ++cases;
    }
  }
  o.require(worst_gl <= 1e-9, std::to_string(cases) + " cases, Gauss-Legendre vs Gauss " + fmt("%.2e", worst_gl));
  o.require(worst_gll <= 1e-9, "Gauss-Lobatto vs Lobatto IIIA/IIIB " + fmt("%.2e", worst_gll));
  return o;
}

Outcome criterion7() {
  Outcome o;
  const double lambda = -1.3, h = 0.2;
  const OdeRhs f = [&](double, const Eigen::VectorXd& y) { Eigen::VectorXd r = lambda * y; return r; };
  const Eigen::VectorXd y0 = Eigen::VectorXd::Constant(1, 1.0);
  const double mid = (1 + h * lambda / 2) / (1 - h * lambda / 2);
  const OdeJacobian J = [&](double, const Eigen::VectorXd&) { return Eigen::MatrixXd::Constant(1, 1, lambda); };
  const double e1 = std::abs(gauss_collocation_step(f, y0, 0.0, h, 1, {}, J)[0] - mid);
  o.require(e1 <= 1e-14, "midpoint " + fmt("%.1e", e1));

  const SemiDiscreteSystem osc =
      SemiDiscreteSystem::from_matrices(Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1));
  OdeState st{Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 0.5)};
  double u = 1.0, v = 0.5, worst = 0.0;
  for (int n = 0; n < 100; ++n) {
    st = lobatto_3ab_step(osc, st, n * 0.1, 0.1, 2).next;
    const double vh = v - 0.05 * u;
    u += 0.1 * vh;
    v = vh - 0.05 * u;
    worst = std::max({worst, std::abs(st.u[0] - u), std::abs(st.v[0] - v)});
  }
  o.require(worst <= 1e-12, "Verlet " + fmt("%.1e", worst));

  FixedPointConfig fp;
  fp.tolerance = 1e-15;
  for (int s = 1; s <= 2; ++s) {
    std::vector<double> hs, es;
    for (int N : {8, 16, 32}) {
      Eigen::VectorXd y = y0;
      for (int n = 0; n < N; ++n) y = gauss_collocation_step(f, y, n * 1.0 / N, 1.0 / N, s, fp);
      hs.push_back(1.0 / N);
      es.push_back(std::abs(y[0] - std::exp(lambda)));
    }
    const double r = eoc(hs, es).back();
    o.require(std::abs(r - 2.0 * s) <= 0.1, "s=" + std::to_string(s) + " order " + fmt("%.3f", r));
  }
  return o;
}

Outcome criterion8() {
  Outcome o;
  const WaveProblem pb = preset_fig1(4, 24, 1, 1);
  const SemiDiscreteSystem sys = SemiDiscreteSystem::from_problem(pb, Nonlinearity::none());
  const int n = static_cast<int>(sys.size());
  const double h = 0.5;
  for (MethodId m : {MethodId::GaussLegendre2nd, MethodId::GaussLobatto2nd})
    for (int p = 1; p <= 3; ++p) {
      const SecondOrderStepper stepper(sys, m, p);
      auto map = [&](const Eigen::VectorXd& y) {
        const auto st = stepper.step(y.head(n), y.tail(n), 0.0, h);
        Eigen::VectorXd r(2 * n);
        r << st.nodes.col(p), st.q;
        return r;
      };
      const double res = symplectic_residual(map, 2 * n);
      o.require(res <= 1e-10, to_string(m) + " p=" + std::to_string(p) + " " + fmt("%.1e", res));
    }
  const double eh = 0.3;
  auto euler = [&](const Eigen::VectorXd& y) {
    Eigen::VectorXd r(2);
    r << y[0] + eh * y[1], y[1] - eh * y[0];
    return r;
  };
  const double res = symplectic_residual(euler, 2);
  o.require(res >= 1e-2, "explicit Euler " + fmt("%.3f", res));
  return o;
}

Outcome criterion9() {
  Outcome o;
  const std::vector<MethodId> methods{MethodId::Stabilized2nd, MethodId::GaussLegendre2nd, MethodId::Unstabilized,
                                      MethodId::GaussLobatto2nd};
  const SweepReport s = instability_sweep(PresetId::Fig1LinearPulse, methods, {0.1, 0.5, 1.0, 2.0, 4.0}, 384, 1);
  o.require(s.bounded_everywhere(MethodId::Stabilized2nd), "stabilized bounded");
  o.require(s.bounded_everywhere(MethodId::GaussLegendre2nd), "gauss-legendre bounded");
  o.require(s.blows_up_somewhere(MethodId::Unstabilized), "unstabilized blows up");
  o.require(s.blows_up_somewhere(MethodId::GaussLobatto2nd), "gauss-lobatto blows up");
  for (const auto& e : s.entries) {
    std::ostringstream line;
    line << to_string(e.method) << " ratio " << e.ratio << ": " << (e.blew_up ? "blow-up" : "bounded")
         << ", growth " << fmt("%.3g", e.growth);
    o.notes.push_back(line.str());
  }
  return o;
}

Outcome criterion10() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto results = props::run_property_suite();
  int failed = 0;
  for (const auto& r : results)
    if (!r.passed) {
      ++failed;
      o.notes.push_back(r.name + " failed: worst " + fmt("%.2e", r.worst) + " " + r.detail);
    }
  o.require(failed == 0, std::to_string(results.size()) + " properties, " + std::to_string(failed) + " failed");
  o.require(seconds_since(t0) <= 60.0, fmt("%.1f s", seconds_since(t0)));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"energy conservation on the travelling pulse", criterion1},
      {"raw time derivative does not conserve the energy", criterion2},
      {"convergence orders on the sine-Gordon breather", criterion3},
      {"stabilized and first-order forms agree (linear)", [] { return equivalence_criterion(false); }},
      {"stabilized and first-order forms agree (sine-Gordon)", [] { return equivalence_criterion(true); }},
      {"quadrature schemes agree with their Runge-Kutta methods", criterion6},
      {"Runge-Kutta sanity checks", criterion7},
      {"symplecticity of the quadrature schemes", criterion8},
      {"stability sweep", criterion9},
      {"property suites", criterion10},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("%s criterion %zu: %s (%s) [%.1f s]\n", o.passed ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    for (const auto& n : o.notes) std::printf("    note: %s\n", n.c_str());
    std::fflush(stdout);
    if (!o.passed) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
