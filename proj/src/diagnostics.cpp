#include "wavest/diagnostics.hpp"

#include <cmath>
#include <limits>

#include "wavest/errors.hpp"
#include "wavest/projection.hpp"

namespace wavest {

std::string to_string(EnergyVariant v) {
  switch (v) {
    case EnergyVariant::LinearNodal: return "linear-nodal";
    case EnergyVariant::SemilinearNodal: return "semilinear-nodal";
    case EnergyVariant::Hamiltonian: return "hamiltonian";
  }
  return "?";
}

std::string to_string(VelocitySource v) {
  switch (v) {
    case VelocitySource::Reconstruction: return "reconstruction";
    case VelocitySource::RawTimeDerivative: return "raw-time-derivative";
    case VelocitySource::Flux: return "flux";
  }
  return "?";
}

double EnergyTrace::max_abs_drift() const {
  double d = 0.0;
  for (double e : values) {
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    d = std::max(d, std::abs(e - values.front()));
  }
  return d;
}

double EnergyTrace::max_relative_drift() const {
  const double d = max_abs_drift();
  const double e0 = values.empty() ? 0.0 : std::abs(values.front());
  return e0 > 0.0 ? d / e0 : d;
}

double EnergyTrace::growth() const {
  double m = 0.0;
  for (double e : values) {
    if (!std::isfinite(e)) return std::numeric_limits<double>::infinity();
    m = std::max(m, e);
  }
  return values.empty() || values.front() == 0.0 ? m : m / values.front();
}

SpaceTimeSolution velocity_of(const SolutionBundle& sol) {
  if (sol.V) return *sol.V;
  if (sol.blew_up()) throw DataError("velocity reconstruction unavailable after blow-up");
  return reconstruct_velocity(time_derivative(sol.U), sol.U.space(), sol.V0h);
}

EnergyTrace energy_trace(const SolutionBundle& sol, const WaveProblem& problem, EnergyVariant variant,
                         VelocitySource source, const Nonlinearity& g) {
  const TemporalMesh& tm = sol.U.time();
  const SpatialOperators ops = assemble_spatial(problem.space, problem.c);
  const int nt = tm.slabs();
  EnergyTrace tr;
  tr.variant = variant;
  tr.source = source;
  tr.blowup_slab = sol.blowup_slab;
  const bool with_g = variant != EnergyVariant::LinearNodal && !g.is_zero();
  tr.potential_inexact = with_g && g.kind != Nonlinearity::Kind::KleinGordonLinear;

  std::optional<SpaceTimeSolution> vt;
  if (source == VelocitySource::Reconstruction) vt = velocity_of(sol);
  const std::optional<std::size_t> last_ok = sol.blowup_slab;

  for (int j = 0; j <= nt; ++j) {
    const double t = tm.nodes()[j];
    tr.times.push_back(t);
    if (last_ok && static_cast<std::size_t>(j) >= *last_ok) {
      tr.values.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    const Eigen::VectorXd u = sol.U.node_value(j);
    Eigen::VectorXd v;
    switch (source) {
      case VelocitySource::Reconstruction: v = vt->node_value(j); break;
      case VelocitySource::RawTimeDerivative: v = j == 0 ? sol.U.slab_derivative(0, 0.0) : sol.U.slab_derivative(j - 1, 1.0); break;
      case VelocitySource::Flux: v = sol.node_velocity.col(j); break;
    }
    double e = 0.5 * (v.dot(ops.mass * v) + u.dot(ops.stiffness * u));
    if (with_g) e += potential_integral(problem.space, u, g.G);
    if (variant == EnergyVariant::Hamiltonian && problem.F)
      e += load_vector(problem.space, [&](double x) { return problem.F(x, t); }).dot(u);
    tr.values.push_back(e);
  }
  return tr;
}

double norm_value(const ErrorReport& r, const std::string& name) {
  if (name == "C0_L2_U") return r.c0_l2_u;
  if (name == "C0_L2_V") return r.c0_l2_v;
  if (name == "L2L2_dtU") return r.l2l2_dtu;
  if (name == "C0_L2_gradU") return r.c0_l2_gradu;
  throw DomainError("unknown norm " + name);
}

ErrorReport error_norms(const SolutionBundle& sol, const ExactSolution& exact) {
  if (!exact.U || !exact.dtU) throw DataError("exact solution needs U and dtU");
  const SpaceTimeSolution& U = sol.U;
  const TemporalMesh& tm = U.time();
  const SpatialMesh1D& sp = U.space();
  const int pt = tm.degree();
  ErrorReport rep;
  rep.h_t = tm.max_width();
  rep.h_x = sp.max_width();
  rep.p_t = pt;
  rep.p_x = sp.degree();
  if (sol.blew_up()) {
    const double inf = std::numeric_limits<double>::infinity();
    rep.c0_l2_u = rep.c0_l2_v = rep.l2l2_dtu = rep.c0_l2_gradu = inf;
    return rep;
  }
  const SpaceTimeSolution V = velocity_of(sol);
  const QuadratureRule sample = gauss_legendre_rule(pt + 3);
  const QuadratureRule tensor = gauss_legendre_rule(pt + 4);
  std::vector<double> taus{0.0};
  taus.insert(taus.end(), sample.nodes.begin(), sample.nodes.end());
  taus.push_back(1.0);
  const bool grad = static_cast<bool>(exact.dxU);
  rep.c0_l2_gradu = grad ? 0.0 : std::numeric_limits<double>::quiet_NaN();
  double l2sq = 0.0;
  for (int n = 0; n < tm.slabs(); ++n) {
    const double t0 = tm.nodes()[n];
    const double h = tm.width(n);
    for (double tau : taus) {
      const double t = t0 + tau * h;
      const Eigen::VectorXd u = U.slab_value(n, tau);
      rep.c0_l2_u = std::max(rep.c0_l2_u, l2_error(sp, u, [&](double x) { return exact.U(x, t); }));
      rep.c0_l2_v = std::max(rep.c0_l2_v, l2_error(sp, V.slab_value(n, tau), [&](double x) { return exact.dtU(x, t); }));
      if (grad)
        rep.c0_l2_gradu =
            std::max(rep.c0_l2_gradu, h1_seminorm_error(sp, u, [&](double x) { return exact.dxU(x, t); }));
    }
    for (std::size_t q = 0; q < tensor.size(); ++q) {
      const double t = t0 + tensor.nodes[q] * h;
      const double e = l2_error(sp, U.slab_derivative(n, tensor.nodes[q]), [&](double x) { return exact.dtU(x, t); });
      l2sq += h * tensor.weights[q] * e * e;
    }
  }
  rep.l2l2_dtu = std::sqrt(l2sq);
  return rep;
}

std::vector<double> eoc(const std::vector<double>& h, const std::vector<double>& errors) {
  if (h.size() != errors.size() || h.size() < 2) throw DomainError("eoc needs at least two (h, error) pairs");
  for (std::size_t k = 0; k < h.size(); ++k) {
    if (!(h[k] > 0.0) || !(errors[k] > 0.0)) throw DomainError("eoc needs positive h and errors");
    if (k > 0 && !(h[k] < h[k - 1])) throw DomainError("eoc needs strictly decreasing h");
  }
  std::vector<double> rates;
  for (std::size_t k = 0; k + 1 < h.size(); ++k)
    rates.push_back(std::log(errors[k] / errors[k + 1]) / std::log(h[k] / h[k + 1]));
  return rates;
}

std::optional<std::size_t> detect_blowup(const Eigen::MatrixXd& trace, double threshold) {
  for (Eigen::Index j = 0; j < trace.cols(); ++j) {
    const auto col = trace.col(j);
    if (!col.allFinite() || (col.size() > 0 && col.cwiseAbs().maxCoeff() > threshold))
      return static_cast<std::size_t>(j);
  }
  return std::nullopt;
}

}  // namespace wavest
