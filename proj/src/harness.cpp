#include "wavest/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "wavest/errors.hpp"
#include "wavest/plot_svg.hpp"
#include "wavest/projection.hpp"

namespace wavest {

using nlohmann::json;

std::string to_string(OutputKind k) {
  switch (k) {
    case OutputKind::EnergyTrace: return "energy_trace";
    case OutputKind::Errors: return "errors";
    case OutputKind::Eoc: return "eoc";
    case OutputKind::Equivalence: return "equivalence";
    case OutputKind::InstabilitySweep: return "instability_sweep";
    case OutputKind::Table1Matrix: return "table1_matrix";
  }
  return "?";
}

OutputKind parse_output(const std::string& name) {
  for (auto k : {OutputKind::EnergyTrace, OutputKind::Errors, OutputKind::Eoc, OutputKind::Equivalence,
                 OutputKind::InstabilitySweep, OutputKind::Table1Matrix})
    if (to_string(k) == name) return k;
  throw ConfigError("unknown output '" + name + "'");
}

std::string to_string(Mark m) {
  switch (m) {
    case Mark::Yes: return "yes";
    case Mark::No: return "no";
    case Mark::Conditional: return "conditional";
  }
  return "?";
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task, int threads) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first) first = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// ---------------------------------------------------------------- config

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
T get_as(const json& j, const std::string& where) {
  try {
    if constexpr (std::is_same_v<T, int> || std::is_same_v<T, std::uint64_t>) {
      if (!j.is_number_integer()) throw ConfigError(where + " must be an integer");
    } else if constexpr (std::is_same_v<T, double>) {
      if (!j.is_number()) throw ConfigError(where + " must be a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!j.is_string()) throw ConfigError(where + " must be a string");
    }
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<std::pair<int, int>> parse_ladder(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be a list of [N_t, N_x] pairs");
  std::vector<std::pair<int, int>> out;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) throw ConfigError(where + " entries must be [N_t, N_x]");
    out.emplace_back(get_as<int>(e[0], where), get_as<int>(e[1], where));
  }
  return out;
}

json ladder_json(const std::vector<std::pair<int, int>>& l) {
  json a = json::array();
  for (auto [t, x] : l) a.push_back({t, x});
  return a;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (preset == PresetId::Custom) throw ConfigError("the custom preset is only available through the library API");
  if (methods.empty()) throw ConfigError("methods must not be empty");
  if (ladder.empty()) throw ConfigError("ladder must not be empty");
  if (outputs.empty()) throw ConfigError("outputs must not be empty");
  if (p_t < 1 || p_t > 8 || p_x < 1 || p_x > 8) throw ConfigError("degrees must lie in [1, 8]");
  for (const auto* l : {&ladder, &quick_ladder})
    for (auto [t, x] : *l)
      if (t < 1 || x < 2) throw ConfigError("ladder entries need N_t >= 1 and N_x >= 2");
  if (ratios.empty()) throw ConfigError("sweep ratios must not be empty");
  for (double r : ratios)
    if (!(r > 0.0)) throw ConfigError("sweep ratios must be positive");
  if (sweep_nx < 0 || equivalence_trials < 0) throw ConfigError("counts must be nonnegative");
  if (!(eoc_tolerance > 0.0)) throw ConfigError("eoc_tolerance must be positive");
  if (max_energy_drift && !(*max_energy_drift > 0.0)) throw ConfigError("max_energy_drift must be positive");
  for (const auto& [k, v] : expected_eoc)
    if (std::find(norm_names().begin(), norm_names().end(), k) == norm_names().end())
      throw ConfigError("unknown norm '" + k + "' in assertions.eoc");
  try {
    fp.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("fixed_point: ") + e.what());
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["preset"] = to_string(preset);
  j["methods"] = json::array();
  for (auto m : methods) j["methods"].push_back(to_string(m));
  j["degrees"] = {{"p_t", p_t}, {"p_x", p_x}};
  j["ladder"] = ladder_json(ladder);
  if (!quick_ladder.empty()) j["quick_ladder"] = ladder_json(quick_ladder);
  j["fixed_point"] = {{"tolerance", fp.tolerance}, {"max_iterations", fp.max_iterations}, {"damping", fp.damping}};
  j["outputs"] = json::array();
  for (auto o : outputs) j["outputs"].push_back(to_string(o));
  j["output_dir"] = output_dir;
  j["seed"] = seed;
  j["sweep"] = {{"ratios", ratios}, {"n_x", sweep_nx}};
  j["equivalence"] = {{"trials", equivalence_trials}};
  json a = json::object();
  if (max_energy_drift) a["max_energy_drift"] = *max_energy_drift;
  if (!expected_eoc.empty()) a["eoc"] = expected_eoc;
  a["eoc_tolerance"] = eoc_tolerance;
  j["assertions"] = a;
  return j.dump();
}

std::string ExperimentConfig::hash() const {
  std::ostringstream o;
  o << std::hex << std::setw(16) << std::setfill('0') << fnv1a(to_json());
  return o.str();
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"preset", "methods", "degrees", "ladder", "quick_ladder", "fixed_point", "outputs", "output_dir",
                 "seed", "sweep", "equivalence", "assertions"},
             "config");
  for (const char* req : {"preset", "methods", "ladder", "outputs"})
    if (!j.contains(req)) throw ConfigError(std::string("missing required key '") + req + "'");
  ExperimentConfig c;
  c.preset = parse_preset(get_as<std::string>(j["preset"], "preset"));
  if (!j["methods"].is_array()) throw ConfigError("methods must be a list");
  c.methods.clear();
  for (const auto& m : j["methods"]) {
    try {
      c.methods.push_back(parse_method(get_as<std::string>(m, "methods")));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("degrees")) {
    check_keys(j["degrees"], {"p_t", "p_x"}, "degrees");
    if (j["degrees"].contains("p_t")) c.p_t = get_as<int>(j["degrees"]["p_t"], "degrees.p_t");
    if (j["degrees"].contains("p_x")) c.p_x = get_as<int>(j["degrees"]["p_x"], "degrees.p_x");
  }
  c.ladder = parse_ladder(j["ladder"], "ladder");
  if (j.contains("quick_ladder")) c.quick_ladder = parse_ladder(j["quick_ladder"], "quick_ladder");
  if (j.contains("fixed_point")) {
    const json& f = j["fixed_point"];
    check_keys(f, {"tolerance", "max_iterations", "damping"}, "fixed_point");
    if (f.contains("tolerance")) c.fp.tolerance = get_as<double>(f["tolerance"], "fixed_point.tolerance");
    if (f.contains("max_iterations")) c.fp.max_iterations = get_as<int>(f["max_iterations"], "fixed_point.max_iterations");
    if (f.contains("damping")) c.fp.damping = get_as<double>(f["damping"], "fixed_point.damping");
  }
  if (!j["outputs"].is_array()) throw ConfigError("outputs must be a list");
  for (const auto& o : j["outputs"]) c.outputs.insert(parse_output(get_as<std::string>(o, "outputs")));
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  if (j.contains("seed")) c.seed = get_as<std::uint64_t>(j["seed"], "seed");
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    check_keys(s, {"ratios", "n_x"}, "sweep");
    if (s.contains("ratios")) {
      if (!s["ratios"].is_array()) throw ConfigError("sweep.ratios must be a list");
      c.ratios.clear();
      for (const auto& r : s["ratios"]) c.ratios.push_back(get_as<double>(r, "sweep.ratios"));
    }
    if (s.contains("n_x")) c.sweep_nx = get_as<int>(s["n_x"], "sweep.n_x");
  }
  if (j.contains("equivalence")) {
    check_keys(j["equivalence"], {"trials"}, "equivalence");
    if (j["equivalence"].contains("trials")) c.equivalence_trials = get_as<int>(j["equivalence"]["trials"], "equivalence.trials");
  }
  if (j.contains("assertions")) {
    const json& a = j["assertions"];
    check_keys(a, {"max_energy_drift", "eoc", "eoc_tolerance"}, "assertions");
    if (a.contains("max_energy_drift")) c.max_energy_drift = get_as<double>(a["max_energy_drift"], "assertions.max_energy_drift");
    if (a.contains("eoc")) {
      if (!a["eoc"].is_object()) throw ConfigError("assertions.eoc must map norm names to rates");
      for (const auto& [k, v] : a["eoc"].items()) c.expected_eoc[k] = get_as<double>(v, "assertions.eoc." + k);
    }
    if (a.contains("eoc_tolerance")) c.eoc_tolerance = get_as<double>(a["eoc_tolerance"], "assertions.eoc_tolerance");
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

// ---------------------------------------------------------------- random problems

WaveProblem random_problem(std::mt19937_64& rng, const RandomProblemLimits& lim) {
  using std::numbers::pi;
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto uni = [&](double a, double b) { return a + (b - a) * U(rng); };
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int pt = pick(1, lim.max_pt), px = pick(1, lim.max_px);
  const int nt = pick(1, lim.max_nt), nx = pick(2, lim.max_nx);
  const double a = uni(-1.0, 1.0), L = uni(0.5, 3.0), T = uni(0.2, 2.0);

  auto jitter = [&](double lo, double hi, int n) {
    std::vector<double> v(n + 1);
    for (int i = 0; i <= n; ++i) v[i] = lo + (hi - lo) * i / n;
    for (int i = 1; i < n; ++i) v[i] += uni(-0.2, 0.2) * (hi - lo) / n;
    return v;
  };
  WaveProblem p;
  p.name = "random";
  p.space = SpatialMesh1D(jitter(a, a + L, nx), px);
  const std::vector<double> tnodes = jitter(0.0, T, nt);
  p.time = TemporalMesh(tnodes, pt);
  const double c0 = uni(0.5, 2.0), c1 = uni(-0.4, 0.4) * c0, ck = uni(0.5, 3.0);
  p.c = [=](double x) { return c0 + c1 * std::sin(ck * x); };
  if (lim.max_cfl > 0.0) {
    const double cfl = cfl_number(p);
    if (cfl > lim.max_cfl) {
      const int factor = static_cast<int>(std::ceil(cfl / lim.max_cfl));
      std::vector<double> fine{0.0};
      for (int n = 0; n < nt; ++n)
        for (int k = 1; k <= factor; ++k) fine.push_back(tnodes[n] + (tnodes[n + 1] - tnodes[n]) * k / factor);
      fine.back() = T;
      p.time = TemporalMesh(fine, pt);
    }
  }
  const double A = uni(-1.0, 1.0), B = uni(-0.5, 0.5), C = uni(-1.0, 1.0);
  const double k1 = pi / L, k2 = 2.0 * pi / L;
  p.U0 = [=](double x) { return A * std::sin(k1 * (x - a)) + B * std::sin(k2 * (x - a)); };
  p.dU0 = [=](double x) { return A * k1 * std::cos(k1 * (x - a)) + B * k2 * std::cos(k2 * (x - a)); };
  p.V0 = [=](double x) { return C * std::sin(k1 * (x - a)) * std::cos(x); };
  if (lim.source) {
    const double D = uni(-1.0, 1.0), w = uni(0.5, 4.0), ph = uni(0.0, 2.0 * pi);
    const int m = pick(1, 3);
    p.F = [=](double x, double t) { return D * std::sin(m * k1 * (x - a)) * std::cos(w * t + ph); };
  }
  return p;
}

double cfl_number(const WaveProblem& problem) {
  const SpatialMesh1D& sp = problem.space;
  double hmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
  for (int e = 0; e < sp.elements(); ++e) {
    hmin = std::min(hmin, sp.element_width(e));
    for (int k = 0; k <= 8; ++k) cmax = std::max(cmax, std::abs(problem.c(sp.nodes()[e] + sp.element_width(e) * k / 8.0)));
  }
  return problem.time.max_width() * cmax * sp.degree() * sp.degree() / hmin;
}

// ---------------------------------------------------------------- sweep and table

bool SweepReport::bounded_everywhere(MethodId m) const {
  bool any = false;
  for (const auto& e : entries)
    if (e.method == m) {
      any = true;
      if (e.blew_up) return false;
    }
  return any;
}

bool SweepReport::blows_up_somewhere(MethodId m) const {
  return std::any_of(entries.begin(), entries.end(), [&](const SweepEntry& e) { return e.method == m && e.blew_up; });
}

SweepReport instability_sweep(PresetId preset, const std::vector<MethodId>& methods, const std::vector<double>& ratios,
                              int Nx, int degree, const FixedPointConfig& fp, int threads) {
  if (ratios.empty() || methods.empty()) throw DomainError("sweep needs methods and ratios");
  const WaveProblem probe = make_preset(preset, 1, Nx, degree, degree);
  const double T = probe.time.final_time();
  const double hx = probe.space.max_width();
  SweepReport rep;
  rep.preset = to_string(preset);
  rep.degree = degree;
  for (double r : ratios)
    for (MethodId m : methods) {
      if (!(r > 0.0)) throw DomainError("sweep ratios must be positive");
      SweepEntry e;
      e.method = m;
      e.ratio = r;
      e.N_x = Nx;
      e.N_t = std::max(1, static_cast<int>(std::lround(T / (r * hx))));
      rep.entries.push_back(e);
    }
  parallel_for(
      rep.entries.size(),
      [&](std::size_t i) {
        SweepEntry& e = rep.entries[i];
        const WaveProblem pb = make_preset(preset, e.N_t, e.N_x, degree, degree);
        try {
          const SolutionBundle s = solve_semilinear(pb, pb.g, e.method, fp);
          const EnergyVariant var = pb.g.is_zero() ? EnergyVariant::LinearNodal : EnergyVariant::SemilinearNodal;
          e.growth = energy_trace(s, pb, var, VelocitySource::Flux, pb.g).growth();
          e.blowup_slab = s.blowup_slab;
          e.blew_up = s.blew_up() || !(e.growth <= kSweepGrowthLimit);
        } catch (const ConvergenceError&) {
          e.blew_up = true;
          e.growth = std::numeric_limits<double>::infinity();
        }
      },
      threads);
  return rep;
}

std::vector<std::array<Mark, 3>> expected_table1() {
  return {{Mark::Conditional, Mark::No, Mark::Yes},
          {Mark::Yes, Mark::Yes, Mark::No},
          {Mark::Yes, Mark::No, Mark::Yes},
          {Mark::Conditional, Mark::No, Mark::Yes}};
}

bool Table1Report::matches_expected() const {
  const auto exp = expected_table1();
  if (rows.size() != exp.size()) return false;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].stability != exp[i][0] || rows[i].energy != exp[i][1] || rows[i].symplecticity != exp[i][2]) return false;
  return true;
}

namespace {

double sine_gordon_symplectic_residual(MethodId m, int degree) {
  const WaveProblem pb = preset_fig2(4, 10, degree, degree);
  const SemiDiscreteSystem sys = SemiDiscreteSystem::from_problem(pb, Nonlinearity::sine_gordon());
  const Eigen::Index n = sys.size();
  FixedPointConfig fp;
  fp.tolerance = 1e-14;
  fp.max_iterations = 500;
  const SecondOrderStepper st(sys, m, degree, fp);
  Eigen::VectorXd base(2 * n);
  for (Eigen::Index i = 0; i < 2 * n; ++i) base[i] = 1.5 * std::sin(1.3 * static_cast<double>(i) + 0.2);
  auto map = [&](const Eigen::VectorXd& x) {
    const auto s = st.step(x.head(n), x.tail(n), 0.0, 0.25);
    Eigen::VectorXd y(2 * n);
    y << s.nodes.col(degree), s.q;
    return y;
  };
  return symplectic_residual(map, static_cast<int>(2 * n), 1e-5, base);
}

double sine_gordon_energy_drift(MethodId m, int degree) {
  WaveProblem pb = preset_fig2(20, 80, degree, degree);
  pb.time = TemporalMesh::uniform(4.0, 20, degree);
  FixedPointConfig fp;
  fp.tolerance = 1e-13;
  const SolutionBundle s = solve_semilinear(pb, pb.g, m, fp);
  return energy_trace(s, pb, EnergyVariant::SemilinearNodal, VelocitySource::Flux, pb.g).max_relative_drift();
}

}  // namespace

Table1Report table1_matrix(int degree, int threads) {
  const std::vector<MethodId> methods{MethodId::Unstabilized, MethodId::Stabilized2nd, MethodId::GaussLegendre2nd,
                                      MethodId::GaussLobatto2nd};
  Table1Report rep;
  rep.degree = degree;
  const SweepReport sw =
      instability_sweep(PresetId::Fig1LinearPulse, methods, {0.1, 0.5, 1.0, 2.0, 4.0}, 384, degree, {}, threads);
  rep.rows.resize(methods.size());
  parallel_for(
      methods.size(),
      [&](std::size_t i) {
        Table1Row& row = rep.rows[i];
        row.method = methods[i];
        for (const auto& e : sw.entries)
          if (e.method == row.method && e.blew_up) row.blowup_ratios.push_back(e.ratio);
        const bool ok_small = std::none_of(sw.entries.begin(), sw.entries.end(), [&](const SweepEntry& e) {
          return e.method == row.method && e.blew_up && e.ratio == 0.1;
        });
        row.stability = row.blowup_ratios.empty() ? Mark::Yes : (ok_small ? Mark::Conditional : Mark::No);
        row.energy_drift = sine_gordon_energy_drift(row.method, degree);
        row.energy = row.energy_drift <= rep.energy_tolerance ? Mark::Yes : Mark::No;
        row.symplectic_residual = sine_gordon_symplectic_residual(row.method, degree);
        row.symplecticity = row.symplectic_residual <= rep.symplectic_tolerance ? Mark::Yes : Mark::No;
      },
      threads);
  return rep;
}

// ---------------------------------------------------------------- run

bool RunReport::all_passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const AssertionResult& a) { return a.passed; });
}

namespace {

RunRecord execute(const ExperimentConfig& cfg, MethodId method, int Nt, int Nx, const std::string& hash) {
  RunRecord r;
  r.config_hash = hash;
  r.seed = cfg.seed;
  r.preset = to_string(cfg.preset);
  r.method = method;
  r.p_t = cfg.p_t;
  r.p_x = cfg.p_x;
  r.N_t = Nt;
  r.N_x = Nx;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const WaveProblem pb = make_preset(cfg.preset, Nt, Nx, cfg.p_t, cfg.p_x);
    r.h_t = pb.time.max_width();
    r.h_x = pb.space.max_width();
    const SolutionBundle s = solve_semilinear(pb, pb.g, method, cfg.fp);
    r.blowup_slab = s.blowup_slab;
    for (int it : s.iterations) {
      r.iterations_max = std::max(r.iterations_max, it);
      r.iterations_total += it;
    }
    if (!s.iterations.empty()) r.iterations_mean = static_cast<double>(r.iterations_total) / s.iterations.size();
    if (cfg.outputs.count(OutputKind::EnergyTrace)) {
      const EnergyVariant var = pb.g.is_zero() ? EnergyVariant::LinearNodal : EnergyVariant::SemilinearNodal;
      const VelocitySource src = s.blew_up() ? VelocitySource::Flux : VelocitySource::Reconstruction;
      r.energy = energy_trace(s, pb, var, src, pb.g);
      r.energy_drift = r.energy->max_relative_drift();
      r.raw_energy_drift = energy_trace(s, pb, var, VelocitySource::RawTimeDerivative, pb.g).max_relative_drift();
    }
    if ((cfg.outputs.count(OutputKind::Errors) || cfg.outputs.count(OutputKind::Eoc)) && pb.exact)
      r.norms = error_norms(s, *pb.exact);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  return (a - b).cwiseAbs().maxCoeff();
}

void equivalence_checks(const WaveProblem& pb, const std::string& label, const FixedPointConfig& fp,
                        std::vector<EquivalenceRecord>& out) {
  FixedPointConfig tight = fp;
  tight.tolerance = std::min(fp.tolerance, 1e-13);
  auto push = [&](std::string kind, double d, double scale, bool skipped) {
    EquivalenceRecord e;
    e.kind = std::move(kind);
    e.problem = label;
    e.discrepancy = d;
    e.scale = scale;
    e.tolerance = 1e-9 * std::max(1.0, scale);
    e.skipped = skipped;
    e.passed = skipped || d <= e.tolerance;
    out.push_back(e);
  };
  try {
    const EquivalenceReport r = semilinear_equivalence_check(pb, pb.g, tight);
    push("stabilized-dgcg", std::max(r.u_discrepancy, r.v_discrepancy), r.scale, false);
  } catch (const std::exception&) {
    push("stabilized-dgcg", std::numeric_limits<double>::infinity(), 0.0, false);
  }
  if (pb.time.degree() <= 8) {
    const auto pairs = {std::pair{MethodId::GaussLegendre2nd, MethodId::GaussRkReference},
                        std::pair{MethodId::GaussLobatto2nd, MethodId::LobattoIIIABReference}};
    for (auto [a, b] : pairs) {
      const std::string kind = a == MethodId::GaussLegendre2nd ? "gauss-legendre-rk" : "gauss-lobatto-3ab";
      if (a == MethodId::GaussLobatto2nd && cfl_number(pb) > kLobattoComparisonCfl) {
        push(kind, 0.0, 0.0, true);
        continue;
      }
      try {
        const SolutionBundle x = solve_semilinear(pb, pb.g, a, tight);
        const SolutionBundle y = solve_semilinear(pb, pb.g, b, tight);
        if (x.blew_up() || y.blew_up()) {
          push(kind, 0.0, 0.0, true);
          continue;
        }
        const double d = std::max(max_abs_diff(x.U.coefficients(), y.U.coefficients()),
                                  max_abs_diff(x.node_velocity, y.node_velocity));
        push(kind, d, x.U.coefficients().cwiseAbs().maxCoeff(), false);
      } catch (const std::exception&) {
        push(kind, std::numeric_limits<double>::infinity(), 0.0, false);
      }
    }
  }
}

std::string fmt(double v) {
  std::ostringstream o;
  o << std::setprecision(4) << v;
  return o.str();
}

}  // namespace

RunReport run(const ExperimentConfig& config, const RunOptions& options) {
  ExperimentConfig cfg = config;
  if (options.seed) cfg.seed = *options.seed;
  if (options.output_dir) cfg.output_dir = *options.output_dir;
  if (options.quick) {
    if (!cfg.quick_ladder.empty()) {
      cfg.ladder = cfg.quick_ladder;
    } else {
      for (auto& [t, x] : cfg.ladder) {
        t = std::max(1, t / 4);
        x = std::max(2, x / 4);
      }
    }
    cfg.quick_ladder.clear();
  }
  cfg.validate();

  RunReport rep;
  rep.config = cfg;
  rep.config_hash = cfg.hash();
  rep.seed = cfg.seed;

  const bool want_runs = cfg.outputs.count(OutputKind::EnergyTrace) || cfg.outputs.count(OutputKind::Errors) ||
                         cfg.outputs.count(OutputKind::Eoc);
  if (want_runs) {
    std::vector<std::tuple<MethodId, int, int>> jobs;
    for (MethodId m : cfg.methods)
      for (auto [t, x] : cfg.ladder) jobs.emplace_back(m, t, x);
    rep.records.resize(jobs.size());
    parallel_for(
        jobs.size(),
        [&](std::size_t i) {
          const auto [m, t, x] = jobs[i];
          rep.records[i] = execute(cfg, m, t, x, rep.config_hash);
        },
        options.threads);
    std::vector<std::string> failed;
    for (const auto& r : rep.records)
      if (!r.error.empty()) failed.push_back(to_string(r.method) + " " + std::to_string(r.N_t) + "x" + std::to_string(r.N_x) + ": " + r.error);
    std::string detail = failed.empty() ? std::to_string(rep.records.size()) + " runs" : failed.front();
    rep.assertions.push_back({"runs completed", failed.empty(), detail});
  }

  if (cfg.outputs.count(OutputKind::EnergyTrace) && cfg.max_energy_drift) {
    double worst = 0.0;
    for (const auto& r : rep.records)
      worst = std::max(worst, r.energy_drift.value_or(std::numeric_limits<double>::infinity()));
    rep.assertions.push_back({"energy drift", worst <= *cfg.max_energy_drift,
                              "max relative drift " + fmt(worst) + " (limit " + fmt(*cfg.max_energy_drift) + ")"});
  }

  if (cfg.outputs.count(OutputKind::Eoc) && cfg.ladder.size() >= 2) {
    for (MethodId m : cfg.methods) {
      std::vector<const RunRecord*> rs;
      for (const auto& r : rep.records)
        if (r.method == m && r.norms) rs.push_back(&r);
      if (rs.size() < 2) continue;
      for (const auto& name : norm_names()) {
        EocRow row{m, name, {}, {}, {}};
        const bool by_t = rs[1]->h_t < rs[0]->h_t;
        for (const auto* r : rs) {
          row.h.push_back(by_t ? r->h_t : r->h_x);
          row.errors.push_back(norm_value(*r->norms, name));
        }
        try {
          row.rates = eoc(row.h, row.errors);
        } catch (const DomainError&) {
          row.rates.assign(row.h.size() - 1, std::numeric_limits<double>::quiet_NaN());
        }
        rep.eoc.push_back(row);
      }
    }
    for (const auto& [name, target] : cfg.expected_eoc)
      for (const auto& row : rep.eoc)
        if (row.norm == name) {
          const double last = row.rates.empty() ? std::numeric_limits<double>::quiet_NaN() : row.rates.back();
          rep.assertions.push_back({"eoc " + to_string(row.method) + " " + name,
                                    std::abs(last - target) <= cfg.eoc_tolerance,
                                    "observed " + fmt(last) + ", expected " + fmt(target) + " +- " + fmt(cfg.eoc_tolerance)});
        }
  }

  if (cfg.outputs.count(OutputKind::Equivalence)) {
    std::vector<std::vector<EquivalenceRecord>> parts(cfg.ladder.size() + static_cast<std::size_t>(cfg.equivalence_trials));
    std::vector<WaveProblem> problems;
    std::vector<std::string> labels;
    for (auto [t, x] : cfg.ladder) {
      problems.push_back(make_preset(cfg.preset, t, x, cfg.p_t, cfg.p_x));
      labels.push_back(to_string(cfg.preset) + " " + std::to_string(t) + "x" + std::to_string(x));
    }
    std::mt19937_64 rng(cfg.seed);
    for (int k = 0; k < cfg.equivalence_trials; ++k) {
      WaveProblem p = random_problem(rng);
      if (k % 2 == 1) p.g = Nonlinearity::sine_gordon();
      problems.push_back(std::move(p));
      labels.push_back("random " + std::to_string(k) + (k % 2 ? " sin" : " linear"));
    }
    parallel_for(problems.size(), [&](std::size_t i) { equivalence_checks(problems[i], labels[i], cfg.fp, parts[i]); },
                 options.threads);
    for (auto& p : parts) rep.equivalence.insert(rep.equivalence.end(), p.begin(), p.end());
    double worst = 0.0;
    bool ok = true;
    for (const auto& e : rep.equivalence) {
      ok = ok && e.passed;
      if (!e.skipped) worst = std::max(worst, e.discrepancy / std::max(1.0, e.scale));
    }
    rep.assertions.push_back({"equivalence", ok, "max scaled discrepancy " + fmt(worst)});
  }

  if (cfg.outputs.count(OutputKind::InstabilitySweep)) {
    const int nx = cfg.sweep_nx > 0 ? cfg.sweep_nx : cfg.ladder.front().second;
    rep.sweep = instability_sweep(cfg.preset,
                                  {MethodId::Unstabilized, MethodId::GaussLobatto2nd, MethodId::Stabilized2nd,
                                   MethodId::GaussLegendre2nd},
                                  cfg.ratios, nx, cfg.p_t, cfg.fp, options.threads);
    const bool ok = rep.sweep->bounded_everywhere(MethodId::Stabilized2nd) &&
                    rep.sweep->bounded_everywhere(MethodId::GaussLegendre2nd);
    rep.assertions.push_back({"unconditionally stable methods bounded", ok, "stabilized and gauss-legendre over the ratio ladder"});
  }

  if (cfg.outputs.count(OutputKind::Table1Matrix)) {
    rep.table1 = table1_matrix(cfg.p_t, options.threads);
    rep.assertions.push_back({"property matrix", rep.table1->matches_expected(), "four methods x three properties"});
  }

  if (options.write_files) write_outputs(rep, cfg.output_dir);
  return rep;
}

// ---------------------------------------------------------------- emission

namespace {

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json record_json(const RunRecord& r) {
  json j;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["preset"] = r.preset;
  j["method"] = to_string(r.method);
  j["mesh"] = {{"p_t", r.p_t}, {"p_x", r.p_x}, {"N_t", r.N_t}, {"N_x", r.N_x}, {"h_t", r.h_t}, {"h_x", r.h_x}};
  if (r.norms) {
    json n;
    for (const auto& name : norm_names()) n[name] = num_or_null(norm_value(*r.norms, name));
    j["norms"] = n;
  }
  if (r.energy_drift) j["energy_drift"] = num_or_null(*r.energy_drift);
  if (r.raw_energy_drift) j["raw_energy_drift"] = num_or_null(*r.raw_energy_drift);
  j["iterations"] = {{"max", r.iterations_max}, {"mean", r.iterations_mean}, {"total", r.iterations_total}};
  j["blowup_slab"] = r.blowup_slab ? json(*r.blowup_slab) : json(nullptr);
  j["wall_seconds"] = r.wall_seconds;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

std::string csv_num(double v) {
  std::ostringstream o;
  o << std::setprecision(17) << v;
  return o.str();
}

}  // namespace

std::string report_json(const RunReport& rep) {
  json j;
  j["schema_version"] = rep.schema_version;
  j["config_hash"] = rep.config_hash;
  j["seed"] = rep.seed;
  j["config"] = json::parse(rep.config.to_json());
  j["records"] = json::array();
  for (const auto& r : rep.records) j["records"].push_back(record_json(r));
  j["eoc"] = json::array();
  for (const auto& e : rep.eoc) {
    json rates = json::array();
    for (double r : e.rates) rates.push_back(num_or_null(r));
    j["eoc"].push_back({{"method", to_string(e.method)}, {"norm", e.norm}, {"h", e.h}, {"errors", e.errors}, {"rates", rates}});
  }
  j["equivalence"] = json::array();
  for (const auto& e : rep.equivalence)
    j["equivalence"].push_back({{"kind", e.kind}, {"problem", e.problem}, {"discrepancy", num_or_null(e.discrepancy)},
                                {"scale", e.scale}, {"tolerance", e.tolerance}, {"skipped", e.skipped}, {"passed", e.passed}});
  if (rep.sweep) {
    json s;
    s["preset"] = rep.sweep->preset;
    s["degree"] = rep.sweep->degree;
    s["entries"] = json::array();
    for (const auto& e : rep.sweep->entries)
      s["entries"].push_back({{"method", to_string(e.method)}, {"ratio", e.ratio}, {"N_t", e.N_t}, {"N_x", e.N_x},
                              {"blew_up", e.blew_up}, {"blowup_slab", e.blowup_slab ? json(*e.blowup_slab) : json(nullptr)},
                              {"growth", num_or_null(e.growth)}});
    j["sweep"] = s;
  }
  if (rep.table1) {
    json t;
    t["degree"] = rep.table1->degree;
    t["matches_expected"] = rep.table1->matches_expected();
    t["rows"] = json::array();
    for (const auto& r : rep.table1->rows)
      t["rows"].push_back({{"method", to_string(r.method)}, {"stability", to_string(r.stability)},
                           {"energy_preservation", to_string(r.energy)}, {"symplecticity", to_string(r.symplecticity)},
                           {"energy_drift", num_or_null(r.energy_drift)}, {"symplectic_residual", num_or_null(r.symplectic_residual)},
                           {"blowup_ratios", r.blowup_ratios}});
    j["table1"] = t;
  }
  j["assertions"] = json::array();
  for (const auto& a : rep.assertions) j["assertions"].push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  j["passed"] = rep.all_passed();
  return j.dump(2) + "\n";
}

void write_outputs(const RunReport& rep, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(fs::path(dir) / name);
    if (!f) throw DataError("cannot write " + (fs::path(dir) / name).string());
    return f;
  };
  {
    auto f = open("report.json");
    f << report_json(rep);
  }
  bool any_norms = false, any_energy = false;
  for (const auto& r : rep.records) {
    any_norms = any_norms || r.norms.has_value();
    any_energy = any_energy || r.energy.has_value();
  }
  if (any_norms) {
    auto f = open("errors.csv");
    f << "method,p_t,p_x,N_t,N_x,h_t,h_x,norm_name,value\n";
    for (const auto& r : rep.records)
      if (r.norms)
        for (const auto& name : norm_names())
          f << to_string(r.method) << ',' << r.p_t << ',' << r.p_x << ',' << r.N_t << ',' << r.N_x << ','
            << csv_num(r.h_t) << ',' << csv_num(r.h_x) << ',' << name << ',' << csv_num(norm_value(*r.norms, name)) << '\n';
  }
  if (any_energy) {
    auto f = open("energy.csv");
    f << "method,p_t,p_x,N_t,N_x,t_j,E,drift\n";
    std::vector<PlotSeries> series;
    for (const auto& r : rep.records) {
      if (!r.energy) continue;
      const auto& e = *r.energy;
      PlotSeries s{to_string(r.method) + " " + std::to_string(r.N_t) + "x" + std::to_string(r.N_x), {}, {}, false};
      for (std::size_t k = 0; k < e.values.size(); ++k) {
        const double drift = std::abs(e.values[k] - e.values.front());
        f << to_string(r.method) << ',' << r.p_t << ',' << r.p_x << ',' << r.N_t << ',' << r.N_x << ','
          << csv_num(e.times[k]) << ',' << csv_num(e.values[k]) << ',' << csv_num(drift) << '\n';
        if (k > 0) {
          s.x.push_back(e.times[k]);
          s.y.push_back(std::max(drift, 1e-18));
        }
      }
      series.push_back(std::move(s));
    }
    write_svg((fs::path(dir) / "energy_drift.svg").string(),
              PlotSpec{"energy drift |E(t_j) - E(0)|", "t", "drift", false, true}, series);
  }
  if (!rep.eoc.empty()) {
    auto f = open("eoc.csv");
    f << "method,norm,level,h,error,rate\n";
    for (const auto& row : rep.eoc)
      for (std::size_t k = 0; k < row.h.size(); ++k)
        f << to_string(row.method) << ',' << row.norm << ',' << k << ',' << csv_num(row.h[k]) << ','
          << csv_num(row.errors[k]) << ',' << (k == 0 ? std::string() : csv_num(row.rates[k - 1])) << '\n';
    for (MethodId m : rep.config.methods) {
      std::vector<PlotSeries> series;
      std::vector<double> hs;
      double anchor = 0.0;
      for (const auto& row : rep.eoc)
        if (row.method == m) {
          series.push_back({row.norm, row.h, row.errors, false});
          hs = row.h;
          anchor = std::max(anchor, row.errors.front());
        }
      if (series.empty()) continue;
      for (int order : {rep.config.p_t, rep.config.p_t + 1}) {
        PlotSeries ref{"slope " + std::to_string(order), hs, {}, true};
        for (double h : hs) ref.y.push_back(anchor * std::pow(h / hs.front(), order));
        series.push_back(std::move(ref));
      }
      write_svg((fs::path(dir) / ("errors_" + to_string(m) + ".svg")).string(),
                PlotSpec{"errors, " + to_string(m), "h", "error", true, true}, series);
    }
  }
  if (!rep.equivalence.empty()) {
    auto f = open("equivalence.csv");
    f << "kind,problem,discrepancy,scale,tolerance,skipped,passed\n";
    for (const auto& e : rep.equivalence)
      f << e.kind << ',' << e.problem << ',' << csv_num(e.discrepancy) << ',' << csv_num(e.scale) << ','
        << csv_num(e.tolerance) << ',' << e.skipped << ',' << e.passed << '\n';
  }
  if (rep.sweep) {
    auto f = open("sweep.csv");
    f << "method,ratio,N_t,N_x,blew_up,blowup_slab,growth\n";
    for (const auto& e : rep.sweep->entries)
      f << to_string(e.method) << ',' << csv_num(e.ratio) << ',' << e.N_t << ',' << e.N_x << ',' << e.blew_up << ','
        << (e.blowup_slab ? std::to_string(*e.blowup_slab) : std::string()) << ',' << csv_num(e.growth) << '\n';
  }
  if (rep.table1) {
    auto f = open("table1.csv");
    f << "method,stability,energy_preservation,symplecticity,energy_drift,symplectic_residual\n";
    for (const auto& r : rep.table1->rows)
      f << to_string(r.method) << ',' << to_string(r.stability) << ',' << to_string(r.energy) << ','
        << to_string(r.symplecticity) << ',' << csv_num(r.energy_drift) << ',' << csv_num(r.symplectic_residual) << '\n';
  }
}

}  // namespace wavest
