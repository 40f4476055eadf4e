#pragma once

// Experiment runner: configs, benchmark runs, equivalence checks, the instability
// sweep, the property matrix and result emission.

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wavest/diagnostics.hpp"
#include "wavest/presets.hpp"
#include "wavest/solver_semilinear.hpp"

namespace wavest {

inline constexpr int kReportSchemaVersion = 1;

enum class OutputKind { EnergyTrace, Errors, Eoc, Equivalence, InstabilitySweep, Table1Matrix };
std::string to_string(OutputKind k);
OutputKind parse_output(const std::string& name);

struct ExperimentConfig {
  PresetId preset = PresetId::Fig1LinearPulse;
  std::vector<MethodId> methods{MethodId::Stabilized2nd};
  int p_t = 1;
  int p_x = 1;
  std::vector<std::pair<int, int>> ladder;        // (N_t, N_x)
  std::vector<std::pair<int, int>> quick_ladder;  // empty: ladder entries divided by 4
  FixedPointConfig fp;
  std::set<OutputKind> outputs;
  std::string output_dir = "wavest-out";
  std::uint64_t seed = 0;
  std::vector<double> ratios{0.1, 0.5, 1.0, 2.0, 4.0};
  int sweep_nx = 0;  // 0: N_x of the first ladder entry
  int equivalence_trials = 0;
  std::optional<double> max_energy_drift;
  std::map<std::string, double> expected_eoc;  // norm name -> rate
  double eoc_tolerance = 0.2;

  /// Throws ConfigError.
  void validate() const;
  /// Canonical JSON text (sorted keys); the basis of hash().
  std::string to_json() const;
  std::string hash() const;
};

/// Strict parse: unknown keys, wrong types and invalid values raise ConfigError.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);

struct RunOptions {
  bool quick = false;
  std::optional<std::string> output_dir;
  std::optional<std::uint64_t> seed;
  bool write_files = true;
  int threads = 0;  // 0: hardware concurrency
};

struct RunRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string preset;
  MethodId method = MethodId::Stabilized2nd;
  int p_t = 1, p_x = 1, N_t = 0, N_x = 0;
  double h_t = 0.0, h_x = 0.0;
  std::optional<ErrorReport> norms;
  std::optional<EnergyTrace> energy;
  std::optional<double> energy_drift;
  std::optional<double> raw_energy_drift;
  int iterations_max = 0;
  double iterations_mean = 0.0;
  long iterations_total = 0;
  std::optional<std::size_t> blowup_slab;
  double wall_seconds = 0.0;
  std::string error;  // non-empty when the run failed
};

struct EocRow {
  MethodId method;
  std::string norm;
  std::vector<double> h;
  std::vector<double> errors;
  std::vector<double> rates;
};

struct EquivalenceRecord {
  std::string kind;  // stabilized-dgcg, gauss-legendre-rk, gauss-lobatto-3ab
  std::string problem;
  double discrepancy = 0.0;
  double scale = 0.0;
  double tolerance = 0.0;
  bool skipped = false;
  bool passed = true;
};

struct SweepEntry {
  MethodId method;
  double ratio = 0.0;
  int N_t = 0;
  int N_x = 0;
  bool blew_up = false;
  std::optional<std::size_t> blowup_slab;
  double growth = 0.0;
};

struct SweepReport {
  std::string preset;
  int degree = 1;
  std::vector<SweepEntry> entries;

  bool bounded_everywhere(MethodId m) const;
  bool blows_up_somewhere(MethodId m) const;
};

/// Energy growth above this factor counts as blow-up in the sweep.
inline constexpr double kSweepGrowthLimit = 1e3;

/// h_t = ratio * h_x with N_t = round(T / h_t). Methods run in a work pool.
SweepReport instability_sweep(PresetId preset, const std::vector<MethodId>& methods, const std::vector<double>& ratios,
                              int Nx, int degree, const FixedPointConfig& fp = {}, int threads = 0);

enum class Mark { Yes, No, Conditional };
std::string to_string(Mark m);

struct Table1Row {
  MethodId method;
  Mark stability = Mark::No;
  Mark energy = Mark::No;
  Mark symplecticity = Mark::No;
  double energy_drift = 0.0;
  double symplectic_residual = 0.0;
  std::vector<double> blowup_ratios;
};

struct Table1Report {
  int degree = 1;
  std::vector<Table1Row> rows;
  /// Stability: bounded over the fig1 sweep. Energy: semilinear nodal drift on
  /// sine-Gordon at most energy_tolerance. Symplecticity: finite-difference residual of
  /// the sine-Gordon step map at most symplectic_tolerance.
  double energy_tolerance = 1e-10;
  double symplectic_tolerance = 1e-6;
  bool matches_expected() const;
};

/// The property matrix for Unstabilized, Stabilized2nd, GaussLegendre2nd, GaussLobatto2nd.
Table1Report table1_matrix(int degree = 1, int threads = 0);
/// Rows of the expected matrix, same order.
std::vector<std::array<Mark, 3>> expected_table1();

struct AssertionResult {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct RunReport {
  int schema_version = kReportSchemaVersion;
  std::string config_hash;
  std::uint64_t seed = 0;
  ExperimentConfig config;
  std::vector<RunRecord> records;
  std::vector<EocRow> eoc;
  std::vector<EquivalenceRecord> equivalence;
  std::optional<SweepReport> sweep;
  std::optional<Table1Report> table1;
  std::vector<AssertionResult> assertions;

  bool all_passed() const;
};

RunReport run(const ExperimentConfig& config, const RunOptions& options = {});

/// report.json text; wall times are the only non-deterministic fields.
std::string report_json(const RunReport& report);
/// Writes report.json, errors.csv, energy.csv, eoc.csv, sweep.csv, table1.csv and plots.
void write_outputs(const RunReport& report, const std::string& dir);

struct RandomProblemLimits {
  int max_nt = 8;
  int max_nx = 12;
  int max_pt = 3;
  int max_px = 3;
  bool source = true;
  /// When positive, N_t is raised until cfl_number(problem) <= max_cfl.
  double max_cfl = 0.0;
};

/// max h_t * max c * p_x^2 / min h_x, the mesh ratio that governs the conditionally
/// stable schemes.
double cfl_number(const WaveProblem& problem);

/// Gauss-Lobatto comparisons are skipped above this ratio: outside the stability range
/// round-off grows exponentially and the two realizations drift apart.
inline constexpr double kLobattoComparisonCfl = 0.25;

/// Smooth random data: variable c, source, initial data vanishing at the boundary.
WaveProblem random_problem(std::mt19937_64& rng, const RandomProblemLimits& limits = {});

/// Runs tasks 0..n-1 on up to `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task, int threads = 0);

}  // namespace wavest
