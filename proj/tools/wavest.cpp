#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "wavest/errors.hpp"
#include "wavest/harness.hpp"

using namespace wavest;

namespace {

std::vector<double> parse_ratios(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item.empty()) throw ConfigError("bad ratio '" + item + "'");
    out.push_back(v);
  }
  return out;
}

void print_assertions(const RunReport& rep) {
  for (const auto& a : rep.assertions)
    std::printf("%s  %s: %s\n", a.passed ? "PASS" : "FAIL", a.name.c_str(), a.detail.c_str());
}

void print_table1(const Table1Report& t) {
  std::printf("%-16s %-12s %-12s %-12s %-12s %-12s\n", "method", "stability", "energy", "symplectic", "drift",
              "sympl-resid");
  for (const auto& r : t.rows)
    std::printf("%-16s %-12s %-12s %-12s %-12.3e %-12.3e\n", to_string(r.method).c_str(), to_string(r.stability).c_str(),
                to_string(r.energy).c_str(), to_string(r.symplecticity).c_str(), r.energy_drift, r.symplectic_residual);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"space-time finite element experiments for the 1D wave equation"};
  app.require_subcommand(1);

  std::string config_path, out_dir, preset_name = "fig1", ratios_text = "0.1,0.5,1,2,4";
  bool quick = false;
  std::uint64_t seed = 0;
  int threads = 0, degree = 1, nx = 384;

  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("--config", config_path, "config file (JSON)")->required();
  run_cmd->add_flag("--quick", quick, "use the quick ladder");
  run_cmd->add_option("--out", out_dir, "output directory");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "random seed");
  run_cmd->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* validate_cmd = app.add_subcommand("validate", "check a config without running it");
  validate_cmd->add_option("--config,config", config_path, "config file (JSON)")->required();

  app.add_subcommand("list-presets", "list the built-in problems");

  auto* table_cmd = app.add_subcommand("table1", "compute the four-method property matrix");
  table_cmd->add_option("--out", out_dir, "output directory");
  table_cmd->add_option("--degree", degree, "temporal and spatial degree")->check(CLI::Range(1, 4));
  table_cmd->add_option("--threads", threads, "worker threads (0: all cores)");

  auto* sweep_cmd = app.add_subcommand("sweep", "instability sweep over h_t / h_x");
  sweep_cmd->add_option("--preset", preset_name, "preset name");
  sweep_cmd->add_option("--ratios", ratios_text, "comma-separated ratios");
  sweep_cmd->add_option("--nx", nx, "spatial elements")->check(CLI::Range(2, 100000));
  sweep_cmd->add_option("--degree", degree, "temporal and spatial degree")->check(CLI::Range(1, 4));
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--threads", threads, "worker threads (0: all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      RunOptions opt;
      opt.quick = quick;
      if (!out_dir.empty()) opt.output_dir = out_dir;
      if (seed_opt->count()) opt.seed = seed;
      opt.threads = threads;
      const RunReport rep = run(cfg, opt);
      std::printf("config %s, %zu runs, output in %s\n", rep.config_hash.c_str(), rep.records.size(),
                  rep.config.output_dir.c_str());
      for (const auto& r : rep.records) {
        std::printf("  %-16s %4dx%-5d", to_string(r.method).c_str(), r.N_t, r.N_x);
        if (!r.error.empty()) std::printf(" error: %s", r.error.c_str());
        if (r.energy_drift) std::printf(" drift %.3e", *r.energy_drift);
        if (r.norms) std::printf(" C0L2(U) %.3e", r.norms->c0_l2_u);
        std::printf(" [%.2fs]\n", r.wall_seconds);
      }
      for (const auto& e : rep.eoc) {
        std::printf("  eoc %-16s %-12s", to_string(e.method).c_str(), e.norm.c_str());
        for (double x : e.rates) std::printf(" %.3f", x);
        std::printf("\n");
      }
      if (rep.table1) print_table1(*rep.table1);
      print_assertions(rep);
      return rep.all_passed() ? 0 : 1;
    }
    if (validate_cmd->parsed()) {
      const ExperimentConfig cfg = load_config(config_path);
      std::printf("ok %s\n", cfg.hash().c_str());
      return 0;
    }
    if (app.got_subcommand("list-presets")) {
      for (PresetId id : builtin_presets()) {
        const auto [nt, nx_default] = preset_default_mesh(id);
        const WaveProblem p = make_preset(id, nt, nx_default, 1, 1);
        std::printf("%-14s domain (%g, %g), T = %g, default mesh %dx%d, g = %s\n", to_string(id).c_str(), p.space.a(),
                    p.space.b(), p.time.final_time(), nt, nx_default, p.g.label.c_str());
      }
      return 0;
    }
    if (table_cmd->parsed()) {
      const Table1Report t = table1_matrix(degree, threads);
      print_table1(t);
      if (!out_dir.empty()) {
        RunReport rep;
        rep.config.preset = PresetId::Fig1LinearPulse;
        rep.config.ladder = {{128, 384}};
        rep.config.outputs = {OutputKind::Table1Matrix};
        rep.config_hash = rep.config.hash();
        rep.table1 = t;
        rep.assertions.push_back({"property matrix", t.matches_expected(), "four methods x three properties"});
        write_outputs(rep, out_dir);
      }
      std::printf("%s  matches the expected matrix\n", t.matches_expected() ? "PASS" : "FAIL");
      return t.matches_expected() ? 0 : 1;
    }
    if (sweep_cmd->parsed()) {
      const PresetId preset = parse_preset(preset_name);
      const std::vector<MethodId> methods{MethodId::Unstabilized, MethodId::GaussLobatto2nd, MethodId::Stabilized2nd,
                                          MethodId::GaussLegendre2nd};
      const SweepReport s = instability_sweep(preset, methods, parse_ratios(ratios_text), nx, degree, {}, threads);
      std::printf("%-16s %8s %6s %8s %12s\n", "method", "ratio", "N_t", "status", "growth");
      for (const auto& e : s.entries)
        std::printf("%-16s %8.3g %6d %8s %12.3e\n", to_string(e.method).c_str(), e.ratio, e.N_t,
                    e.blew_up ? "blow-up" : "bounded", e.growth);
      const bool ok = s.bounded_everywhere(MethodId::Stabilized2nd) && s.bounded_everywhere(MethodId::GaussLegendre2nd);
      if (!out_dir.empty()) {
        RunReport rep;
        rep.config.preset = preset;
        rep.config.ladder = {{1, nx}};
        rep.config.outputs = {OutputKind::InstabilitySweep};
        rep.config.ratios = parse_ratios(ratios_text);
        rep.config_hash = rep.config.hash();
        rep.sweep = s;
        rep.assertions.push_back({"unconditionally stable methods bounded", ok, ""});
        write_outputs(rep, out_dir);
      }
      std::printf("%s  stabilized and gauss-legendre bounded at every ratio\n", ok ? "PASS" : "FAIL");
      return ok ? 0 : 1;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
