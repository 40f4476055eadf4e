#include "wavest/presets.hpp"

#include <cmath>
#include <numbers>

#include "wavest/errors.hpp"

namespace wavest {

std::string to_string(PresetId p) {
  switch (p) {
    case PresetId::Fig1LinearPulse: return "fig1";
    case PresetId::Fig2SineGordon: return "fig2";
    case PresetId::ManufacturedLinear: return "manufactured";
    case PresetId::Custom: return "custom";
  }
  return "?";
}

PresetId parse_preset(const std::string& name) {
  if (name == "fig1" || name == "Fig1LinearPulse") return PresetId::Fig1LinearPulse;
  if (name == "fig2" || name == "Fig2SineGordon") return PresetId::Fig2SineGordon;
  if (name == "manufactured" || name == "ManufacturedLinear") return PresetId::ManufacturedLinear;
  if (name == "custom" || name == "Custom") return PresetId::Custom;
  throw ConfigError("unknown preset '" + name + "'");
}

const std::vector<PresetId>& builtin_presets() {
  static const std::vector<PresetId> ids{PresetId::Fig1LinearPulse, PresetId::Fig2SineGordon,
                                         PresetId::ManufacturedLinear};
  return ids;
}

namespace pulse {

double omega(double s) { return std::exp(-20.0 * (s - 0.1) * (s - 0.1)) - std::exp(-20.0 * (s + 0.1) * (s + 0.1)); }

double omega_prime(double s) {
  return -40.0 * (s - 0.1) * std::exp(-20.0 * (s - 0.1) * (s - 0.1)) +
         40.0 * (s + 0.1) * std::exp(-20.0 * (s + 0.1) * (s + 0.1));
}

double sigmoid(double s) { return 1.0 / (1.0 + std::exp(-30.0 * s)); }

double sigmoid_prime(double s) {
  const double e = std::exp(-30.0 * std::abs(s));
  return 30.0 * e / ((1.0 + e) * (1.0 + e));
}

double U(double x, double t) { return omega(x - t + 1.0) * sigmoid(x - t + 1.0); }

double dxU(double x, double t) {
  const double s = x - t + 1.0;
  return omega_prime(s) * sigmoid(s) + omega(s) * sigmoid_prime(s);
}

double dtU(double x, double t) { return -dxU(x, t); }

}  // namespace pulse

namespace breather {

namespace {
const double kRoot = std::sqrt(kGamma * kGamma - 1.0);
double sech(double z) { return 1.0 / std::cosh(z); }
}  // namespace

double phi(double t) { return std::sin(t / kGamma * kRoot) / kRoot; }
double phi_prime(double t) { return std::cos(t / kGamma * kRoot) / kGamma; }

double U(double x, double t) { return 4.0 * std::atan(phi(t) * sech(x / kGamma)); }

double dtU(double x, double t) {
  const double s = sech(x / kGamma);
  const double a = phi(t) * s;
  return 4.0 * phi_prime(t) * s / (1.0 + a * a);
}

double dxU(double x, double t) {
  const double s = sech(x / kGamma);
  const double a = phi(t) * s;
  return -4.0 * phi(t) * s * std::tanh(x / kGamma) / kGamma / (1.0 + a * a);
}

}  // namespace breather

WaveProblem preset_fig1(int Nt, int Nx, int pt, int px) {
  WaveProblem p;
  p.name = "fig1";
  p.space = SpatialMesh1D::uniform(-30.0, 30.0, Nx, px);
  p.time = TemporalMesh::uniform(10.0, Nt, pt);
  p.U0 = [](double x) { return pulse::U(x, 0.0); };
  p.dU0 = [](double x) { return pulse::dxU(x, 0.0); };
  p.V0 = [](double x) { return pulse::dtU(x, 0.0); };
  p.exact = ExactSolution{pulse::U, pulse::dtU, pulse::dxU};
  return p;
}

WaveProblem preset_fig2(int Nt, int Nx, int pt, int px) {
  WaveProblem p;
  p.name = "fig2";
  p.space = SpatialMesh1D::uniform(-20.0, 20.0, Nx, px);
  p.time = TemporalMesh::uniform(1.0, Nt, pt);
  p.U0 = [](double) { return 0.0; };
  p.dU0 = [](double) { return 0.0; };
  p.V0 = [](double x) { return 4.0 / breather::kGamma / std::cosh(x / breather::kGamma); };
  p.g = Nonlinearity::sine_gordon();
  p.exact = ExactSolution{breather::U, breather::dtU, breather::dxU};
  for (double x : {-20.0, -7.3, 0.0, 2.2, 20.0})
    if (breather::U(x, 0.0) != 0.0) throw DataError("breather initial displacement is not zero");
  return p;
}

WaveProblem preset_manufactured(int Nt, int Nx, int pt, int px) {
  using std::numbers::pi;
  WaveProblem p;
  p.name = "manufactured";
  p.space = SpatialMesh1D::uniform(0.0, 1.0, Nx, px);
  p.time = TemporalMesh::uniform(1.0, Nt, pt);
  p.U0 = [](double x) { return std::sin(pi * x); };
  p.dU0 = [](double x) { return pi * std::cos(pi * x); };
  p.V0 = [](double) { return 0.0; };
  p.F = [](double x, double t) { return std::sin(pi * x) * (2.0 * t + pi * pi * t * t * t / 3.0); };
  p.exact = ExactSolution{
      [](double x, double t) { return std::sin(pi * x) * (std::cos(pi * t) + t * t * t / 3.0); },
      [](double x, double t) { return std::sin(pi * x) * (-pi * std::sin(pi * t) + t * t); },
      [](double x, double t) { return pi * std::cos(pi * x) * (std::cos(pi * t) + t * t * t / 3.0); }};
  return p;
}

WaveProblem make_preset(PresetId id, int Nt, int Nx, int pt, int px) {
  switch (id) {
    case PresetId::Fig1LinearPulse: return preset_fig1(Nt, Nx, pt, px);
    case PresetId::Fig2SineGordon: return preset_fig2(Nt, Nx, pt, px);
    case PresetId::ManufacturedLinear: return preset_manufactured(Nt, Nx, pt, px);
    case PresetId::Custom: break;
  }
  throw ConfigError("the custom preset has no built-in data");
}

std::pair<int, int> preset_default_mesh(PresetId id) {
  switch (id) {
    case PresetId::Fig1LinearPulse: return {128, 384};
    case PresetId::Fig2SineGordon: return {20, 40};
    case PresetId::ManufacturedLinear: return {8, 8};
    case PresetId::Custom: break;
  }
  return {8, 8};
}

}  // namespace wavest
