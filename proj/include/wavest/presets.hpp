#pragma once

// Benchmark problems: the travelling pulse, the sine-Gordon breather and a
// manufactured linear solution with a time-dependent source.

#include <string>
#include <vector>

#include "wavest/semidiscrete.hpp"

namespace wavest {

enum class PresetId { Fig1LinearPulse, Fig2SineGordon, ManufacturedLinear, Custom };

std::string to_string(PresetId p);
/// Accepts "fig1", "fig2", "manufactured", "custom" and the enum spellings.
PresetId parse_preset(const std::string& name);
const std::vector<PresetId>& builtin_presets();

namespace pulse {
double omega(double s);
double omega_prime(double s);
double sigmoid(double s);
double sigmoid_prime(double s);
/// omega(x - t + 1) S(x - t + 1) and its derivatives.
double U(double x, double t);
double dtU(double x, double t);
double dxU(double x, double t);
}  // namespace pulse

namespace breather {
inline constexpr double kGamma = 1.1;
double phi(double t);
double phi_prime(double t);
double U(double x, double t);
double dtU(double x, double t);
double dxU(double x, double t);
}  // namespace breather

/// Omega = (-30, 30), T = 10, c = 1, F = 0, g = 0.
WaveProblem preset_fig1(int Nt = 128, int Nx = 384, int pt = 1, int px = 1);
/// Omega = (-20, 20), T = 1, c = 1, F = 0, g = sin, U0 = 0, V0 = (4/gamma) sech(x/gamma).
WaveProblem preset_fig2(int Nt = 20, int Nx = 40, int pt = 1, int px = 1);
/// Omega = (0, 1), T = 1, U = sin(pi x)(cos(pi t) + t^3/3) with the matching source.
WaveProblem preset_manufactured(int Nt = 8, int Nx = 8, int pt = 1, int px = 1);

WaveProblem make_preset(PresetId id, int Nt, int Nx, int pt, int px);
/// Default temporal and spatial element counts of a preset.
std::pair<int, int> preset_default_mesh(PresetId id);

}  // namespace wavest
