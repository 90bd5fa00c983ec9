#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "narz/flux.hpp"
#include "narz/grid.hpp"
#include "narz/kernel.hpp"
#include "narz/solver.hpp"

namespace narz {

/// Analytic initial-data families. Every preset produces a compactly
/// supported density (values below 1e-12 are cut to exact vacuum) and a
/// velocity assembled as u0 = psi0 + U(rho0) * slowdown0, where the offset
///
///   psi0 = c0*M + (c1/2)*M^2 - (c0*m + (c1/2)*m^2),   M = upstream mass
///
/// is non-decreasing and vanishes downstream; c0 and c1 (params psi_c0,
/// psi_c1) set the size of the first and second offset diagnostics F0, G0.
///
/// Shapes (all parameters have defaults; see presets.cpp):
///   gaussian-bump     amplitude, center, width
///   smoothed-plateau  height, left, right, edge
///   riemann-smoothed  rho_left, rho_right, step_pos, step_width, left/right envelope
///   exp-rise-bump     amplitude, rise_rate, fall_rate, rise_pos, fall_pos
///   double-bump       two gaussians
///   blowup-bump       gaussian whose amplitude is solved so that
///                     min u0' equals target_u0_prime (shock-formation data)
std::pair<std::vector<double>, std::vector<double>> build_preset(
    const std::string& name, const nlohmann::json& params, const FluxModel& model,
    const Kernel& kernel, ModelVariant variant, const Grid& grid);

std::vector<std::string> preset_names();

}  // namespace narz
