#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "narz/grid.hpp"
#include "narz/phase_plane.hpp"
#include "narz/solver.hpp"
#include "narz/thresholds.hpp"

namespace narz::io {

/// Initial data file: header `x,rho0,u0`, one row per cell (uniform spacing).
struct InitialCsv {
  Grid grid;
  std::vector<double> x, rho0, u0;
};

InitialCsv load_initial_csv(const std::filesystem::path& path);
void write_initial_csv(const std::filesystem::path& path, const Grid& grid,
                       const std::vector<double>& rho0, const std::vector<double>& u0);

/// Long-format snapshot table: t,x,rho,u,psi,rho_tilde,d_rho_dx.
void write_snapshot_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps,
                        const Grid& grid);

/// Threshold curve: rho,value,active_branch with `# key=value` metadata lines.
void write_curve_csv(const std::filesystem::path& path, const ThresholdCurve& curve, double J);
ThresholdCurve load_curve_csv(const std::filesystem::path& path);

/// Characteristic trace: t,X,rho,d,F,G,slowdown,eta_at_rho.
void write_trace_csv(const std::filesystem::path& path, const CharacteristicTrace& trace,
                     const ThresholdCurve* curve);

nlohmann::json run_report_to_json(const RunReport& report);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace narz::io
