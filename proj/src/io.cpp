#include "narz/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "narz/errors.hpp"

namespace narz::io {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for writing: " + path.string());
  return f;
}

}  // namespace

InitialCsv load_initial_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open initial-data file: " + path.string());
  InitialCsv d;
  std::string line;
  bool header = true;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    auto cells = split_csv(line);
    if (cells.size() < 3) throw ConfigError("initial CSV: need columns x,rho0,u0");
    d.x.push_back(std::stod(cells[0]));
    d.rho0.push_back(std::stod(cells[1]));
    d.u0.push_back(std::stod(cells[2]));
  }
  if (d.x.size() < 16) throw ConfigError("initial CSV: need at least 16 rows");
  const double dx = d.x[1] - d.x[0];
  for (std::size_t i = 1; i < d.x.size(); ++i)
    if (std::fabs(d.x[i] - d.x[i - 1] - dx) > 1e-9 * std::max(1.0, std::fabs(dx)))
      throw ConfigError("initial CSV: grid spacing is not uniform");
  d.grid = Grid(d.x.front() - 0.5 * dx, d.x.back() + 0.5 * dx, static_cast<int>(d.x.size()));
  return d;
}

void write_initial_csv(const std::filesystem::path& path, const Grid& grid,
                       const std::vector<double>& rho0, const std::vector<double>& u0) {
  auto f = open_out(path);
  f << "x,rho0,u0\n";
  for (int i = 0; i < grid.n; ++i)
    f << fmt(grid.x(i)) << ',' << fmt(rho0[i]) << ',' << fmt(u0[i]) << '\n';
}

void write_snapshot_csv(const std::filesystem::path& path, const std::vector<Snapshot>& snaps,
                        const Grid& grid) {
  auto f = open_out(path);
  f << "# columns: t,x,rho,u,psi,rho_tilde,d_rho_dx\n";
  f << "t,x,rho,u,psi,rho_tilde,d_rho_dx\n";
  for (const auto& s : snaps)
    for (int i = 0; i < grid.n; ++i)
      f << fmt(s.t) << ',' << fmt(grid.x(i)) << ',' << fmt(s.rho[i]) << ',' << fmt(s.u[i]) << ','
        << fmt(s.psi[i]) << ',' << fmt(s.rho_tilde[i]) << ',' << fmt(s.d_rho_dx[i]) << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const ThresholdCurve& curve, double J) {
  auto f = open_out(path);
  f << "# kind=" << (curve.kind == ThresholdCurve::Kind::Sigma ? "sigma" : "eta") << '\n';
  f << "# J=" << fmt(J) << '\n';
  f << "# C_eta=" << fmt(curve.C_eta) << '\n';
  f << "# rho_c=" << fmt(curve.rho_c) << '\n';
  f << "# slope_at_zero=" << fmt(curve.slope_at_zero) << '\n';
  if (curve.rho_star) f << "# rho_star=" << fmt(*curve.rho_star) << '\n';
  f << "# columns: rho,value,active_branch\n";
  f << "rho,value,active_branch\n";
  for (std::size_t i = 0; i < curve.rho.size(); ++i)
    f << fmt(curve.rho[i]) << ',' << fmt(curve.value[i]) << ','
      << (curve.branch[i] ? "3y-over-rho" : "F") << '\n';
}

ThresholdCurve load_curve_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open curve file: " + path.string());
  ThresholdCurve c;
  std::string line;
  bool header_seen = false;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(2, eq - 2);
      std::string val = line.substr(eq + 1);
      if (key == "kind")
        c.kind = (val == "sigma") ? ThresholdCurve::Kind::Sigma : ThresholdCurve::Kind::Eta;
      else if (key == "C_eta")
        c.C_eta = std::stod(val);
      else if (key == "rho_c")
        c.rho_c = std::stod(val);
      else if (key == "slope_at_zero")
        c.slope_at_zero = std::stod(val);
      else if (key == "rho_star")
        c.rho_star = std::stod(val);
      continue;
    }
    if (!header_seen) {
      header_seen = true;  // column header row
      continue;
    }
    auto cells = split_csv(line);
    if (cells.size() < 3) throw ConfigError("curve CSV: need columns rho,value,active_branch");
    c.rho.push_back(std::stod(cells[0]));
    c.value.push_back(std::stod(cells[1]));
    c.branch.push_back(cells[2] == "3y-over-rho" ? 1 : 0);
  }
  if (c.rho.size() < 2) throw ConfigError("curve CSV: too few samples");
  c.finalize();
  return c;
}

void write_trace_csv(const std::filesystem::path& path, const CharacteristicTrace& trace,
                     const ThresholdCurve* curve) {
  auto f = open_out(path);
  f << "# seed=" << fmt(trace.seed) << '\n';
  f << "# termination=" << trace.termination << '\n';
  f << "# columns: t,X,rho,d,F,G,slowdown,eta_at_rho\n";
  f << "t,X,rho,d,F,G,slowdown,eta_at_rho\n";
  for (const auto& s : trace.samples) {
    double eta = curve ? curve->eval(s.rho) : std::nan("");
    f << fmt(s.t) << ',' << fmt(s.X) << ',' << fmt(s.rho) << ',' << fmt(s.d) << ',' << fmt(s.F)
      << ',' << fmt(s.G) << ',' << fmt(s.slowdown) << ',' << fmt(eta) << '\n';
  }
}

nlohmann::json run_report_to_json(const RunReport& report) {
  nlohmann::json j;
  j["outcome"] = outcome_name(report.outcome);
  j["t_final"] = report.t_final;
  if (report.outcome == RunOutcome::GradientBlowup) j["t_detect"] = report.t_detect;
  j["max_drho_dx_over_time"] = report.max_drho_dx_over_time;
  j["criterion_integral"] = report.criterion_integral;
  j["mass_drift_rel"] = report.mass_drift_rel;
  j["min_dpsi_dx_over_time"] = report.min_dpsi_dx_over_time;
  j["max_sup_F_over_time"] = report.max_sup_F_over_time;
  j["invariant_breaches"] = report.invariant_breaches;
  if (!report.note.empty()) j["note"] = report.note;

  nlohmann::json m;
  auto series = [&](const char* name, auto getter) {
    std::vector<double> v;
    v.reserve(report.monitors.size());
    for (const auto& s : report.monitors) v.push_back(getter(s));
    m[name] = v;
  };
  series("t", [](const StepMonitors& s) { return s.t; });
  series("mass", [](const StepMonitors& s) { return s.mass; });
  series("rho_min", [](const StepMonitors& s) { return s.rho_min; });
  series("rho_max", [](const StepMonitors& s) { return s.rho_max; });
  series("u_min", [](const StepMonitors& s) { return s.u_min; });
  series("u_max", [](const StepMonitors& s) { return s.u_max; });
  series("min_dpsi_dx", [](const StepMonitors& s) { return s.min_dpsi_dx; });
  series("max_abs_drho_dx", [](const StepMonitors& s) { return s.max_abs_drho_dx; });
  series("sup_F", [](const StepMonitors& s) { return s.sup_F; });
  series("ux_lower_margin", [](const StepMonitors& s) { return s.ux_lower_margin; });
  j["monitors"] = std::move(m);
  return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open JSON file: " + path.string());
  return nlohmann::json::parse(f);
}

}  // namespace narz::io
