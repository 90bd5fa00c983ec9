#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "narz/errors.hpp"
#include "narz/experiment.hpp"
#include "narz/io.hpp"
#include "narz/simd.hpp"
#include "narz/thresholds.hpp"

namespace {

using narz::ExperimentConfig;

int cmd_run(const std::vector<std::string>& paths, const std::vector<std::string>& presets,
            const std::string& out, double resolution_scale, long long seed) {
  std::vector<ExperimentConfig> cfgs;
  for (const auto& p : paths) cfgs.push_back(narz::load_config(p));
  for (const auto& p : presets) cfgs.push_back(narz::builtin_config(p));
  if (cfgs.empty()) {
    std::cerr << "run: no config files or presets given\n";
    return 2;
  }
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    if (!out.empty()) cfgs[i].out_dir = cfgs.size() == 1 ? out : out + "/" + cfgs[i].name;
    if (resolution_scale > 0.0) cfgs[i].resolution_scale = resolution_scale;
    if (seed != 0) cfgs[i].seed = seed;
  }

  auto results = narz::run_experiments(cfgs);
  bool all_ok = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    std::printf("[%s] %s (%s)\n", r.ok ? "ok" : "FAIL", cfgs[i].name.c_str(),
                r.out_dir.string().c_str());
    for (const auto& c : r.checks)
      std::printf("  [%s] %s: %s\n", c.pass ? "pass" : "fail", c.name.c_str(),
                  c.details.c_str());
    all_ok = all_ok && r.ok;
  }
  return all_ok ? 0 : 1;
}

int cmd_thresholds(double J, double c_eta, const std::string& out, double delta0, double cap) {
  narz::FluxModel flux = narz::FluxModel::pipes(J);
  narz::ThresholdOpts opts;
  opts.delta0 = delta0;
  opts.cap = cap;
  auto kind = c_eta == 0.0 ? narz::ThresholdCurve::Kind::Sigma : narz::ThresholdCurve::Kind::Eta;
  narz::ThresholdCurve curve = narz::solve_threshold_ode(kind, flux, c_eta, opts);
  narz::io::write_curve_csv(out, curve, J);
  std::printf("wrote %s (%zu samples", out.c_str(), curve.rho.size());
  if (curve.rho_star) std::printf(", dives at rho = %.6f", *curve.rho_star);
  std::printf(")\n");
  return 0;
}

int cmd_classify(const std::string& initial, const std::string& curve_path,
                 const std::string& out) {
  narz::io::InitialCsv data = narz::io::load_initial_csv(initial);
  narz::ThresholdCurve curve = narz::io::load_curve_csv(curve_path);

  // Classification needs only rho0 and the grid; assemble a bare state.
  narz::TrafficState st;
  st.grid = data.grid;
  st.rho = data.rho0;
  st.u = data.u0;
  st.psi.assign(data.rho0.size(), 0.0);
  narz::Classification cls = narz::classify_initial_data(st, curve);

  nlohmann::json j;
  j["all_subcritical"] = cls.all_subcritical;
  j["first_supercritical"] = cls.first_supercritical;
  int count = 0;
  for (auto v : cls.supercritical) count += v;
  j["supercritical_cells"] = count;
  if (out.empty())
    std::cout << j.dump(2) << '\n';
  else
    narz::io::write_json(out, j);
  return cls.all_subcritical ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal second-order traffic-flow laboratory"};
  app.require_subcommand(1);

  // run
  std::vector<std::string> run_paths, run_presets;
  std::string run_out;
  double run_scale = 0.0;
  long long run_seed = 0;
  auto* run_cmd = app.add_subcommand("run", "execute experiment configs");
  run_cmd->add_option("configs", run_paths, "config files (.toml or .json)");
  run_cmd->add_option("--preset", run_presets, "builtin experiment names");
  run_cmd->add_option("--out", run_out, "output directory override");
  run_cmd->add_option("--resolution-scale", run_scale, "multiply grid resolution");
  run_cmd->add_option("--seed", run_seed, "seed recorded in the summary");

  // thresholds
  double th_J = 1.0, th_ceta = 0.0, th_delta0 = 1e-6, th_cap = 1e6;
  std::string th_out = "curve.csv";
  auto* th_cmd = app.add_subcommand("thresholds", "tabulate a threshold curve");
  th_cmd->add_option("--J", th_J, "flux exponent (>= 1)")->required();
  th_cmd->add_option("--C-eta", th_ceta, "second-order constant (0: first-order curve)");
  th_cmd->add_option("--out", th_out, "output CSV path");
  th_cmd->add_option("--delta0", th_delta0, "start abscissa");
  th_cmd->add_option("--cap", th_cap, "dive detection cap");

  // classify
  std::string cl_initial, cl_curve, cl_out;
  auto* cl_cmd = app.add_subcommand("classify", "classify initial data against a curve");
  cl_cmd->add_option("--initial", cl_initial, "initial-data CSV (x,rho0,u0)")->required();
  cl_cmd->add_option("--curve", cl_curve, "threshold curve CSV")->required();
  cl_cmd->add_option("--out", cl_out, "write verdict JSON here (default: stdout)");

  // presets
  std::string pr_emit, pr_out;
  auto* pr_cmd = app.add_subcommand("presets", "list builtin experiments or emit one as JSON");
  pr_cmd->add_option("--emit", pr_emit, "builtin name to emit");
  pr_cmd->add_option("--out", pr_out, "file to write the emitted config to");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) return cmd_run(run_paths, run_presets, run_out, run_scale, run_seed);
    if (th_cmd->parsed()) return cmd_thresholds(th_J, th_ceta, th_out, th_delta0, th_cap);
    if (cl_cmd->parsed()) return cmd_classify(cl_initial, cl_curve, cl_out);
    if (pr_cmd->parsed()) {
      if (pr_emit.empty()) {
        for (const auto& n : narz::builtin_config_names()) std::printf("%s\n", n.c_str());
        return 0;
      }
      nlohmann::json j = narz::builtin_config(pr_emit).to_json();
      if (pr_out.empty())
        std::cout << j.dump(2) << '\n';
      else
        narz::io::write_json(pr_out, j);
      return 0;
    }
  } catch (const std::exception& e) {
    nlohmann::json diag;
    diag["error"] = e.what();
    std::cerr << diag.dump() << '\n';
    return 3;
  }
  return 2;
}
