// Command-line front end: simulate, fit, reconstruct, run, check.
//
// Exit codes: 0 success, 1 a method failed, 2 configuration or usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "mzdmd/checks.hpp"
#include "mzdmd/config.hpp"
#include "mzdmd/csv.hpp"
#include "mzdmd/experiment.hpp"

namespace {

constexpr int kExitMethodFailure = 1;
constexpr int kExitConfigFailure = 2;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "key = value configuration file");
  cmd->add_option("--seed", opts.seed, "master random seed");
  cmd->add_option("--method", opts.method, "dmd | mz-dmd | t-model | projection | all");
  cmd->add_option("--out", opts.out, "output directory");
}

mzdmd::ExperimentConfig load(const CommonOptions& opts) {
  mzdmd::ExperimentConfig cfg = opts.config_path.empty() ? mzdmd::ExperimentConfig{} : mzdmd::parse_config(opts.config_path);
  mzdmd::apply_environment(cfg);
  if (opts.seed) cfg.sim.seed = *opts.seed;
  if (!opts.method.empty()) cfg.method = mzdmd::parse_method(opts.method);
  if (!opts.out.empty()) cfg.output_dir = opts.out;
  cfg.validate();
  return cfg;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
  std::ofstream out(path);
  out << j.dump(2) << '\n';
  if (!out) throw mzdmd::Error("cannot write '" + path.string() + "'");
  std::cout << "wrote " << path.string() << '\n';
}

int cmd_simulate(const mzdmd::ExperimentConfig& cfg) {
  const auto& out = cfg.output_dir;
  std::filesystem::create_directories(out);
  const mzdmd::Trajectory full = mzdmd::simulate_measurement(cfg.sim, cfg.resolved_init);
  mzdmd::write_csv(out / "measurement.csv", mzdmd::resolved_part(full));
  std::cout << "wrote " << (out / "measurement.csv").string() << '\n';
  if (cfg.method == mzdmd::Method::projection || cfg.method == mzdmd::Method::all) {
    const mzdmd::MethodResult r = mzdmd::run_projection(cfg);
    mzdmd::write_csv(out / "projection.csv", r.mean, *r.variance);
    std::cout << "wrote " << (out / "projection.csv").string() << " (" << r.wall_seconds << " s)\n";
  }
  return 0;
}

int cmd_fit(const mzdmd::ExperimentConfig& cfg, const std::string& data_path) {
  const mzdmd::Trajectory measurement = data_path.empty()
                                            ? mzdmd::resolved_part(mzdmd::simulate_measurement(cfg.sim, cfg.resolved_init))
                                            : mzdmd::read_trajectory(data_path);
  for (mzdmd::Method m : mzdmd::expand(cfg.method)) {
    if (m == mzdmd::Method::projection) continue;
    mzdmd::MethodResult r;
    if (m == mzdmd::Method::dmd) {
      r = mzdmd::run_dmd(measurement);
    } else {
      r = mzdmd::run_ensemble(m == mzdmd::Method::mz_dmd ? mzdmd::ObjectiveKind::mz_dmd : mzdmd::ObjectiveKind::t_model,
                              cfg, measurement);
    }
    nlohmann::json j = mzdmd::model_to_json(*r.model);
    j["method"] = std::string(mzdmd::to_string(m));
    j["fit_seconds"] = r.fit_seconds;
    j["degenerate_matchings"] = r.degenerate_matchings;
    if (!r.loss_traces.empty()) j["loss_traces"] = r.loss_traces;
    nlohmann::json samples = nlohmann::json::array();
    for (const auto& s : r.samples) samples.push_back(mzdmd::model_to_json(s));
    if (!samples.empty()) j["samples"] = std::move(samples);
    write_json(cfg.output_dir / (mzdmd::file_stem(m) + "_model.json"), j);
  }
  return 0;
}

int cmd_reconstruct(const mzdmd::ExperimentConfig& cfg, const std::string& model_path, std::string name) {
  std::ifstream in(model_path);
  if (!in) throw mzdmd::ConfigError("cannot open model file '" + model_path + "'", "model");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw mzdmd::ConfigError(std::string("model file is not valid JSON: ") + e.what(), "model");
  }
  const mzdmd::SpectralModel model = mzdmd::model_from_json(j);
  if (model.dim() != 2) throw mzdmd::ConfigError("model must be two-dimensional", "model");
  const mzdmd::Reconstruction rec = mzdmd::reconstruct(model, cfg.resolved_init, cfg.sim.time_grid());
  if (name.empty()) name = std::filesystem::path(model_path).stem().string() + "_reconstruction";
  const auto path = cfg.output_dir / (name + ".csv");
  mzdmd::write_csv(path, rec.traj);
  std::cout << "wrote " << path.string() << " (max imaginary residue " << rec.max_imag << ")\n";
  if (rec.imag_warning) std::cerr << "warning: imaginary residue above 1e-6 of the trajectory norm\n";
  return 0;
}

int cmd_run(const mzdmd::ExperimentConfig& cfg) {
  const mzdmd::RunReport report = mzdmd::run_experiment(cfg);
  for (const auto& [method, secs] : report.wall_seconds) {
    std::cout << method << ": " << secs << " s (fit " << report.fit_seconds.at(method) << " s)\n";
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "outputs in " << cfg.output_dir.string() << '\n';
  return 0;
}

int cmd_check(std::uint64_t seed) {
  bool ok = true;
  for (const auto& r : mzdmd::run_invariant_checks(seed)) {
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : kExitMethodFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-aware dynamic mode decomposition"};
  app.require_subcommand(1);

  CommonOptions sim_opts, fit_opts, rec_opts, run_opts;
  auto* simulate = app.add_subcommand("simulate", "integrate the oscillator measurement (and projection)");
  add_common(simulate, sim_opts);

  std::string data_path;
  auto* fit = app.add_subcommand("fit", "fit DMD / MZ-DMD / t-model spectra");
  add_common(fit, fit_opts);
  fit->add_option("--data", data_path, "measurement CSV (t,y1,y2); simulated when omitted");

  std::string model_path, rec_name;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct a trajectory from a model JSON");
  add_common(rec, rec_opts);
  rec->add_option("--model", model_path, "model JSON written by fit or run")->required();
  rec->add_option("--name", rec_name, "output file stem");

  auto* run = app.add_subcommand("run", "full pipeline: simulate, fit, reconstruct, compare");
  add_common(run, run_opts);

  std::uint64_t check_seed = 1234;
  auto* check = app.add_subcommand("check", "run the numerical invariant suite");
  check->add_option("--seed", check_seed, "seed for the random instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigFailure;
  }

  try {
    if (*simulate) return cmd_simulate(load(sim_opts));
    if (*fit) return cmd_fit(load(fit_opts), data_path);
    if (*rec) return cmd_reconstruct(load(rec_opts), model_path, rec_name);
    if (*run) return cmd_run(load(run_opts));
    if (*check) return cmd_check(check_seed);
  } catch (const mzdmd::ConfigError& e) {
    std::cerr << "config error";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kExitConfigFailure;
  } catch (const mzdmd::MethodFailure& e) {
    std::cerr << "error [" << e.method() << " / " << e.stage() << "]: " << e.what() << '\n';
    return kExitMethodFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitMethodFailure;
  }
  return 0;
}
