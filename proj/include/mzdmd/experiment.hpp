#ifndef MZDMD_EXPERIMENT_HPP
#define MZDMD_EXPERIMENT_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mzdmd/config.hpp"
#include "mzdmd/errors.hpp"
#include "mzdmd/oscillator.hpp"
#include "mzdmd/spectral.hpp"

namespace mzdmd {

/// A method failed; carries which method and which pipeline stage.
class MethodFailure : public Error {
 public:
  MethodFailure(std::string method, std::string stage, const std::string& cause)
      : Error(method + " failed during " + stage + ": " + cause),
        method_(std::move(method)),
        stage_(std::move(stage)) {}

  const std::string& method() const noexcept { return method_; }
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string method_;
  std::string stage_;
};

struct MethodResult {
  Method method = Method::dmd;
  Trajectory mean;
  std::optional<Trajectory> variance;
  std::optional<SpectralModel> model;
  std::vector<SpectralModel> samples;
  std::vector<std::vector<double>> loss_traces;
  double fit_seconds = 0.0;
  double wall_seconds = 0.0;
  double max_imag = 0.0;
  bool imag_warning = false;
  bool negative_real_eigenvalue = false;
  int degenerate_matchings = 0;
};

struct RunReport {
  std::uint64_t seed = 0;
  nlohmann::json config;
  std::map<std::string, double> wall_seconds;
  std::map<std::string, double> fit_seconds;
  std::map<std::string, std::vector<std::vector<double>>> loss_traces;
  std::map<std::string, double> max_imag;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> files;

  nlohmann::json to_json() const;
};

/// File stem used for a method's outputs: dmd, mzdmd, tmodel, projection.
std::string file_stem(Method m);

nlohmann::json config_to_json(const ExperimentConfig& cfg);

nlohmann::json model_to_json(const SpectralModel& model);
SpectralModel model_from_json(const nlohmann::json& j);

/// Plain DMD fit of the measurement reconstructed from its first sample.
MethodResult run_dmd(const Trajectory& measurement);

/// Ensemble fit over cfg.n_u memory draws, averaged and reconstructed.
MethodResult run_ensemble(ObjectiveKind kind, const ExperimentConfig& cfg, const Trajectory& measurement);

/// Monte Carlo projection over the unresolved initial values.
MethodResult run_projection(const ExperimentConfig& cfg);

/// Runs every requested method on one measurement and writes CSVs, plots
/// and report.json into cfg.output_dir.
RunReport run_pipeline(const ExperimentConfig& cfg, const Trajectory& measurement);

/// Simulates the measurement from the configured seed, then run_pipeline.
RunReport run_experiment(const ExperimentConfig& cfg);

}  // namespace mzdmd

#endif  // MZDMD_EXPERIMENT_HPP
