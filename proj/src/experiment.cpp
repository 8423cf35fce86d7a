#include "mzdmd/experiment.hpp"

#include <chrono>
#include <fstream>

#include "mzdmd/csv.hpp"
#include "mzdmd/plot.hpp"

namespace mzdmd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string color_for(Method m) {
  switch (m) {
    case Method::dmd: return "#d62728";
    case Method::mz_dmd: return "#2ca02c";
    case Method::t_model: return "#9467bd";
    case Method::projection: return "#1f77b4";
    case Method::all: break;
  }
  return "#7f7f7f";
}

std::string label_for(Method m) {
  switch (m) {
    case Method::dmd: return "DMD";
    case Method::mz_dmd: return "MZ-DMD";
    case Method::t_model: return "t-model";
    case Method::projection: return "Projection";
    case Method::all: break;
  }
  return "?";
}

// Runs `body`, rethrowing any library error as a MethodFailure tagged with
// the method and stage.
template <typename Body>
auto staged(Method m, const char* stage, Body&& body) {
  try {
    return body();
  } catch (const MethodFailure&) {
    throw;
  } catch (const std::exception& e) {
    throw MethodFailure(std::string(to_string(m)), stage, e.what());
  }
}

void finish_reconstruction(MethodResult& r, const SpectralModel& model, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& times) {
  const Reconstruction rec = staged(r.method, "reconstruct", [&] { return reconstruct(model, x0, times); });
  r.mean = rec.traj;
  r.max_imag = rec.max_imag;
  r.imag_warning = rec.imag_warning;
  r.negative_real_eigenvalue = rec.negative_real_eigenvalue;
  r.model = model;
}

}  // namespace

std::string file_stem(Method m) {
  switch (m) {
    case Method::dmd: return "dmd";
    case Method::mz_dmd: return "mzdmd";
    case Method::t_model: return "tmodel";
    case Method::projection: return "projection";
    case Method::all: break;
  }
  throw Error("file_stem: 'all' is not a single method");
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  return {{"dt", cfg.sim.dt},
          {"t_max", cfg.sim.t_max},
          {"n_points", cfg.sim.n_points},
          {"sigma", cfg.sim.sigma},
          {"n_mc", cfg.sim.n_mc},
          {"seed", cfg.sim.seed},
          {"substeps", cfg.sim.substeps},
          {"n_u", cfg.n_u},
          {"lr", cfg.adam.learning_rate},
          {"beta1", cfg.adam.beta1},
          {"beta2", cfg.adam.beta2},
          {"epsilon", cfg.adam.epsilon},
          {"iterations", cfg.adam.iterations},
          {"method", std::string(to_string(cfg.method))},
          {"resolved_init", {cfg.resolved_init(0), cfg.resolved_init(1)}},
          {"output_dir", cfg.output_dir.string()},
          {"emit_plots", cfg.emit_plots},
          {"threads", cfg.threads}};
}

nlohmann::json model_to_json(const SpectralModel& model) {
  nlohmann::json values = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.dim(); ++i) values.push_back({model.values(i).real(), model.values(i).imag()});
  nlohmann::json vectors = nlohmann::json::array();
  for (Eigen::Index i = 0; i < model.vectors.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < model.vectors.cols(); ++j) {
      row.push_back({model.vectors(i, j).real(), model.vectors(i, j).imag()});
    }
    vectors.push_back(std::move(row));
  }
  return {{"dt", model.dt}, {"values", values}, {"vectors", vectors}};
}

SpectralModel model_from_json(const nlohmann::json& j) {
  try {
    SpectralModel m;
    m.dt = j.at("dt").get<double>();
    const auto& values = j.at("values");
    const auto d = static_cast<Eigen::Index>(values.size());
    m.values.resize(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      m.values(i) = {values.at(i).at(0).get<double>(), values.at(i).at(1).get<double>()};
    }
    const auto& vectors = j.at("vectors");
    if (static_cast<Eigen::Index>(vectors.size()) != d) throw ShapeError("model: vectors must be d x d");
    m.vectors.resize(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      const auto& row = vectors.at(r);
      if (static_cast<Eigen::Index>(row.size()) != d) throw ShapeError("model: vectors must be d x d");
      for (Eigen::Index c = 0; c < d; ++c) m.vectors(r, c) = {row.at(c).at(0).get<double>(), row.at(c).at(1).get<double>()};
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ShapeError(std::string("model: malformed JSON: ") + e.what());
  }
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json files_json = nlohmann::json::array();
  for (const auto& f : files) files_json.push_back(f.filename().string());
  return {{"seed", seed},         {"config", config},       {"wall_seconds", wall_seconds},
          {"fit_seconds", fit_seconds}, {"loss_traces", loss_traces}, {"max_imag", max_imag},
          {"warnings", warnings}, {"files", files_json}};
}

MethodResult run_dmd(const Trajectory& measurement) {
  const auto start = Clock::now();
  MethodResult r;
  r.method = Method::dmd;
  const SnapshotPair s = staged(Method::dmd, "measure", [&] { return measure(measurement); });
  const SpectralModel model = staged(Method::dmd, "fit", [&] { return spectral_model(dmd_fit(s), s.dt); });
  r.fit_seconds = seconds_since(start);
  const Eigen::VectorXd x0 = measurement.states.row(0).leftCols(2).transpose();
  finish_reconstruction(r, model, x0, measurement.times);
  r.wall_seconds = seconds_since(start);
  return r;
}

MethodResult run_ensemble(ObjectiveKind kind, const ExperimentConfig& cfg, const Trajectory& measurement) {
  const Method method = kind == ObjectiveKind::mz_dmd ? Method::mz_dmd : Method::t_model;
  const auto start = Clock::now();
  MethodResult r;
  r.method = method;
  const SnapshotPair s = staged(method, "measure", [&] { return measure(measurement); });

  const auto fit_start = Clock::now();
  EnsembleFit ens = staged(method, "fit", [&] {
    return fit_ensemble(kind, s, cfg.sim.sigma, cfg.n_u, cfg.adam, cfg.sim.seed, cfg.threads);
  });
  r.fit_seconds = seconds_since(fit_start);

  const AveragedSpectrum avg = staged(method, "average", [&] { return match_and_average(ens.models); });
  r.degenerate_matchings = avg.degenerate_matchings;
  const Eigen::VectorXd x0 = measurement.states.row(0).leftCols(2).transpose();
  finish_reconstruction(r, avg.model, x0, measurement.times);
  r.variance = staged(method, "variance", [&] {
    return ensemble_variance(ens.models, r.mean, x0, measurement.times);
  });
  r.samples = std::move(ens.models);
  r.loss_traces = std::move(ens.loss_traces);
  r.wall_seconds = seconds_since(start);
  return r;
}

MethodResult run_projection(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  MethodResult r;
  r.method = Method::projection;
  ProjectionResult p = staged(Method::projection, "simulate", [&] {
    return monte_carlo_projection(cfg.sim, cfg.resolved_init, cfg.threads);
  });
  r.mean = std::move(p.mean);
  r.variance = std::move(p.variance);
  r.wall_seconds = seconds_since(start);
  r.fit_seconds = r.wall_seconds;
  return r;
}

RunReport run_pipeline(const ExperimentConfig& cfg, const Trajectory& measurement) {
  cfg.validate();
  RunReport report;
  report.seed = cfg.sim.seed;
  report.config = config_to_json(cfg);
  const auto& out = cfg.output_dir;
  std::filesystem::create_directories(out);

  const Trajectory resolved = resolved_part(measurement);
  write_csv(out / "measurement.csv", resolved);
  report.files.push_back(out / "measurement.csv");

  std::vector<MethodResult> results;
  for (Method m : expand(cfg.method)) {
    switch (m) {
      case Method::dmd: results.push_back(run_dmd(resolved)); break;
      case Method::mz_dmd: results.push_back(run_ensemble(ObjectiveKind::mz_dmd, cfg, resolved)); break;
      case Method::t_model: results.push_back(run_ensemble(ObjectiveKind::t_model, cfg, resolved)); break;
      case Method::projection: results.push_back(run_projection(cfg)); break;
      case Method::all: break;
    }
  }

  std::vector<std::string> header{"t", "measurement_y1", "measurement_y2"};
  std::vector<Eigen::VectorXd> columns{resolved.times, resolved.states.col(0), resolved.states.col(1)};
  for (const auto& r : results) {
    const std::string stem = file_stem(r.method);
    const std::string name(to_string(r.method));
    const auto path = out / (stem + ".csv");
    if (r.mean.size() != resolved.size()) {
      throw MethodFailure(name, "write", "trajectory length differs from the measurement grid");
    }
    if (r.variance) {
      write_csv(path, r.mean, *r.variance);
    } else {
      write_csv(path, r.mean);
    }
    report.files.push_back(path);

    for (int c = 0; c < 2; ++c) {
      header.push_back(stem + "_y" + std::to_string(c + 1));
      columns.push_back(r.mean.states.col(c));
    }
    if (r.variance) {
      for (int c = 0; c < 2; ++c) {
        header.push_back(stem + "_var" + std::to_string(c + 1));
        columns.push_back(r.variance->states.col(c));
      }
    }

    report.wall_seconds[name] = r.wall_seconds;
    report.fit_seconds[name] = r.fit_seconds;
    if (!r.loss_traces.empty()) report.loss_traces[name] = r.loss_traces;
    if (r.model) report.max_imag[name] = r.max_imag;
    if (r.imag_warning) report.warnings.push_back(name + ": imaginary residue above 1e-6 of the trajectory norm");
    if (r.negative_real_eigenvalue) {
      report.warnings.push_back(name + ": eigenvalue on the negative real axis mapped to frequency pi/dt");
    }
    if (r.degenerate_matchings > 0) {
      report.warnings.push_back(name + ": " + std::to_string(r.degenerate_matchings) +
                                " eigenvalue matchings were ambiguous");
    }
    if (r.model) {
      nlohmann::json model_json = model_to_json(*r.model);
      model_json["method"] = name;
      std::ofstream(out / (stem + "_model.json")) << model_json.dump(2) << '\n';
      report.files.push_back(out / (stem + "_model.json"));
    }
  }

  Eigen::MatrixXd table(resolved.size(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) table.col(static_cast<Eigen::Index>(j)) = columns[j];
  write_table(out / "comparison.csv", header, table);
  report.files.push_back(out / "comparison.csv");

  if (cfg.emit_plots) {
    for (int c = 0; c < 2; ++c) {
      PlotData plot;
      plot.title = "y" + std::to_string(c + 1) + "(t)";
      plot.y_label = "y" + std::to_string(c + 1);
      plot.times = resolved.times;
      plot.series.push_back({"Measurement", resolved.states.col(c), std::nullopt, "#ff7f0e"});
      for (const auto& r : results) {
        std::optional<Eigen::VectorXd> band;
        if (r.variance) band = r.variance->states.col(c);
        plot.series.push_back({label_for(r.method), r.mean.states.col(c), band, color_for(r.method)});
      }
      const auto path = out / ("y" + std::to_string(c + 1) + ".svg");
      emit_plot(plot, path);
      report.files.push_back(path);
    }
  }

  std::ofstream(out / "report.json") << report.to_json().dump(2) << '\n';
  return report;
}

RunReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const Trajectory measurement = staged(Method::all, "simulate", [&] {
    return simulate_measurement(cfg.sim, cfg.resolved_init);
  });
  return run_pipeline(cfg, measurement);
}

}  // namespace mzdmd
