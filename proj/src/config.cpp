#include "mzdmd/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "mzdmd/errors.hpp"

namespace mzdmd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(std::string_view key, std::string_view value, int line) {
  double out = 0.0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError("'" + std::string(key) + "' expects a real number, got '" + std::string(value) + "'",
                      std::string(key), line);
  }
  return out;
}

long long parse_integer(std::string_view key, std::string_view value, int line) {
  long long out = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("'" + std::string(key) + "' expects an integer, got '" + std::string(value) + "'",
                      std::string(key), line);
  }
  return out;
}

bool parse_flag(std::string_view key, std::string_view value, int line) {
  if (value == "true" || value == "yes" || value == "1" || value == "on") return true;
  if (value == "false" || value == "no" || value == "0" || value == "off") return false;
  throw ConfigError("'" + std::string(key) + "' expects true or false", std::string(key), line);
}

void require(bool ok, const char* field, const std::string& what) {
  if (!ok) throw ConfigError(std::string(field) + ": " + what, field);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, int)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    t["dt"] = [](ExperimentConfig& c, std::string_view v, int l) { c.sim.dt = parse_real("dt", v, l); };
    t["t_max"] = [](ExperimentConfig& c, std::string_view v, int l) { c.sim.t_max = parse_real("t_max", v, l); };
    t["n_points"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.sim.n_points = static_cast<int>(parse_integer("n_points", v, l));
    };
    t["sigma"] = [](ExperimentConfig& c, std::string_view v, int l) { c.sim.sigma = parse_real("sigma", v, l); };
    t["n_mc"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.sim.n_mc = static_cast<int>(parse_integer("n_mc", v, l));
    };
    t["seed"] = [](ExperimentConfig& c, std::string_view v, int l) {
      const long long s = parse_integer("seed", v, l);
      if (s < 0) throw ConfigError("seed must be non-negative", "seed", l);
      c.sim.seed = static_cast<std::uint64_t>(s);
    };
    t["substeps"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.sim.substeps = static_cast<int>(parse_integer("substeps", v, l));
    };
    t["n_u"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.n_u = static_cast<int>(parse_integer("n_u", v, l));
    };
    t["lr"] = [](ExperimentConfig& c, std::string_view v, int l) { c.adam.learning_rate = parse_real("lr", v, l); };
    t["beta1"] = [](ExperimentConfig& c, std::string_view v, int l) { c.adam.beta1 = parse_real("beta1", v, l); };
    t["beta2"] = [](ExperimentConfig& c, std::string_view v, int l) { c.adam.beta2 = parse_real("beta2", v, l); };
    t["epsilon"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.adam.epsilon = parse_real("epsilon", v, l);
    };
    t["iterations"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.adam.iterations = static_cast<int>(parse_integer("iterations", v, l));
    };
    t["method"] = [](ExperimentConfig& c, std::string_view v, int l) {
      try {
        c.method = parse_method(v);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), "method", l);
      }
    };
    t["resolved_init"] = [](ExperimentConfig& c, std::string_view v, int l) {
      const auto comma = v.find(',');
      if (comma == std::string_view::npos) {
        throw ConfigError("resolved_init expects two comma-separated numbers", "resolved_init", l);
      }
      c.resolved_init(0) = parse_real("resolved_init", trim(v.substr(0, comma)), l);
      c.resolved_init(1) = parse_real("resolved_init", trim(v.substr(comma + 1)), l);
    };
    t["output_dir"] = [](ExperimentConfig& c, std::string_view v, int l) {
      if (v.empty()) throw ConfigError("output_dir must not be empty", "output_dir", l);
      c.output_dir = std::filesystem::path(std::string(v));
    };
    t["emit_plots"] = [](ExperimentConfig& c, std::string_view v, int l) {
      c.emit_plots = parse_flag("emit_plots", v, l);
    };
    t["threads"] = [](ExperimentConfig& c, std::string_view v, int l) {
      const long long n = parse_integer("threads", v, l);
      if (n < 0) throw ConfigError("threads must be non-negative", "threads", l);
      c.threads = static_cast<unsigned>(n);
    };
    return t;
  }();
  return table;
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::dmd:
      return "dmd";
    case Method::mz_dmd:
      return "mz-dmd";
    case Method::t_model:
      return "t-model";
    case Method::projection:
      return "projection";
    case Method::all:
      return "all";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::dmd, Method::mz_dmd, Method::t_model, Method::projection, Method::all}) {
    if (name == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(name) +
                        "' (expected dmd, mz-dmd, t-model, projection or all)",
                    "method");
}

std::vector<Method> expand(Method m) {
  if (m == Method::all) return {Method::dmd, Method::mz_dmd, Method::t_model, Method::projection};
  return {m};
}

void ExperimentConfig::validate() const {
  require(sim.dt > 0.0, "dt", "must be positive");
  require(sim.t_max > 0.0, "t_max", "must be positive");
  require(sim.n_points >= 2, "n_points", "must be at least 2");
  require(std::abs(sim.dt * (sim.n_points - 1) - sim.t_max) <= 1e-12 * std::max(1.0, sim.t_max), "n_points",
          "dt * (n_points - 1) must equal t_max");
  require(sim.sigma >= 0.0, "sigma", "must be non-negative");
  require(sim.n_mc >= 1, "n_mc", "must be at least 1");
  require(sim.substeps >= 1, "substeps", "must be at least 1");
  require(n_u >= 1, "n_u", "must be at least 1");
  require(adam.learning_rate > 0.0, "lr", "must be positive");
  require(adam.beta1 >= 0.0 && adam.beta1 < 1.0, "beta1", "must lie in [0, 1)");
  require(adam.beta2 >= 0.0 && adam.beta2 < 1.0, "beta2", "must lie in [0, 1)");
  require(adam.epsilon > 0.0, "epsilon", "must be positive");
  require(adam.iterations >= 1, "iterations", "must be at least 1");
  require(!output_dir.empty(), "output_dir", "must not be empty");
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", "", line_no);
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", "", line_no);

    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError("unknown key '" + std::string(key) + "'", std::string(key), line_no);
    if (!seen.insert(std::string(key)).second) {
      throw ConfigError("duplicate key '" + std::string(key) + "'", std::string(key), line_no);
    }
    it->second(cfg, value, line_no);
  }

  // A grid given by dt and t_max alone gets its point count derived.
  if (!seen.contains("n_points") && (seen.contains("dt") || seen.contains("t_max")) && cfg.sim.dt > 0.0) {
    const double steps = std::round(cfg.sim.t_max / cfg.sim.dt);
    if (steps >= 1.0 && steps < 1e8) cfg.sim.n_points = static_cast<int>(steps) + 1;
  }
  cfg.validate();
  return cfg;
}

void apply_environment(ExperimentConfig& cfg) {
  if (const char* dir = std::getenv(kOutputDirEnv); dir != nullptr && *dir != '\0') {
    cfg.output_dir = std::filesystem::path(dir);
  }
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'", "");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace mzdmd
