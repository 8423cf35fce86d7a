#ifndef MZDMD_CONFIG_HPP
#define MZDMD_CONFIG_HPP

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mzdmd/adam.hpp"
#include "mzdmd/oscillator.hpp"

namespace mzdmd {

enum class Method { dmd, mz_dmd, t_model, projection, all };

std::string_view to_string(Method m);
Method parse_method(std::string_view name);

/// The concrete methods `m` expands to, in output order.
std::vector<Method> expand(Method m);

struct ExperimentConfig {
  SimConfig sim;
  AdamConfig adam;
  int n_u = 100;
  Method method = Method::all;
  Eigen::Vector2d resolved_init{1.0, 0.0};
  std::filesystem::path output_dir = "mzdmd_out";
  bool emit_plots = true;
  unsigned threads = 0;  // 0: hardware concurrency

  void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Omitted keys keep their
/// defaults. Unknown or repeated keys are rejected.
ExperimentConfig parse_config_text(std::string_view text);

ExperimentConfig parse_config(const std::filesystem::path& path);

/// Environment variable that, when set and non-empty, replaces output_dir.
inline constexpr const char* kOutputDirEnv = "MZDMD_OUTPUT_DIR";

void apply_environment(ExperimentConfig& cfg);

/// The keys parse_config accepts.
const std::vector<std::string>& config_keys();

}  // namespace mzdmd

#endif  // MZDMD_CONFIG_HPP
