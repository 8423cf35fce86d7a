#ifndef MZDMD_PLOT_HPP
#define MZDMD_PLOT_HPP

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mzdmd {

struct PlotSeries {
  std::string label;
  Eigen::VectorXd values;
  std::optional<Eigen::VectorXd> variance;  // drawn as a band values +- sqrt(variance)
  std::string color = "#1f77b4";
};

struct PlotData {
  std::string title;
  std::string y_label;
  Eigen::VectorXd times;
  std::vector<PlotSeries> series;
};

/// Renders a self-contained SVG line plot with optional variance bands.
std::string render_svg(const PlotData& data);

void emit_plot(const PlotData& data, const std::filesystem::path& path);

}  // namespace mzdmd

#endif  // MZDMD_PLOT_HPP
