#include "mzdmd/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "mzdmd/errors.hpp"

namespace mzdmd {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 160.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

struct Range {
  double lo;
  double hi;
};

double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const PlotData& data) {
  const Eigen::Index n = data.times.size();
  if (n < 2) throw ShapeError("plot: need at least two time points");
  for (const auto& s : data.series) {
    if (s.values.size() != n || (s.variance && s.variance->size() != n)) {
      throw ShapeError("plot: series '" + s.label + "' does not match the time axis");
    }
  }

  Range x{data.times.minCoeff(), data.times.maxCoeff()};
  Range y{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& s : data.series) {
    Eigen::VectorXd half = Eigen::VectorXd::Zero(n);
    if (s.variance) half = s.variance->cwiseMax(0.0).cwiseSqrt();
    y.lo = std::min(y.lo, (s.values - half).minCoeff());
    y.hi = std::max(y.hi, (s.values + half).maxCoeff());
  }
  if (data.series.empty()) y = {-1.0, 1.0};
  if (y.hi - y.lo < 1e-12) {
    y.lo -= 1.0;
    y.hi += 1.0;
  } else {
    const double pad = 0.05 * (y.hi - y.lo);
    y.lo -= pad;
    y.hi += pad;
  }
  if (x.hi <= x.lo) x.hi = x.lo + 1.0;

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + (t - x.lo) / (x.hi - x.lo) * pw; };
  auto py = [&](double v) { return kTop + (y.hi - v) / (y.hi - y.lo) * ph; };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"15\">" << escape(data.title) << "</text>\n";

  svg << "<g id=\"axes\" stroke=\"#333\" fill=\"none\">\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph << "\"/>\n";
  svg << "</g>\n<g id=\"ticks\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  const double xs = nice_step(x.hi - x.lo, 8);
  for (double t = std::ceil(x.lo / xs) * xs; t <= x.hi + 1e-9 * xs; t += xs) {
    svg << "<line x1=\"" << px(t) << "\" x2=\"" << px(t) << "\" y1=\"" << kTop + ph << "\" y2=\""
        << kTop + ph + 5 << "\" stroke=\"#333\"/>";
    svg << "<text x=\"" << px(t) << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">" << t
        << "</text>\n";
  }
  const double ys = nice_step(y.hi - y.lo, 6);
  for (double v = std::ceil(y.lo / ys) * ys; v <= y.hi + 1e-9 * ys; v += ys) {
    const double shown = std::abs(v) < 1e-9 * ys ? 0.0 : v;
    svg << "<line x1=\"" << kLeft - 5 << "\" x2=\"" << kLeft << "\" y1=\"" << py(v) << "\" y2=\"" << py(v)
        << "\" stroke=\"#333\"/>";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << py(v) + 4 << "\" text-anchor=\"end\">" << shown
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12 << "\" text-anchor=\"middle\">t</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + ph / 2 << ")\">" << escape(data.y_label) << "</text>\n</g>\n";

  for (std::size_t si = 0; si < data.series.size(); ++si) {
    const auto& s = data.series[si];
    svg << "<g class=\"series\" data-label=\"" << escape(s.label) << "\">\n";
    if (s.variance) {
      const Eigen::VectorXd half = s.variance->cwiseMax(0.0).cwiseSqrt();
      svg << "<polygon class=\"band\" fill=\"" << s.color << "\" fill-opacity=\"0.2\" stroke=\"none\" points=\"";
      for (Eigen::Index k = 0; k < n; ++k) svg << px(data.times(k)) << ',' << py(s.values(k) + half(k)) << ' ';
      for (Eigen::Index k = n - 1; k >= 0; --k) svg << px(data.times(k)) << ',' << py(s.values(k) - half(k)) << ' ';
      svg << "\"/>\n";
    }
    svg << "<polyline class=\"line\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
    for (Eigen::Index k = 0; k < n; ++k) svg << px(data.times(k)) << ',' << py(s.values(k)) << ' ';
    svg << "\"/>\n";
    const double ly = kTop + 14 + 18 * static_cast<double>(si);
    svg << "<line x1=\"" << kWidth - kRight + 12 << "\" x2=\"" << kWidth - kRight + 34 << "\" y1=\"" << ly
        << "\" y2=\"" << ly << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>";
    svg << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << escape(s.label) << "</text>\n</g>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void emit_plot(const PlotData& data, const std::filesystem::path& path) {
  const std::string svg = render_svg(data);
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out << svg;
  if (!out) throw Error("I/O error while writing '" + path.string() + "'");
}

}  // namespace mzdmd
