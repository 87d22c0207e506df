#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "brlstm/error.hpp"
#include "brlstm/experiments.hpp"

namespace brlstm {
namespace {

constexpr std::uint64_t kPathsStream = 0xF16;

std::string num(double v, const char* fmt = "%.2f") {
  char buf[48];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

PathsFigure emit_paths_figure(const std::vector<double>& alphas, const std::vector<int>& paths,
                              double xmin, double xmax, std::uint64_t seed, std::size_t points,
                              Sampling sampling) {
  if (alphas.empty() || paths.empty()) throw ConfigError("paths: alpha and M lists must be non-empty");
  if (!std::isfinite(xmin) || !std::isfinite(xmax) || !(xmin < xmax)) {
    throw ConfigError("paths: need finite xmin < xmax");
  }
  if (!(xmin < 0.0)) throw ConfigError("paths: the x range must include negative inputs");
  if (points < 2) throw ConfigError("paths: need at least 2 grid points");
  for (double a : alphas)
    if (!std::isfinite(a)) throw ConfigError("paths: alpha values must be finite");

  PathsFigure fig{alphas, paths, {}, {}};
  Matrix grid(1, points);
  const double step = (xmax - xmin) / static_cast<double>(points - 1);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = k + 1 == points ? xmax : xmin + step * static_cast<double>(k);
  }
  fig.x.assign(grid.values().begin(), grid.values().end());

  const RngStream root(seed, kPathsStream);
  for (double alpha : alphas) {
    for (int m : paths) {
      const ActivationKind kind = ActivationKind::brownian(m, sampling);
      const auto r = forward(kind, grid, alpha, root.derive(static_cast<std::uint64_t>(m)));
      fig.values.emplace_back(r.output.values().begin(), r.output.values().end());
    }
  }
  return fig;
}

std::string PathsFigure::to_csv() const {
  std::string out = "alpha,M,x,f\n";
  char buf[128];
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    for (std::size_t m = 0; m < paths.size(); ++m) {
      const auto& curve = values[a * paths.size() + m];
      for (std::size_t k = 0; k < x.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.6f,%d,%.6f,%.9f\n", alphas[a], paths[m], x[k],
                      curve[k]);
        out += buf;
      }
    }
  }
  return out;
}

std::string PathsFigure::to_svg() const {
  constexpr double kWidth = 800, kHeight = 500;
  constexpr double kLeft = 60, kRight = 180, kTop = 30, kBottom = 50;
  static const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                         "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

  double ylo = 0.0, yhi = 0.0;
  for (const auto& c : values) {
    for (double v : c) {
      ylo = std::min(ylo, v);
      yhi = std::max(yhi, v);
    }
  }
  if (yhi - ylo < 1e-12) yhi = ylo + 1.0;
  const double xlo = x.front(), xhi = x.back();
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double v) { return kLeft + (v - xlo) / (xhi - xlo) * plot_w; };
  auto sy = [&](double v) { return kTop + (yhi - v) / (yhi - ylo) * plot_h; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth, "%.0f") +
                    "\" height=\"" + num(kHeight, "%.0f") + "\" font-family=\"sans-serif\" " +
                    "font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"18\" text-anchor=\"middle\">" +
         "BrownianReLU Monte Carlo mean paths</text>\n";
  // Axes through the origin when it is visible, else along the frame.
  const double ax_y = sy(std::clamp(0.0, ylo, yhi));
  const double ax_x = sx(std::clamp(0.0, xlo, xhi));
  svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(ax_y) + "\" x2=\"" + num(kLeft + plot_w) +
         "\" y2=\"" + num(ax_y) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + num(ax_x) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(ax_x) +
         "\" y2=\"" + num(kTop + plot_h) + "\" stroke=\"black\"/>\n";
  svg += "<text x=\"" + num(kLeft) + "\" y=\"" + num(kTop + plot_h + 20) + "\">" +
         num(xlo, "%g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft + plot_w) + "\" y=\"" + num(kTop + plot_h + 20) +
         "\" text-anchor=\"end\">" + num(xhi, "%g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(kTop + 4) + "\" text-anchor=\"end\">" +
         num(yhi, "%.3g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(kTop + plot_h) +
         "\" text-anchor=\"end\">" + num(ylo, "%.3g") + "</text>\n";
  svg += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 10) +
         "\" text-anchor=\"middle\">x</text>\n";

  for (std::size_t c = 0; c < values.size(); ++c) {
    const char* color = kPalette[c % std::size(kPalette)];
    svg += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(color) +
           "\" points=\"";
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k) svg += ' ';
      svg += num(sx(x[k])) + "," + num(sy(values[c][k]));
    }
    svg += "\"/>\n";
    const double ly = kTop + 16.0 * static_cast<double>(c);
    const double lx = kWidth - kRight + 15;
    svg += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) +
           "\" y2=\"" + num(ly) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\">alpha=" +
           num(alphas[c / paths.size()], "%g") + ", M=" +
           std::to_string(paths[c % paths.size()]) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace brlstm
