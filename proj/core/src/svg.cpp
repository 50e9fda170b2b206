#include "losdoe/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "losdoe/error.hpp"

namespace losdoe {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Range {
  double lo;
  double hi;
};

Range padded(double lo, double hi) {
  if (!(hi > lo)) return {lo - 0.5, hi + 0.5};
  const double pad = 0.05 * (hi - lo);
  return {lo - pad, hi + pad};
}

class Canvas {
 public:
  Canvas(Range x, Range y, const PlotLabels& labels) : x_(x), y_(y) {
    out_ += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" "
        "viewBox=\"0 0 {:.0f} {:.0f}\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out_ += fmt::format("<rect width=\"{:.0f}\" height=\"{:.0f}\" fill=\"white\"/>\n", kWidth,
                        kHeight);
    out_ += fmt::format(
        "<text class=\"title\" x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}"
        "</text>\n",
        kWidth / 2.0, escape(labels.title));
    axes(labels);
  }

  double px(double x) const { return kLeft + (x - x_.lo) / (x_.hi - x_.lo) * plot_w(); }
  double py(double y) const { return kTop + (y_.hi - y) / (y_.hi - y_.lo) * plot_h(); }
  static double plot_w() { return kWidth - kLeft - kRight; }
  static double plot_h() { return kHeight - kTop - kBottom; }

  void add(std::string s) { out_ += std::move(s); }
  std::string finish() { return out_ + "</svg>\n"; }

 private:
  void axes(const PlotLabels& labels) {
    const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
    out_ += fmt::format(
        "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">"
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/>"
        "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\"/></g>\n",
        x0, y0, x1, y0, x0, y0, x0, y1);
    for (int i = 0; i <= 4; ++i) {
      const double xv = x_.lo + (x_.hi - x_.lo) * i / 4.0;
      const double yv = y_.lo + (y_.hi - y_.lo) * i / 4.0;
      out_ += fmt::format(
          "<text class=\"tick\" x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" "
          "font-size=\"11\">{:.3g}</text>\n",
          px(xv), y0 + 16.0, xv);
      out_ += fmt::format(
          "<text class=\"tick\" x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" "
          "font-size=\"11\">{:.3g}</text>\n",
          x0 - 6.0, py(yv) + 4.0, yv);
    }
    out_ += fmt::format(
        "<text class=\"x-label\" x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" "
        "font-size=\"13\">{}</text>\n",
        kLeft + plot_w() / 2.0, kHeight - 18.0, escape(labels.x_label));
    out_ += fmt::format(
        "<text class=\"y-label\" x=\"18\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"13\" "
        "transform=\"rotate(-90 18 {:.1f})\">{}</text>\n",
        kTop + plot_h() / 2.0, kTop + plot_h() / 2.0, escape(labels.y_label));
  }

  Range x_;
  Range y_;
  std::string out_;
};

void require_finite(std::span<const double> v, std::string_view what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw InputError(fmt::format("{} contains a non-finite value", what));
  }
}

}  // namespace

std::string histogram_svg(const HistogramData& h, const PlotLabels& labels) {
  if (h.counts.empty() || h.edges.size() != h.counts.size() + 1) {
    throw InputError("histogram plot: empty or malformed series");
  }
  require_finite(h.edges, "histogram edges");
  const auto peak = *std::max_element(h.counts.begin(), h.counts.end());
  Canvas canvas({h.edges.front(), h.edges.back()}, {0.0, std::max<double>(1.0, peak) * 1.05},
                labels);
  for (std::size_t b = 0; b < h.counts.size(); ++b) {
    const double x0 = canvas.px(h.edges[b]);
    const double x1 = canvas.px(h.edges[b + 1]);
    const double y = canvas.py(static_cast<double>(h.counts[b]));
    const double base = canvas.py(0.0);
    canvas.add(fmt::format(
        "<rect class=\"bar\" data-count=\"{}\" x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" "
        "height=\"{:.2f}\" fill=\"#7a9cc6\" stroke=\"#2d4b73\"/>\n",
        h.counts[b], x0, y, x1 - x0, base - y));
  }
  return canvas.finish();
}

std::string scatter_svg(std::span<const double> x, std::span<const double> y,
                        const PlotLabels& labels, bool identity_line, std::size_t max_points) {
  if (x.empty() || x.size() != y.size()) throw InputError("scatter plot: empty or mismatched series");
  require_finite(x, "scatter x");
  require_finite(y, "scatter y");
  auto [xlo, xhi] = std::minmax_element(x.begin(), x.end());
  auto [ylo, yhi] = std::minmax_element(y.begin(), y.end());
  Range xr = padded(*xlo, *xhi);
  Range yr = padded(*ylo, *yhi);
  if (identity_line) {
    xr = yr = {std::min(xr.lo, yr.lo), std::max(xr.hi, yr.hi)};
  }
  Canvas canvas(xr, yr, labels);
  if (identity_line) {
    canvas.add(fmt::format(
        "<line class=\"identity\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" "
        "stroke=\"#c0392b\" stroke-width=\"1.5\"/>\n",
        canvas.px(xr.lo), canvas.py(xr.lo), canvas.px(xr.hi), canvas.py(xr.hi)));
  }
  const std::size_t stride =
      max_points == 0 ? 1 : std::max<std::size_t>(1, (x.size() + max_points - 1) / max_points);
  canvas.add(fmt::format("<g class=\"points\" data-total=\"{}\" data-stride=\"{}\" "
                         "fill=\"#2d4b73\" fill-opacity=\"0.5\">\n",
                         x.size(), stride));
  for (std::size_t i = 0; i < x.size(); i += stride) {
    canvas.add(fmt::format("<circle class=\"point\" cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2\"/>\n",
                           canvas.px(x[i]), canvas.py(y[i])));
  }
  canvas.add("</g>\n");
  return canvas.finish();
}

std::string pp_svg(const PPPlotData& pp, const PlotLabels& labels) {
  if (pp.empirical.empty()) throw InputError("P-P plot: empty series");
  return scatter_svg(pp.empirical, pp.theoretical, labels, true);
}

std::string subset_means_svg(const HomogeneousSubsets& subsets,
                             std::span<const LevelSummary> levels, const PlotLabels& labels) {
  if (subsets.order.empty() || levels.size() != subsets.order.size()) {
    throw InputError("subset-means plot: empty or mismatched series");
  }
  double lo = levels[subsets.order.front()].mean;
  double hi = levels[subsets.order.back()].mean;
  const Range yr = padded(lo, hi);
  const double k = static_cast<double>(levels.size());
  Canvas canvas({0.5, k + 0.5}, yr, labels);
  for (std::size_t pos = 0; pos < subsets.order.size(); ++pos) {
    const auto& level = levels[subsets.order[pos]];
    const double cx = canvas.px(static_cast<double>(pos + 1));
    canvas.add(fmt::format(
        "<circle class=\"mean\" data-level=\"{}\" data-mean=\"{}\" cx=\"{:.2f}\" cy=\"{:.2f}\" "
        "r=\"4\" fill=\"#2d4b73\"/>\n",
        escape(level.level), level.mean, cx, canvas.py(level.mean)));
    canvas.add(fmt::format(
        "<text class=\"level\" x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\" "
        "font-size=\"11\">{}</text>\n",
        cx, kHeight - kBottom + 30.0, escape(level.level)));
  }
  for (std::size_t s = 0; s < subsets.subsets.size(); ++s) {
    const auto& sub = subsets.subsets[s];
    const auto first = std::find(subsets.order.begin(), subsets.order.end(), sub.levels.front());
    const auto pos0 = static_cast<double>(first - subsets.order.begin()) + 1.0;
    const auto pos1 = pos0 + static_cast<double>(sub.levels.size()) - 1.0;
    const double y = kTop + 8.0 + 6.0 * static_cast<double>(s % 4);
    canvas.add(fmt::format(
        "<line class=\"subset\" data-subset=\"{}\" x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" "
        "y2=\"{:.2f}\" stroke=\"#c0392b\" stroke-width=\"3\"/>\n",
        s + 1, canvas.px(pos0) - 6.0, y, canvas.px(pos1) + 6.0, y));
  }
  return canvas.finish();
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError(fmt::format("cannot write '{}'", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw InputError(fmt::format("error writing '{}'", path.string()));
}

}  // namespace losdoe
