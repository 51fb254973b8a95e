#include "oarseg/plot/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

#include "oarseg/errors.hpp"

namespace oarseg::plot {
namespace {

constexpr std::size_t kMaxRenderedPoints = 4000;
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
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

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

/// Keeps the first, last, min and max point of each bucket.
std::vector<std::size_t> decimate(const Series& s) {
  const auto n = std::min(s.x.size(), s.y.size());
  std::vector<std::size_t> idx;
  if (n <= kMaxRenderedPoints) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  const std::size_t buckets = kMaxRenderedPoints / 4;
  for (std::size_t b = 0; b < buckets; ++b) {
    const auto lo = b * n / buckets, hi = (b + 1) * n / buckets;
    std::size_t mn = lo, mx = lo;
    for (auto i = lo; i < hi; ++i) {
      if (s.y[i] < s.y[mn]) mn = i;
      if (s.y[i] > s.y[mx]) mx = i;
    }
    for (auto i : {lo, std::min(mn, mx), std::max(mn, mx), hi - 1}) {
      if (idx.empty() || idx.back() < i) idx.push_back(i);
    }
  }
  return idx;
}

struct Bounds {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
};

Bounds bounds(const Panel& p) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : p.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) return {};
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) {
    y0 -= 0.5 * std::max(1e-12, std::abs(y0));
    y1 += 0.5 * std::max(1e-12, std::abs(y1));
  }
  const double pad = 0.05 * (y1 - y0);
  return {x0, x1, y0 - pad, y1 + pad};
}

void render_panel(std::string& out, const Panel& p, double ox, double oy, double w, double h) {
  const double left = 64, right = 16, top = 32, bottom = 48;
  const double pw = w - left - right, ph = h - top - bottom;
  const auto b = bounds(p);
  auto sx = [&](double x) { return ox + left + (x - b.x0) / (b.x1 - b.x0) * pw; };
  auto sy = [&](double y) { return oy + top + (1.0 - (y - b.y0) / (b.y1 - b.y0)) * ph; };

  out += "<g class=\"panel\">\n";
  out += "<text x=\"" + num(ox + w / 2) + "\" y=\"" + num(oy + 20) + "\" text-anchor=\"middle\" font-size=\"14\">" +
         esc(p.title) + "</text>\n";
  out += "<rect x=\"" + num(ox + left) + "\" y=\"" + num(oy + top) + "\" width=\"" + num(pw) + "\" height=\"" +
         num(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = b.x0 + (b.x1 - b.x0) * i / 4.0, fy = b.y0 + (b.y1 - b.y0) * i / 4.0;
    out += "<text x=\"" + num(sx(fx)) + "\" y=\"" + num(oy + top + ph + 16) +
           "\" text-anchor=\"middle\" font-size=\"10\">" + tick(fx) + "</text>\n";
    out += "<text x=\"" + num(ox + left - 4) + "\" y=\"" + num(sy(fy) + 3) +
           "\" text-anchor=\"end\" font-size=\"10\">" + tick(fy) + "</text>\n";
  }
  out += "<text x=\"" + num(ox + left + pw / 2) + "\" y=\"" + num(oy + h - 8) +
         "\" text-anchor=\"middle\" font-size=\"11\">" + esc(p.x_label) + "</text>\n";
  out += "<text transform=\"translate(" + num(ox + 14) + "," + num(oy + top + ph / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" + esc(p.y_label) + "</text>\n";

  for (std::size_t k = 0; k < p.series.size(); ++k) {
    const auto& s = p.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    out += "<polyline class=\"series\" data-label=\"" + esc(s.label) + "\" fill=\"none\" stroke=\"" + colour +
           "\" stroke-width=\"1.5\" points=\"";
    for (auto i : decimate(s)) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      out += num(sx(s.x[i])) + "," + num(sy(s.y[i])) + " ";
    }
    out += "\"/>\n";
    const double ly = oy + top + 14 + 14.0 * static_cast<double>(k);
    out += "<line x1=\"" + num(ox + left + 8) + "\" y1=\"" + num(ly - 4) + "\" x2=\"" + num(ox + left + 24) +
           "\" y2=\"" + num(ly - 4) + "\" stroke=\"" + colour + "\" stroke-width=\"2\"/>\n";
    out += "<text class=\"legend\" x=\"" + num(ox + left + 28) + "\" y=\"" + num(ly) + "\" font-size=\"11\">" +
           esc(s.label) + "</text>\n";
  }
  out += "</g>\n";
}

std::string svg_open(double w, double h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(w) + "\" height=\"" + num(h) + "\" viewBox=\"0 0 " +
         num(w) + " " + num(h) + "\" font-family=\"sans-serif\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

Figure curves_figure(const std::string& title, const std::vector<LabeledCurves>& runs) {
  Figure fig{title, {{"DICE", "epoch", "validation mean DICE", {}}, {"Loss", "epoch", "training loss", {}}}};
  for (const auto& r : runs) {
    Series dice{r.label, {}, {}}, loss{r.label, {}, {}};
    for (const auto& p : r.curves.val) {
      dice.x.push_back(static_cast<double>(p.epoch));
      dice.y.push_back(p.mean_dice);
    }
    for (const auto& p : r.curves.train) {
      loss.x.push_back(static_cast<double>(p.epoch));
      loss.y.push_back(p.loss);
    }
    fig.panels[0].series.push_back(std::move(dice));
    fig.panels[1].series.push_back(std::move(loss));
  }
  return fig;
}

Figure lr_figure(const std::string& title, const std::vector<LabeledTrace>& runs) {
  Figure fig{title, {{"Learning rate", "iteration", "lr", {}}}};
  for (const auto& r : runs) {
    Series s{r.label, {}, {}};
    for (const auto& [t, lr] : r.trace) {
      s.x.push_back(static_cast<double>(t));
      s.y.push_back(lr);
    }
    fig.panels[0].series.push_back(std::move(s));
  }
  return fig;
}

std::string render_svg(const Figure& fig, int panel_width, int panel_height) {
  const double w = panel_width * static_cast<double>(std::max<std::size_t>(1, fig.panels.size()));
  const double h = panel_height + 28;
  std::string out = svg_open(w, h);
  out += "<text x=\"" + num(w / 2) + "\" y=\"18\" text-anchor=\"middle\" font-size=\"16\">" + esc(fig.title) + "</text>\n";
  for (std::size_t i = 0; i < fig.panels.size(); ++i) {
    render_panel(out, fig.panels[i], panel_width * static_cast<double>(i), 28, panel_width, panel_height);
  }
  return out + "</svg>\n";
}

std::string render_bar_chart(const std::string& title, const std::string& y_label, const std::vector<Bar>& bars) {
  const double bw = 72, gap = 16, left = 64, top = 40, ph = 260, bottom = 90;
  const double w = left + (bw + gap) * static_cast<double>(std::max<std::size_t>(1, bars.size())) + gap;
  const double h = top + ph + bottom;
  double vmax = 0.0;
  for (const auto& b : bars) vmax = std::max(vmax, std::isfinite(b.value) ? b.value : 0.0);
  if (vmax <= 0.0) vmax = 1.0;
  std::string out = svg_open(w, h);
  out += "<text x=\"" + num(w / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"16\">" + esc(title) + "</text>\n";
  out += "<text transform=\"translate(16," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\" font-size=\"11\">" +
         esc(y_label) + "</text>\n";
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(top + ph) + "\" x2=\"" + num(w - gap / 2) + "\" y2=\"" +
         num(top + ph) + "\" stroke=\"#444\"/>\n";
  for (std::size_t i = 0; i < bars.size(); ++i) {
    const double v = std::isfinite(bars[i].value) ? std::max(0.0, bars[i].value) : 0.0;
    const double bh = v / vmax * ph;
    const double x = left + gap + (bw + gap) * static_cast<double>(i);
    out += "<rect class=\"bar\" data-label=\"" + esc(bars[i].label) + "\" x=\"" + num(x) + "\" y=\"" +
           num(top + ph - bh) + "\" width=\"" + num(bw) + "\" height=\"" + num(bh) + "\" fill=\"" +
           kPalette[i % std::size(kPalette)] + "\"/>\n";
    out += "<text x=\"" + num(x + bw / 2) + "\" y=\"" + num(top + ph - bh - 4) +
           "\" text-anchor=\"middle\" font-size=\"11\">" + tick(bars[i].value) + "</text>\n";
    out += "<text transform=\"translate(" + num(x + bw / 2) + "," + num(top + ph + 14) +
           ") rotate(30)\" font-size=\"11\">" + esc(bars[i].label) + "</text>\n";
  }
  return out + "</svg>\n";
}

std::vector<std::filesystem::path> plot_runs(const std::vector<std::filesystem::path>& run_dirs,
                                             const std::filesystem::path& out_dir) {
  if (run_dirs.empty()) throw MissingCurves("no run directories to plot");
  std::map<std::string, std::vector<LabeledCurves>> by_dataset;
  std::vector<LabeledTrace> traces;
  for (const auto& dir : run_dirs) {
    const RunPaths paths{dir};
    const auto label = std::filesystem::path(dir).lexically_normal().filename().string().empty()
                           ? std::filesystem::path(dir).lexically_normal().parent_path().filename().string()
                           : std::filesystem::path(dir).lexically_normal().filename().string();
    auto curves = read_curves(paths.curves());
    std::string dataset = "runs";
    if (std::filesystem::exists(paths.config())) {
      try {
        dataset = nlohmann::json::parse(read_text(paths.config())).at("dataset").at("name").get<std::string>();
      } catch (const nlohmann::json::exception&) {
      }
    }
    by_dataset[dataset].push_back({label, std::move(curves)});
    if (!std::filesystem::exists(paths.lr_trace())) throw MissingCurves("no lr_trace.csv in " + dir.string());
    traces.push_back({label, read_lr_trace(paths.lr_trace())});
  }
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [dataset, runs] : by_dataset) {
    const auto path = out_dir / ("curves_" + dataset + ".svg");
    atomic_write(path, render_svg(curves_figure("DICE and loss (" + dataset + ")", runs)));
    written.push_back(path);
  }
  const auto lr_path = out_dir / "lr_trace.svg";
  atomic_write(lr_path, render_svg(lr_figure("Learning rate", traces), 720, 320));
  written.push_back(lr_path);
  return written;
}

}  // namespace oarseg::plot
