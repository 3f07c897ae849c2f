#include "stvae/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stvae::svg {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

double percentile(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  double pos = p * (sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

const char* kPalette[] = {"#4878cf", "#ee854a", "#6acc64", "#d65f5f",
                          "#956cb4", "#8c613c", "#dc7ec0", "#797979"};

}  // namespace

Canvas::Canvas(double width, double height) : width_(width), height_(height) {}

void Canvas::rect(double x, double y, double w, double h, const std::string& fill,
                  const std::string& stroke, double stroke_width) {
  body_ += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) + "\" height=\"" +
           num(h) + "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
           num(stroke_width) + "\"/>\n";
}

void Canvas::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                  double width) {
  body_ += "<line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) + "\" y2=\"" +
           num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" + num(width) + "\"/>\n";
}

void Canvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx=\"" + num(cx) + "\" cy=\"" + num(cy) + "\" r=\"" + num(r) + "\" fill=\"" +
           fill + "\"/>\n";
}

void Canvas::text(double x, double y, const std::string& s, double size,
                  const std::string& anchor, const std::string& fill) {
  body_ += "<text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" + num(size) +
           "\" font-family=\"sans-serif\" text-anchor=\"" + anchor + "\" fill=\"" + fill + "\">" +
           escape(s) + "</text>\n";
}

std::string Canvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" +
         num(height_) + "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" + body_ + "</svg>\n";
}

void Canvas::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open SVG for writing: " + path);
  f << str();
  if (!f) throw std::runtime_error("failed writing SVG: " + path);
}

BoxStats box_stats(std::vector<double> values) {
  values.erase(std::remove_if(values.begin(), values.end(),
                              [](double v) { return !std::isfinite(v); }),
               values.end());
  BoxStats s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  s.q1 = percentile(values, 0.25);
  s.median = percentile(values, 0.5);
  s.q3 = percentile(values, 0.75);
  double iqr = s.q3 - s.q1;
  double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
  s.lo = values.back();
  s.hi = values.front();
  for (double v : values) {
    if (v >= lo_fence && v < s.lo) s.lo = v;
    if (v <= hi_fence && v > s.hi) s.hi = v;
    if (v < lo_fence || v > hi_fence) s.outliers.push_back(v);
  }
  return s;
}

void save_boxplot_grid(const std::string& path,
                       const std::vector<std::vector<BoxPanel>>& panels, const std::string& title,
                       const std::string& y_label) {
  if (panels.empty() || panels[0].empty()) throw std::invalid_argument("boxplot grid: no panels");
  const int nrows = static_cast<int>(panels.size());
  const int ncols = static_cast<int>(panels[0].size());
  const double pw = 300, ph = 220, margin = 55, top = 40;
  Canvas cv(margin + ncols * pw + 20, top + nrows * ph + 30);
  cv.text(cv.width() / 2, 20, title, 14, "middle");
  cv.text(12, top + nrows * ph / 2.0, y_label, 12, "middle");

  for (int r = 0; r < nrows; ++r) {
    for (int c = 0; c < ncols; ++c) {
      const BoxPanel& panel = panels[r][c];
      double x0 = margin + c * pw, y0 = top + r * ph;
      double plot_w = pw - 40, plot_h = ph - 60;
      cv.rect(x0, y0 + 20, plot_w, plot_h, "none", "#888888", 0.8);
      cv.text(x0 + plot_w / 2, y0 + 14, panel.title, 11, "middle");

      // y scale over whisker spans of all groups
      double lo = 1e300, hi = -1e300;
      std::vector<BoxStats> stats;
      for (const auto& g : panel.groups) {
        BoxStats s = box_stats(g.values);
        stats.push_back(s);
        if (s.n > 0) {
          lo = std::min(lo, s.lo);
          hi = std::max(hi, s.hi);
        }
      }
      if (lo > hi) {
        lo = 0;
        hi = 1;
      }
      if (hi - lo < 1e-12) hi = lo + 1.0;
      double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
      auto ymap = [&](double v) { return y0 + 20 + plot_h * (1.0 - (v - lo) / (hi - lo)); };

      cv.text(x0 - 4, ymap(lo) + 4, num(lo), 9, "end");
      cv.text(x0 - 4, ymap(hi) + 4, num(hi), 9, "end");

      const int k = static_cast<int>(panel.groups.size());
      double slot = plot_w / std::max(1, k);
      for (int g = 0; g < k; ++g) {
        const BoxStats& s = stats[g];
        double cx = x0 + slot * (g + 0.5);
        double bw = slot * 0.5;
        const std::string color = kPalette[g % 8];
        if (s.n > 0) {
          cv.line(cx, ymap(s.lo), cx, ymap(s.q1), "#555555", 1.0);
          cv.line(cx, ymap(s.q3), cx, ymap(s.hi), "#555555", 1.0);
          cv.line(cx - bw / 4, ymap(s.lo), cx + bw / 4, ymap(s.lo), "#555555", 1.0);
          cv.line(cx - bw / 4, ymap(s.hi), cx + bw / 4, ymap(s.hi), "#555555", 1.0);
          cv.rect(cx - bw / 2, ymap(s.q3), bw, std::max(0.5, ymap(s.q1) - ymap(s.q3)), color,
                  "#333333", 0.8);
          cv.line(cx - bw / 2, ymap(s.median), cx + bw / 2, ymap(s.median), "#111111", 1.4);
          for (double o : s.outliers) {
            double oy = std::clamp(ymap(o), y0 + 16.0, y0 + 20.0 + plot_h + 4.0);
            cv.circle(cx, oy, 1.6, "#999999");
          }
        } else {
          cv.text(cx, y0 + 20 + plot_h / 2, "empty", 9, "middle", "#aa4444");
        }
        cv.text(cx, y0 + 20 + plot_h + 12, panel.groups[g].label, 9, "middle");
      }
    }
  }
  cv.save(path);
}

void save_heatmap(const std::string& path, const Eigen::MatrixXd& matrix,
                  const std::string& title) {
  const int n = static_cast<int>(matrix.rows());
  const int m = static_cast<int>(matrix.cols());
  const double cell = std::max(3.0, std::min(14.0, 560.0 / std::max(n, m)));
  const double margin = 40, top = 36;
  Canvas cv(margin + m * cell + 60, top + n * cell + 20);
  cv.text(cv.width() / 2, 20, title, 13, "middle");
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      double v = matrix(i, j);
      std::string fill;
      if (std::isnan(v)) {
        fill = "#bbbbbb";
      } else {
        double u = std::clamp(v, -1.0, 1.0);
        int r, g, b;
        if (u >= 0) {  // white -> red
          r = 255;
          g = b = static_cast<int>(255 * (1.0 - u));
        } else {  // white -> blue
          b = 255;
          r = g = static_cast<int>(255 * (1.0 + u));
        }
        char buf[8];
        std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
        fill = buf;
      }
      cv.rect(margin + j * cell, top + i * cell, cell, cell, fill);
    }
  }
  // color legend
  double lx = margin + m * cell + 14;
  for (int s = 0; s <= 40; ++s) {
    double u = 1.0 - s / 20.0;
    int r, g, b;
    if (u >= 0) {
      r = 255;
      g = b = static_cast<int>(255 * (1.0 - u));
    } else {
      b = 255;
      r = g = static_cast<int>(255 * (1.0 + u));
    }
    char buf[8];
    std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", r, g, b);
    cv.rect(lx, top + s * (n * cell / 41.0), 12, n * cell / 41.0 + 0.5, buf);
  }
  cv.text(lx + 16, top + 8, "+1", 9);
  cv.text(lx + 16, top + n * cell, "-1", 9);
  cv.save(path);
}

void save_scatter(const std::string& path, const std::vector<ScatterSeries>& series,
                  const std::string& title, const std::string& x_label,
                  const std::string& y_label) {
  double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
  for (const auto& s : series) {
    for (auto [x, y] : s.points) {
      xlo = std::min(xlo, x);
      xhi = std::max(xhi, x);
      ylo = std::min(ylo, y);
      yhi = std::max(yhi, y);
    }
  }
  if (xlo > xhi) {
    xlo = ylo = 0;
    xhi = yhi = 1;
  }
  if (xhi - xlo < 1e-12) xhi = xlo + 1;
  if (yhi - ylo < 1e-12) yhi = ylo + 1;
  double padx = 0.06 * (xhi - xlo), pady = 0.06 * (yhi - ylo);
  xlo -= padx;
  xhi += padx;
  ylo -= pady;
  yhi += pady;

  const double w = 520, h = 420, ml = 60, mt = 40;
  Canvas cv(ml + w + 140, mt + h + 50);
  cv.text((ml + w) / 2, 20, title, 13, "middle");
  cv.rect(ml, mt, w, h, "none", "#888888", 0.8);
  cv.text(ml + w / 2, mt + h + 32, x_label, 11, "middle");
  cv.text(16, mt + h / 2, y_label, 11, "middle");
  auto xmap = [&](double v) { return ml + w * (v - xlo) / (xhi - xlo); };
  auto ymap = [&](double v) { return mt + h * (1.0 - (v - ylo) / (yhi - ylo)); };
  cv.text(ml, mt + h + 14, num(xlo), 9, "middle");
  cv.text(ml + w, mt + h + 14, num(xhi), 9, "middle");
  cv.text(ml - 6, ymap(ylo) + 3, num(ylo), 9, "end");
  cv.text(ml - 6, ymap(yhi) + 3, num(yhi), 9, "end");

  double ly = mt + 10;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string color = s.color.empty() ? kPalette[si % 8] : s.color;
    for (auto [x, y] : s.points) cv.circle(xmap(x), ymap(y), 2.2, color);
    cv.circle(ml + w + 18, ly - 3, 3.5, color);
    cv.text(ml + w + 28, ly, s.label, 10);
    ly += 16;
  }
  cv.save(path);
}

}  // namespace stvae::svg
