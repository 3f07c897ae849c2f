#ifndef STVAE_SVG_PLOT_HPP
#define STVAE_SVG_PLOT_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace stvae::svg {

// Minimal self-contained SVG emitter; all figures the harness produces go
// through it, so reports have no plotting dependency.
class Canvas {
 public:
  Canvas(double width, double height);
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none", double stroke_width = 1.0);
  void line(double x1, double y1, double x2, double y2, const std::string& stroke,
            double width = 1.0);
  void circle(double cx, double cy, double r, const std::string& fill);
  void text(double x, double y, const std::string& s, double size = 11.0,
            const std::string& anchor = "start", const std::string& fill = "#222222");
  std::string str() const;
  void save(const std::string& path) const;

  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_, height_;
  std::string body_;
};

struct BoxStats {
  double lo = 0, q1 = 0, median = 0, q3 = 0, hi = 0;
  std::vector<double> outliers;
  int n = 0;
};
// Quartiles with interpolated percentiles; whiskers at the furthest points
// within 1.5 IQR of the box.
BoxStats box_stats(std::vector<double> values);

struct BoxGroup {
  std::string label;
  std::vector<double> values;
};
struct BoxPanel {
  std::string title;
  std::vector<BoxGroup> groups;
};

// Grid of boxplot panels (panel[r][c]); shared style, per-panel y scale.
void save_boxplot_grid(const std::string& path,
                       const std::vector<std::vector<BoxPanel>>& panels,
                       const std::string& title, const std::string& y_label);

// Correlation-style heatmap: blue (-1) .. white (0) .. red (+1); NaN gray.
void save_heatmap(const std::string& path, const Eigen::MatrixXd& matrix,
                  const std::string& title);

struct ScatterSeries {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;
};
void save_scatter(const std::string& path, const std::vector<ScatterSeries>& series,
                  const std::string& title, const std::string& x_label,
                  const std::string& y_label);

}  // namespace stvae::svg

#endif
