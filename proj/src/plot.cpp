#include "icfsim/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace icfsim {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (const char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("plot: missing CSV column '" + name + "'");
    return static_cast<int>(it - header.begin());
  }
};

CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (t.header.empty())
      t.header = split_csv_line(line);
    else
      t.rows.push_back(split_csv_line(line));
  }
  if (t.header.empty()) throw std::runtime_error("plot: CSV has no header row");
  return t;
}

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

// Minimal line chart: fixed frame, linear axes, five ticks per axis, legend
// in the top-left corner.
std::string render_svg(const std::vector<Series>& series, const std::string& x_label,
                       const std::string& y_label) {
  static const char* palette[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                                  "#d68910", "#16a085", "#7f8c8d", "#2c3e50"};
  const double width = 640, height = 480;
  const double left = 70, right = 20, top = 20, bottom = 55;

  double x_min = 1e300, x_max = -1e300, y_min = 1e300, y_max = -1e300;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y);
      y_max = std::max(y_max, y);
    }
  if (x_min > x_max) throw std::runtime_error("plot: no plottable points");
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  if (y_max == y_min) {
    y_min -= 0.5;
    y_max += 0.5;
  }
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return top + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << " " << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  svg << "<g stroke=\"#333\" stroke-width=\"1\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
      << "\" y2=\"" << top + plot_h << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
      << top + plot_h << "\"/>\n</g>\n";

  svg << "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\">\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x_min + (x_max - x_min) * i / 4.0;
    const double fy = y_min + (y_max - y_min) * i / 4.0;
    svg << "<text x=\"" << px(fx) - 10 << "\" y=\"" << top + plot_h + 18 << "\">" << fmt(fx)
        << "</text>\n";
    svg << "<text x=\"" << left - 45 << "\" y=\"" << py(fy) + 4 << "\">" << fmt(fy)
        << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 - 20 << "\" y=\"" << height - 12 << "\">" << x_label
      << "</text>\n";
  svg << "<text x=\"14\" y=\"" << top + plot_h / 2
      << "\" transform=\"rotate(-90 14 " << top + plot_h / 2 << ")\">" << y_label << "</text>\n";
  svg << "</g>\n";

  int color = 0;
  double legend_y = top + 14;
  for (const auto& s : series) {
    const char* stroke = s.dashed ? "#777777" : palette[color % 8];
    svg << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"1.5\"";
    if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
    svg << " points=\"";
    for (const auto& [x, y] : s.points) svg << px(x) << ',' << py(y) << ' ';
    svg << "\"/>\n";
    if (!s.dashed) {
      for (const auto& [x, y] : s.points)
        svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"2.5\" fill=\"" << stroke
            << "\"/>\n";
    }
    svg << "<text font-family=\"sans-serif\" font-size=\"12\" fill=\"" << stroke << "\" x=\""
        << left + 10 << "\" y=\"" << legend_y << "\">" << s.label << "</text>\n";
    legend_y += 15;
    if (!s.dashed) ++color;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

FigureKind figure_kind_from_name(const std::string& name) {
  if (name == "omega-phi") return FigureKind::OmegaPhi;
  if (name == "auc-phi") return FigureKind::AucPhi;
  if (name == "omega1-f1") return FigureKind::Omega1F1;
  throw std::runtime_error("plot: unknown figure kind '" + name +
                           "' (expected omega-phi, auc-phi or omega1-f1)");
}

std::string render_plot(const std::string& csv_text, FigureKind kind) {
  const CsvTable t = parse_csv(csv_text);
  const int c_phi = t.column("phi");
  const int c_g = t.column("G");
  const int c_k = t.column("k");
  const int c_f1 = t.column("f1");
  const int c_b = t.column("b");
  const int c_sim = t.column("similarity");
  const int c_inst = t.column("instance");
  const int c_omega = t.column("omega");
  const int c_omega1 = t.column("omega1");
  const int c_real = t.column("auc_real");
  const int c_est = t.column("auc_est");

  auto series_key = [&](const std::vector<std::string>& row, bool with_f1) {
    std::string key = row[c_sim] + " G=" + row[c_g] + " k=" + row[c_k];
    if (row[c_b] != "1") key += " b=" + row[c_b];
    if (with_f1 && !row[c_f1].empty()) key += " f1=" + row[c_f1];
    return key;
  };

  std::map<std::string, Series> by_key;
  auto feed = [&](const std::string& key, const std::string& label, double x,
                  const std::string& y_text) {
    if (y_text.empty()) return;
    auto& s = by_key[key];
    s.label = label;
    s.points.emplace_back(x, std::stod(y_text));
  };

  for (const auto& row : t.rows) {
    if (row[c_inst] != "mean") continue;
    switch (kind) {
      case FigureKind::OmegaPhi: {
        const std::string key = series_key(row, true);
        feed(key, key, std::stod(row[c_phi]), row[c_omega]);
        break;
      }
      case FigureKind::AucPhi: {
        const std::string key = series_key(row, false);
        feed(key + "|real", key + " real", std::stod(row[c_phi]), row[c_real]);
        feed(key + "|est", key + " est", std::stod(row[c_phi]), row[c_est]);
        break;
      }
      case FigureKind::Omega1F1: {
        if (row[c_f1].empty()) continue;
        const std::string key = series_key(row, false);
        feed(key, key, std::stod(row[c_f1]), row[c_omega1]);
        break;
      }
    }
  }
  if (by_key.empty()) throw std::runtime_error("plot: no aggregate rows to plot");

  std::vector<Series> series;
  for (auto& [_, s] : by_key) {
    std::sort(s.points.begin(), s.points.end());
    series.push_back(std::move(s));
  }
  if (kind == FigureKind::Omega1F1) {
    Series diag;
    diag.label = "share = f1";
    diag.dashed = true;
    double lo = 1e300, hi = -1e300;
    for (const auto& s : series)
      for (const auto& [x, _] : s.points) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
      }
    diag.points = {{lo, lo}, {hi, hi}};
    series.push_back(std::move(diag));
  }

  const char* x_label = kind == FigureKind::Omega1F1 ? "f1" : "phi";
  const char* y_label = kind == FigureKind::OmegaPhi   ? "omega"
                        : kind == FigureKind::AucPhi   ? "AUC"
                                                       : "taste-1 share";
  return render_svg(series, x_label, y_label);
}

void render_plot_file(const std::string& csv_path, FigureKind kind, const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) throw std::runtime_error("plot: cannot open " + csv_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string svg = render_plot(buf.str(), kind);
  std::ofstream out(out_path);
  if (!out) throw std::runtime_error("plot: cannot write " + out_path);
  out << svg;
}

}  // namespace icfsim
