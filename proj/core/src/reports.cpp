// Copyright 2026 The eevact Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eevact/reports.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "eevact/error.hpp"

namespace eevact {
namespace {

namespace fs = std::filesystem;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr const char* kDashes[] = {"", "6,3", "2,2", "8,3,2,3"};

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string file_stem(const std::string& label, std::size_t index) {
  std::string out;
  for (char c : label) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
  if (out.empty()) out = std::to_string(index);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

struct Series {
  std::string name;
  std::vector<double> x, y;
  std::size_t color = 0, dash = 0;
};

// Round-ish upper bound for an axis.
double nice_max(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (m * p >= v) return m * p;
  }
  return 10.0 * p;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

std::string line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                      const std::vector<Series>& series) {
  const double w = 720, h = 440, left = 70, right = 190, top = 40, bottom = 60;
  const double pw = w - left - right, ph = h - top - bottom;
  double xmax = 0.0;
  for (const auto& s : series) {
    for (double x : s.x) xmax = std::max(xmax, x);
  }
  xmax = nice_max(xmax);
  auto px = [&](double x) { return left + pw * x / xmax; };
  auto py = [&](double y) { return top + ph * (1.0 - y); };

  std::ostringstream o;
  o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
    << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\" viewBox=\"0 0 " << w
    << ' ' << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "  <rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
    << "  <text x=\"" << left + pw / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << xml_escape(title)
    << "</text>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = xmax * i / 5.0, fy = i / 5.0;
    o << "  <line x1=\"" << px(fx) << "\" y1=\"" << top << "\" x2=\"" << px(fx) << "\" y2=\"" << top + ph
      << "\" stroke=\"#e0e0e0\"/>\n"
      << "  <line x1=\"" << left << "\" y1=\"" << py(fy) << "\" x2=\"" << left + pw << "\" y2=\"" << py(fy)
      << "\" stroke=\"#e0e0e0\"/>\n"
      << "  <text x=\"" << px(fx) << "\" y=\"" << top + ph + 18 << "\" text-anchor=\"middle\">" << tick_label(fx)
      << "</text>\n"
      << "  <text x=\"" << left - 8 << "\" y=\"" << py(fy) + 4 << "\" text-anchor=\"end\">" << tick_label(fy)
      << "</text>\n";
  }
  o << "  <rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
    << "\" fill=\"none\" stroke=\"black\"/>\n"
    << "  <text x=\"" << left + pw / 2 << "\" y=\"" << h - 18 << "\" text-anchor=\"middle\">" << xml_escape(xlabel)
    << "</text>\n"
    << "  <text x=\"18\" y=\"" << top + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << top + ph / 2 << ")\">" << xml_escape(ylabel) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const Series& s = series[i];
    const char* color = kPalette[s.color % std::size(kPalette)];
    const char* dash = kDashes[s.dash % std::size(kDashes)];
    o << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (*dash != '\0') o << " stroke-dasharray=\"" << dash << '"';
    o << " points=\"";
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      if (j > 0) o << ' ';
      o << fmt_fixed(px(s.x[j]), 2) << ',' << fmt_fixed(py(std::clamp(s.y[j], 0.0, 1.0)), 2);
    }
    o << "\"/>\n";
    const double ly = top + 12 + 18.0 * static_cast<double>(i);
    o << "  <line x1=\"" << left + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 36 << "\" y2=\"" << ly
      << "\" stroke=\"" << color << "\" stroke-width=\"1.8\"";
    if (*dash != '\0') o << " stroke-dasharray=\"" << dash << '"';
    o << "/>\n  <text x=\"" << left + pw + 42 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.name) << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string curve_name(const EvalCurve& c, std::size_t index) {
  return c.label.empty() ? "model " + std::to_string(index + 1) : c.label;
}

std::vector<Series> accuracy_series(std::span<const EvalCurve> curves, bool synops_axis) {
  std::vector<Series> out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const EvalCurve& c = curves[i];
    std::vector<double> x = c.times_s;
    if (synops_axis) {
      for (std::size_t t = 0; t < x.size(); ++t) x[t] = c.macs_g[t] + c.acs_g[t];
    }
    // A lone curve shows every k; comparisons show Top-1 only.
    for (std::size_t j = 0; j < c.ks.size(); ++j) {
      if (curves.size() > 1 && c.ks[j] != c.ks.front()) continue;
      Series s;
      s.name = curves.size() > 1 ? curve_name(c, i) : "Top-" + std::to_string(c.ks[j]);
      if (curves.size() > 1 && c.ks[j] != 1) s.name += " (Top-" + std::to_string(c.ks[j]) + ")";
      s.x = x;
      s.y = c.topk[j];
      s.color = curves.size() > 1 ? i : j;
      s.dash = curves.size() > 1 ? 0 : j;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

void write_curve_csv(const EvalCurve& curve, const fs::path& path) {
  curve.validate();
  std::string text = "time_s";
  for (int k : curve.ks) text += ",top" + std::to_string(k);
  text += ",macs_g,acs_g\n";
  for (std::size_t t = 0; t < curve.times_s.size(); ++t) {
    text += fmt_double(curve.times_s[t]);
    for (const auto& series : curve.topk) text += "," + fmt_double(series[t]);
    text += "," + fmt_double(curve.macs_g[t]) + "," + fmt_double(curve.acs_g[t]) + "\n";
  }
  write_text(path, text);
}

EvalCurve read_curve_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError("'" + path.string() + "' is empty");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.size() < 3 || header.front() != "time_s" || header[header.size() - 2] != "macs_g" ||
      header.back() != "acs_g") {
    throw FormatError("'" + path.string() + "' does not have a curve header");
  }
  EvalCurve c;
  for (std::size_t j = 1; j + 2 < header.size(); ++j) {
    int k = 0;
    const std::string& h = header[j];
    const auto [end, ec] = std::from_chars(h.data() + std::min<std::size_t>(3, h.size()), h.data() + h.size(), k);
    if (h.rfind("top", 0) != 0 || ec != std::errc() || end != h.data() + h.size() || k < 1) {
      throw FormatError("unexpected column '" + h + "'");
    }
    c.ks.push_back(k);
  }
  c.topk.assign(c.ks.size(), {});
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      double v = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || end != cell.data() + cell.size()) throw FormatError("bad number '" + cell + "'");
      row.push_back(v);
    }
    if (row.size() != header.size()) throw FormatError("row with " + std::to_string(row.size()) + " cells");
    c.times_s.push_back(row.front());
    for (std::size_t j = 0; j < c.ks.size(); ++j) c.topk[j].push_back(row[j + 1]);
    c.macs_g.push_back(row[row.size() - 2]);
    c.acs_g.push_back(row.back());
  }
  if (c.times_s.size() >= 2) c.delta_t_s = c.times_s[1] - c.times_s[0];
  if (c.times_s.size() == 1) c.delta_t_s = c.times_s[0];
  return c;
}

std::string render_table(std::span<const EvalCurve> curves, std::span<const double> table_times) {
  std::ostringstream o;
  o << "| Model | Params (M) | Metric |";
  for (double t : table_times) o << ' ' << tick_label(t) << "s |";
  o << " MACs (G) | ACs (G) |\n|---|---|---|";
  for (std::size_t i = 0; i < table_times.size(); ++i) o << "---|";
  o << "---|---|\n";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const EvalCurve& c = curves[i];
    const double horizon = c.times_s.empty() ? 0.0 : c.times_s.back();
    const double last_time = table_times.empty() ? horizon : *std::max_element(table_times.begin(), table_times.end());
    const std::size_t synops_at = c.index_at(std::min(last_time, horizon));
    for (int k : {1, 5}) {
      const auto it = std::find(c.ks.begin(), c.ks.end(), k);
      if (it == c.ks.end()) continue;
      const auto& acc = c.topk[static_cast<std::size_t>(it - c.ks.begin())];
      o << "| " << curve_name(c, i) << " | " << fmt_fixed(static_cast<double>(c.parameters) * 1e-6, 3) << " | Top-"
        << k << " |";
      for (double t : table_times) {
        if (t > horizon + 0.5 * c.delta_t_s) {
          o << " n/a |";
        } else {
          o << ' ' << fmt_fixed(100.0 * acc[c.index_at(t)], 1) << " |";
        }
      }
      o << ' ' << fmt_fixed(c.macs_g[synops_at], 4) << " | " << fmt_fixed(c.acs_g[synops_at], 4) << " |\n";
    }
  }
  o << "\nAccuracies in %. SynOps are effective operations per sample, cumulative up to the last column time.\n";
  return o.str();
}

std::string render_time_plot(std::span<const EvalCurve> curves) {
  return line_plot("Accuracy over observation time", "observation time (s)", "accuracy",
                   accuracy_series(curves, false));
}

std::string render_synops_plot(std::span<const EvalCurve> curves) {
  return line_plot("Accuracy over effective SynOps", "cumulative SynOps per sample (G)", "accuracy",
                   accuracy_series(curves, true));
}

ReportFiles emit_reports(std::span<const EvalCurve> curves, const fs::path& out_dir,
                         std::span<const double> table_times) {
  if (curves.empty()) throw ArgumentError("emit_reports: no curves");
  for (const auto& c : curves) c.validate();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create report directory '" + out_dir.string() + "'");
  ReportFiles files;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const fs::path p = curves.size() == 1
                           ? out_dir / "curve.csv"
                           : out_dir / ("curve_" + std::to_string(i + 1) + "_" + file_stem(curves[i].label, i) + ".csv");
    write_curve_csv(curves[i], p);
    files.csv.push_back(p);
  }
  files.time_plot = out_dir / "accuracy_over_time.svg";
  files.synops_plot = out_dir / "accuracy_over_synops.svg";
  files.table = out_dir / "table.md";
  write_text(files.time_plot, render_time_plot(curves));
  write_text(files.synops_plot, render_synops_plot(curves));
  write_text(files.table, render_table(curves, table_times));
  return files;
}

}  // namespace eevact
