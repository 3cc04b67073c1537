#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>
#include <vector>

#include "daaf/errors.hpp"
#include "daaf/harness.hpp"

namespace daaf {

// ---------------------------------------------------------------------------
// CSV (RFC 4180: CRLF records, fields quoted when they contain , " CR or LF)

namespace csv {

inline std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw IoError("malformed number '" + std::string(text) + "' in CSV");
  return value;
}

inline std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw IoError("malformed integer '" + std::string(text) + "' in CSV");
  return value;
}

inline std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  template <class... Fields>
  void row(const Fields&... fields) {
    bool first = true;
    (write_field(fields, first), ...);
    out_ << "\r\n";
  }

 private:
  template <class T>
  void write_field(const T& value, bool& first) {
    if (!first) out_ << ',';
    first = false;
    if constexpr (std::is_floating_point_v<T>) {
      out_ << format_double(value);
    } else if constexpr (std::is_integral_v<T>) {
      out_ << value;
    } else {
      out_ << quote(value);
    }
  }

  std::ostream& out_;
};

/// Parses RFC 4180 text (LF-only line endings are accepted too).
inline std::vector<std::vector<std::string>> parse(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        break;
      case '\n':
        row.push_back(std::move(field));
        field.clear();
        rows.push_back(std::move(row));
        row.clear();
        field_started = false;
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (quoted) throw IoError("unterminated quoted CSV field");
  if (field_started || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace csv

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return std::string(std::istreambuf_iterator<char>(in), {});
}

namespace detail {

inline std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace detail

inline void write_trajectories_csv(const ExperimentSummary& summary, std::ostream& out) {
  csv::Writer w(out);
  w.row(std::string("policy"), std::string("replication"), std::string("t"),
        std::string("cum_regret"));
  for (const PolicySummary& p : summary.policies) {
    for (std::size_t r = 0; r < p.trajectories.size(); ++r) {
      for (const Checkpoint& c : p.trajectories[r].checkpoints) w.row(p.name, r, c.t, c.regret);
    }
  }
}

inline void write_summary_csv(const ExperimentSummary& summary, std::ostream& out) {
  csv::Writer w(out);
  w.row(std::string("policy"), std::string("t"), std::string("mean"), std::string("stderr"));
  for (const PolicySummary& p : summary.policies) {
    for (std::size_t i = 0; i < p.t.size(); ++i) w.row(p.name, p.t[i], p.mean[i], p.std_error[i]);
  }
}

inline void write_ratios_csv(const ExperimentSummary& summary, std::ostream& out) {
  csv::Writer w(out);
  w.row(std::string("numerator"), std::string("denominator"), std::string("t"),
        std::string("ratio"));
  for (const RatioSeries& s : summary.ratios) {
    for (const RatioPoint& pt : s.points) w.row(s.numerator, s.denominator, pt.t, pt.ratio);
  }
}

inline void write_sweep_csv(const SweepResult& sweep, std::ostream& out) {
  csv::Writer w(out);
  w.row(std::string("policy"), std::string("location"), std::string("mean_delay"),
        std::string("final_mean"), std::string("final_stderr"), std::string("ratio"));
  for (const SweepRow& r : sweep.rows)
    w.row(r.policy, r.location, r.mean_delay, r.final_mean, r.final_std_error, r.ratio);
}

/// Reads summary.csv back into per-policy (t, mean, stderr) series, in order of
/// first appearance.
inline std::vector<PolicySummary> parse_summary_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty() || rows.front() != std::vector<std::string>{"policy", "t", "mean", "stderr"})
    throw IoError("summary CSV header must be policy,t,mean,stderr");
  std::vector<PolicySummary> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() != 4) throw IoError("summary CSV row " + std::to_string(i) + " needs 4 fields");
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const PolicySummary& p) { return p.name == row[0]; });
    if (it == out.end()) {
      out.emplace_back();
      out.back().name = row[0];
      it = std::prev(out.end());
    }
    it->t.push_back(csv::parse_int(row[1]));
    it->mean.push_back(csv::parse_double(row[2]));
    it->std_error.push_back(csv::parse_double(row[3]));
  }
  for (PolicySummary& p : out) p.final_mean = p.mean.empty() ? 0.0 : p.mean.back();
  return out;
}

// ---------------------------------------------------------------------------
// SVG line plots

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

namespace detail {

inline std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
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

inline std::string tick_label(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace detail

/// Static line chart with axes, five ticks per axis and a legend.
inline std::string render_line_plot(std::string_view title, std::string_view x_label,
                                    std::string_view y_label,
                                    const std::vector<PlotSeries>& series) {
  constexpr double kWidth = 720, kHeight = 440;
  constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 60;
  static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};
  double x_min = HUGE_VAL, x_max = -HUGE_VAL, y_min = HUGE_VAL, y_max = -HUGE_VAL;
  for (const PlotSeries& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
  }
  if (x_min > x_max) x_min = 0, x_max = 1, y_min = 0, y_max = 1;
  y_min = std::min(y_min, 0.0);
  if (x_max == x_min) x_max = x_min + 1;
  if (y_max == y_min) y_max = y_min + 1;

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + plot_h - (y - y_min) / (y_max - y_min) * plot_h; };

  std::ostringstream svg;
  svg.precision(6);
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << detail::xml_escape(title) << "</text>\n"
      << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\""
      << plot_h << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 4.0;
    const double yv = y_min + (y_max - y_min) * i / 4.0;
    svg << "<text x=\"" << px(xv) << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::tick_label(xv) << "</text>\n"
        << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << detail::tick_label(yv) << "</text>\n"
        << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << py(yv)
        << "\" y2=\"" << py(yv) << "\" stroke=\"#dddddd\"/>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << detail::xml_escape(x_label) << "</text>\n"
      << "<text x=\"18\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 18 "
      << kTop + plot_h / 2 << ")\">" << detail::xml_escape(y_label) << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kColors[k % std::size(kColors)];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      svg << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
    }
    svg << "\"/>\n";
    const double ly = kTop + 14 + 18.0 * static_cast<double>(k);
    svg << "<line x1=\"" << kWidth - kRight + 12 << "\" x2=\"" << kWidth - kRight + 32
        << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kRight + 38 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(s.name)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  auto out = detail::open_for_write(path);
  out << text;
  detail::finish(out, path);
}

inline std::vector<PlotSeries> regret_plot_series(const std::vector<PolicySummary>& policies) {
  std::vector<PlotSeries> out;
  for (const PolicySummary& p : policies) {
    PlotSeries s{p.name, {}, p.mean};
    for (std::int64_t t : p.t) s.x.push_back(static_cast<double>(t));
    out.push_back(std::move(s));
  }
  return out;
}

/// Writes trajectories.csv, summary.csv, ratios.csv, plot.svg (mean regret of
/// every policy), ratio_<k>.svg per ratio pair and metadata.json.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentSummary& summary,
                                                        const std::filesystem::path& dir) {
  detail::ensure_writable_dir(dir.string());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const std::string& name, auto&& writer) {
    const auto path = dir / name;
    auto out = detail::open_for_write(path);
    writer(out);
    detail::finish(out, path);
    written.push_back(path);
  };
  emit("trajectories.csv", [&](std::ostream& o) { write_trajectories_csv(summary, o); });
  emit("summary.csv", [&](std::ostream& o) { write_summary_csv(summary, o); });
  emit("ratios.csv", [&](std::ostream& o) { write_ratios_csv(summary, o); });
  emit("plot.svg", [&](std::ostream& o) {
    o << render_line_plot("Mean cumulative pseudo-regret", "round t", "regret",
                          regret_plot_series(summary.policies));
  });
  for (std::size_t k = 0; k < summary.ratios.size(); ++k) {
    const RatioSeries& r = summary.ratios[k];
    PlotSeries s{r.numerator + " / " + r.denominator, {}, {}};
    for (const RatioPoint& pt : r.points) {
      s.x.push_back(static_cast<double>(pt.t));
      s.y.push_back(pt.ratio);
    }
    emit("ratio_" + std::to_string(k) + ".svg", [&](std::ostream& o) {
      o << render_line_plot("Regret ratio", "round t", "ratio", {s});
    });
  }
  emit("metadata.json", [&](std::ostream& o) {
    o << "{\"config_hash\": \"" << summary.config_hash
      << "\", \"wall_seconds\": " << csv::format_double(summary.wall_seconds) << "}\n";
  });
  return written;
}

inline std::vector<std::filesystem::path> write_sweep_outputs(const SweepResult& sweep,
                                                              const std::filesystem::path& dir) {
  detail::ensure_writable_dir(dir.string());
  const auto csv_path = dir / "sweep.csv";
  {
    auto out = detail::open_for_write(csv_path);
    write_sweep_csv(sweep, out);
    detail::finish(out, csv_path);
  }
  std::vector<PlotSeries> series;
  for (const SweepRow& row : sweep.rows) {
    if (series.empty() || series.back().name != row.policy) series.push_back({row.policy, {}, {}});
    series.back().x.push_back(row.location);
    series.back().y.push_back(row.ratio);
  }
  const auto svg_path = dir / "sweep.svg";
  write_text_file(svg_path, render_line_plot("Final regret relative to the smallest location",
                                             "delay location", "relative regret", series));
  return {csv_path, svg_path};
}

}  // namespace daaf
