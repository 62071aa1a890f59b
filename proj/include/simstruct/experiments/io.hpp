#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "simstruct/core/errors.hpp"
#include "simstruct/experiments/phase.hpp"
#include "simstruct/experiments/sweeps.hpp"

namespace simstruct {

/// Header plus rows of text cells.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const Table&, const Table&) = default;

  std::size_t column(const std::string& name) const {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error("table has no column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

/// Shortest decimal text that reads back as the same double.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

}  // namespace detail

inline std::string to_csv(const Table& t) {
  std::string out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + detail::csv_cell(cells[i]);
    out += "\n";
  };
  line(t.header);
  for (const auto& r : t.rows) {
    if (r.size() != t.header.size()) throw Error("csv row width differs from header");
    line(r);
  }
  return out;
}

inline Table parse_csv(const std::string& text) {
  Table t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = detail::split_csv_line(line);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != t.header.size()) throw Error("csv row width differs from header");
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void emit_csv(const Table& t, const std::filesystem::path& path) {
  if (t.rows.empty()) throw Error("refusing to write an empty table to " + path.string());
  write_text(path, to_csv(t));
}

inline Table statdim_table(const std::vector<StatDimRow>& rows) {
  Table t{{"family", "n", "s", "r", "N", "mean", "stderr", "failures"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({r.family, std::to_string(r.n), std::to_string(r.s), std::to_string(r.r), std::to_string(r.N),
                      format_double(r.mean), format_double(r.std_error), std::to_string(r.failures)});
  return t;
}

inline std::vector<StatDimRow> statdim_rows(const Table& t) {
  std::vector<StatDimRow> out;
  for (const auto& c : t.rows)
    out.push_back({c[t.column("family")], std::stoll(c[t.column("n")]), std::stoll(c[t.column("s")]),
                   std::stoll(c[t.column("r")]), std::stoull(c[t.column("N")]), std::stod(c[t.column("mean")]),
                   std::stod(c[t.column("stderr")]), std::stoull(c[t.column("failures")])});
  return out;
}

inline Table phase_table(const std::vector<BinResult>& bins) {
  Table t{{"m", "s", "trials", "successes", "mean_rel_err", "mean_iters"}, {}};
  for (const auto& b : bins)
    t.rows.push_back({std::to_string(b.m), std::to_string(b.s), std::to_string(b.trials), std::to_string(b.successes),
                      format_double(b.mean_rel_err), format_double(b.mean_iters)});
  return t;
}

inline std::vector<BinResult> phase_bins(const Table& t) {
  std::vector<BinResult> out;
  for (const auto& c : t.rows) {
    BinResult b;
    b.m = std::stoll(c[t.column("m")]);
    b.s = std::stoll(c[t.column("s")]);
    b.trials = std::stoi(c[t.column("trials")]);
    b.successes = std::stoi(c[t.column("successes")]);
    b.mean_rel_err = std::stod(c[t.column("mean_rel_err")]);
    b.mean_iters = std::stod(c[t.column("mean_iters")]);
    out.push_back(b);
  }
  return out;
}

inline Table rip_table(const std::vector<RipRow>& rows) {
  Table t{{"m", "samples", "median_dev", "max_dev"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({std::to_string(r.m), std::to_string(r.samples), format_double(r.median_dev),
                      format_double(r.max_dev)});
  return t;
}

namespace detail {

inline std::string svg_header(int w, int h) {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) + "\" height=\"" +
         std::to_string(h) + "\" font-family=\"sans-serif\" font-size=\"11\">\n" +
         "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace detail

/// Mean statistical dimension against n, one polyline per family, with
/// +-1 standard error bars.
inline std::string statdim_svg(const std::vector<StatDimRow>& rows) {
  if (rows.empty()) throw Error("no rows to plot");
  const int W = 640, H = 420, L = 60, R = 140, T = 20, B = 50;
  double xmin = 1e300, xmax = -1e300, ymin = 0.0, ymax = -1e300;
  std::map<std::string, std::vector<const StatDimRow*>> series;
  std::vector<std::string> order;
  for (const auto& r : rows) {
    if (!series.count(r.family)) order.push_back(r.family);
    series[r.family].push_back(&r);
    xmin = std::min(xmin, static_cast<double>(r.n));
    xmax = std::max(xmax, static_cast<double>(r.n));
    ymax = std::max(ymax, r.mean + r.std_error);
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax <= ymin) ymax = ymin + 1;
  auto X = [&](double v) { return L + (W - L - R) * (v - xmin) / (xmax - xmin); };
  auto Y = [&](double v) { return H - B - (H - T - B) * (v - ymin) / (ymax - ymin); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
  std::string s = detail::svg_header(W, H);
  s += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(H - B) + "\" x2=\"" + detail::num(W - R) + "\" y2=\"" +
       detail::num(H - B) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + detail::num(L) + "\" y1=\"" + detail::num(T) + "\" x2=\"" + detail::num(L) + "\" y2=\"" +
       detail::num(H - B) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + detail::num((L + W - R) / 2.0) + "\" y=\"" + detail::num(H - 15) + "\">n</text>\n";
  s += "<text x=\"10\" y=\"" + detail::num(T + 10) + "\">statdim</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = ymin + (ymax - ymin) * k / 4.0;
    s += "<text x=\"5\" y=\"" + detail::num(Y(v) + 4) + "\">" + format_double(std::round(v * 10) / 10) + "</text>\n";
  }
  std::size_t ci = 0;
  for (const auto& name : order) {
    const char* col = colors[ci % 7];
    std::string pts;
    for (const auto* r : series[name]) {
      pts += detail::num(X(r->n)) + "," + detail::num(Y(r->mean)) + " ";
      s += "<line x1=\"" + detail::num(X(r->n)) + "\" y1=\"" + detail::num(Y(r->mean - r->std_error)) + "\" x2=\"" +
           detail::num(X(r->n)) + "\" y2=\"" + detail::num(Y(r->mean + r->std_error)) + "\" stroke=\"" + col + "\"/>\n";
      s += "<text x=\"" + detail::num(X(r->n) - 6) + "\" y=\"" + detail::num(H - B + 15) + "\">" + std::to_string(r->n) +
           "</text>\n";
    }
    s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" points=\"" + pts + "\"/>\n";
    s += "<text x=\"" + detail::num(W - R + 10) + "\" y=\"" + detail::num(T + 15 + 15.0 * ci) + "\" fill=\"" + col +
         "\">" + name + "</text>\n";
    ++ci;
  }
  return s + "</svg>\n";
}

/// Success-rate heatmap: one cell per (s, m) bin, s across and m upward.
inline std::string phase_svg(const std::vector<BinResult>& bins) {
  if (bins.empty()) throw Error("no bins to plot");
  std::vector<Index> ms, ss;
  for (const auto& b : bins) {
    ms.push_back(b.m);
    ss.push_back(b.s);
  }
  std::sort(ms.begin(), ms.end());
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  const int cell = 24, L = 60, T = 20;
  const int W = L + cell * static_cast<int>(ss.size()) + 20;
  const int H = T + cell * static_cast<int>(ms.size()) + 50;
  std::string s = detail::svg_header(W, H);
  for (const auto& b : bins) {
    const auto xi = std::find(ss.begin(), ss.end(), b.s) - ss.begin();
    const auto yi = std::find(ms.begin(), ms.end(), b.m) - ms.begin();
    const int shade = static_cast<int>(std::lround(255 * b.success_rate()));
    s += "<rect class=\"cell\" x=\"" + std::to_string(L + cell * xi) + "\" y=\"" +
         std::to_string(T + cell * (static_cast<long>(ms.size()) - 1 - yi)) + "\" width=\"" + std::to_string(cell) +
         "\" height=\"" + std::to_string(cell) + "\" fill=\"rgb(" + std::to_string(shade) + "," +
         std::to_string(shade) + "," + std::to_string(shade) + ")\"/>\n";
  }
  for (std::size_t i = 0; i < ms.size(); ++i)
    s += "<text x=\"5\" y=\"" + std::to_string(T + cell * (static_cast<int>(ms.size()) - 1 - static_cast<int>(i)) + 16) +
         "\">" + std::to_string(ms[i]) + "</text>\n";
  for (std::size_t i = 0; i < ss.size(); ++i)
    s += "<text x=\"" + std::to_string(L + cell * static_cast<int>(i) + 6) + "\" y=\"" +
         std::to_string(T + cell * static_cast<int>(ms.size()) + 15) + "\">" + std::to_string(ss[i]) + "</text>\n";
  s += "<text x=\"" + std::to_string(L) + "\" y=\"" + std::to_string(H - 8) + "\">s (across), m (up)</text>\n";
  return s + "</svg>\n";
}

/// Everything needed to rerun an experiment bit-identically.
struct RunManifest {
  std::string command;
  nlohmann::json config;
  std::uint64_t seed = 0;
  nlohmann::json solver;
  std::string version = "simstruct 1.0.0";
  unsigned threads = 1;
  double wall_seconds = 0.0;
  std::string started_at;

  nlohmann::json to_json() const {
    return {{"command", command}, {"config", config},   {"seed", seed},
            {"solver", solver},   {"version", version}, {"threads", threads},
            {"wall_seconds", wall_seconds}, {"started_at", started_at}};
  }
};

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void emit_manifest(const RunManifest& m, const std::filesystem::path& path) {
  write_text(path, m.to_json().dump(2) + "\n");
}

}  // namespace simstruct
