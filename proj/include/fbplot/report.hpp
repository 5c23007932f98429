#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fbplot/curve.hpp"
#include "fbplot/errors.hpp"
#include "fbplot/stats.hpp"
#include "fbplot/strfmt.hpp"

namespace fbplot {

enum class EvalMode { hold_out, cross_validation };

inline std::string_view to_string(EvalMode mode) {
  return mode == EvalMode::hold_out ? "hold-out" : "cross-validation";
}

// Complete analysis output for one classifier pool. `pool` carries the raw
// per-fold estimates for the scatter panel; the machine-readable reports
// only use the remaining fields.
struct ReportDocument {
  BetaGrid grid;
  std::vector<ClassifierRecord> pool;
  std::vector<CurveSummary> curves;
  std::vector<CrossoverPoint> crossovers;
  std::vector<Segment> segments;
  std::vector<std::pair<double, double>> significance_runs;
  double alpha = 0.05;
  EvalMode mode = EvalMode::hold_out;
};

namespace detail {

// Pairwise crossovers skipping pairs for which the closed form is undefined
// (identical estimates or zero components); used when assembling a report
// from arbitrary pools. all_crossovers keeps the strict error contract.
inline std::vector<CrossoverPoint> collect_crossovers(
    const std::vector<ClassifierRecord>& pool) {
  std::vector<CrossoverPoint> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      const PointEstimate& a = pool[i].folds[0];
      const PointEstimate& b = pool[j].folds[0];
      if (a == b) continue;
      if (a.ppv <= 0.0 || a.tpr <= 0.0 || b.ppv <= 0.0 || b.tpr <= 0.0)
        continue;
      const auto beta = crossover_beta(a, b);
      if (!beta) continue;
      const bool swap = pool[j].name < pool[i].name;
      out.push_back({swap ? pool[j].name : pool[i].name,
                     swap ? pool[i].name : pool[j].name, *beta});
    }
  }
  std::sort(out.begin(), out.end(),
            [](const CrossoverPoint& x, const CrossoverPoint& y) {
              if (x.beta != y.beta) return x.beta < y.beta;
              if (x.name_a != y.name_a) return x.name_a < y.name_a;
              return x.name_b < y.name_b;
            });
  return out;
}

}  // namespace detail

// Runs the full pipeline: curves, dominance partition, crossovers (hold-out)
// or significance analysis (cross-validation).
inline ReportDocument analyze(std::vector<ClassifierRecord> pool,
                              const BetaGrid& grid, double alpha = 0.05,
                              bool bonferroni = false) {
  detail::validate_pool(pool);
  std::sort(pool.begin(), pool.end(),
            [](const ClassifierRecord& a, const ClassifierRecord& b) {
              return a.name < b.name;
            });

  ReportDocument doc;
  doc.grid = grid;
  doc.alpha = alpha;
  doc.curves.reserve(pool.size());
  for (const auto& rec : pool) doc.curves.push_back(evaluate_curve(rec, grid));
  doc.segments = dominance_partition(pool, grid);

  if (pool[0].hold_out()) {
    doc.mode = EvalMode::hold_out;
    doc.crossovers = detail::collect_crossovers(pool);
  } else {
    doc.mode = EvalMode::cross_validation;
    SignificanceResult sig =
        significance_mask(pool, grid, std::move(doc.segments), alpha,
                          bonferroni);
    doc.segments = std::move(sig.segments);
    doc.significance_runs = std::move(sig.runs);
  }
  doc.pool = std::move(pool);
  return doc;
}

// --- machine-readable reports ------------------------------------------------

inline std::string emit_segments_json(const ReportDocument& doc) {
  using detail::fmt_g9;
  using detail::json_escape;
  std::string out = "{\n";
  out += "  \"mode\": \"" + std::string(to_string(doc.mode)) + "\",\n";
  out += "  \"alpha\": " + fmt_g9(doc.alpha) + ",\n";
  out += "  \"beta_range\": [" + fmt_g9(doc.grid.beta_min) + ", " +
         fmt_g9(doc.grid.beta_max) + "],\n";

  out += "  \"segments\": [";
  for (std::size_t i = 0; i < doc.segments.size(); ++i) {
    const Segment& s = doc.segments[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"beta_lo\": " + fmt_g9(s.beta_lo) +
           ", \"beta_hi\": " + fmt_g9(s.beta_hi) + ", \"winner\": \"" +
           json_escape(s.winner) + "\", \"significant\": " +
           (s.significant ? "true" : "false") + "}";
  }
  out += doc.segments.empty() ? "],\n" : "\n  ],\n";

  out += "  \"crossovers\": [";
  for (std::size_t i = 0; i < doc.crossovers.size(); ++i) {
    const CrossoverPoint& c = doc.crossovers[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    {\"name_a\": \"" + json_escape(c.name_a) +
           "\", \"name_b\": \"" + json_escape(c.name_b) +
           "\", \"beta\": " + fmt_g9(c.beta) + "}";
  }
  out += doc.crossovers.empty() ? "],\n" : "\n  ],\n";

  out += "  \"significance_runs\": [";
  for (std::size_t i = 0; i < doc.significance_runs.size(); ++i) {
    const auto& [lo, hi] = doc.significance_runs[i];
    out += i == 0 ? "\n" : ",\n";
    out += "    [" + fmt_g9(lo) + ", " + fmt_g9(hi) + "]";
  }
  out += doc.significance_runs.empty() ? "]\n" : "\n  ]\n";

  out += "}\n";
  return out;
}

inline std::string emit_segments_csv(const ReportDocument& doc) {
  using detail::fmt_g9;
  std::string out = "beta_lo,beta_hi,winner,significant\n";
  for (const Segment& s : doc.segments) {
    out += fmt_g9(s.beta_lo) + "," + fmt_g9(s.beta_hi) + "," + s.winner +
           "," + (s.significant ? "true" : "false") + "\n";
  }
  return out;
}

// Reads back a segments report. Only the report fields are recovered: the
// grid is reduced to its range and the pool/curves are left empty.
inline ReportDocument parse_segments_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedDocument(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw MalformedDocument("top level must be an object");
  for (const char* key : {"mode", "alpha", "beta_range", "segments",
                          "crossovers", "significance_runs"})
    if (!j.contains(key))
      throw MalformedDocument(std::string("missing key '") + key + "'");

  ReportDocument doc;
  const std::string mode = j["mode"].get<std::string>();
  if (mode == "hold-out")
    doc.mode = EvalMode::hold_out;
  else if (mode == "cross-validation")
    doc.mode = EvalMode::cross_validation;
  else
    throw MalformedDocument("unknown mode '" + mode + "'");
  doc.alpha = j["alpha"].get<double>();

  const auto& range = j["beta_range"];
  if (!range.is_array() || range.size() != 2)
    throw MalformedDocument("beta_range must be [beta_min, beta_max]");
  doc.grid.beta_min = range[0].get<double>();
  doc.grid.beta_max = range[1].get<double>();
  doc.grid.points = {doc.grid.beta_min, doc.grid.beta_max};

  for (const auto& s : j["segments"]) {
    Segment seg;
    seg.beta_lo = s.at("beta_lo").get<double>();
    seg.beta_hi = s.at("beta_hi").get<double>();
    seg.winner = s.at("winner").get<std::string>();
    seg.significant = s.at("significant").get<bool>();
    doc.segments.push_back(std::move(seg));
  }
  for (const auto& c : j["crossovers"]) {
    doc.crossovers.push_back({c.at("name_a").get<std::string>(),
                              c.at("name_b").get<std::string>(),
                              c.at("beta").get<double>()});
  }
  for (const auto& r : j["significance_runs"]) {
    if (!r.is_array() || r.size() != 2)
      throw MalformedDocument("significance run must be [beta_lo, beta_hi]");
    doc.significance_runs.emplace_back(r[0].get<double>(),
                                       r[1].get<double>());
  }
  return doc;
}

// --- SVG rendering -----------------------------------------------------------

struct RenderOptions {
  double width = 1200.0;
  double height = 500.0;
  double curve_panel_width = 800.0;
};

namespace detail {

inline constexpr std::array<const char*, 10> kPalette = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

inline constexpr const char* kNonWinnerColor = "#c8c8c8";

struct SvgWriter {
  std::string out;

  void line(double x1, double y1, double x2, double y2,
            const std::string& cls, const std::string& style) {
    out += "<line class=\"" + cls + "\" x1=\"" + fmt_f6(x1) + "\" y1=\"" +
           fmt_f6(y1) + "\" x2=\"" + fmt_f6(x2) + "\" y2=\"" + fmt_f6(y2) +
           "\" " + style + "/>\n";
  }

  void text(double x, double y, const std::string& cls,
            const std::string& anchor, const std::string& content,
            const std::string& extra = "") {
    out += "<text class=\"" + cls + "\" x=\"" + fmt_f6(x) + "\" y=\"" +
           fmt_f6(y) + "\" text-anchor=\"" + anchor +
           "\" font-family=\"monospace\" font-size=\"12\"" +
           (extra.empty() ? "" : " " + extra) + ">" + xml_escape(content) +
           "</text>\n";
  }
};

}  // namespace detail

// Deterministic SVG: curve panel on a log10(beta) axis with the dominance
// structure colored, plus a TPR-PPV scatter panel. Identical documents
// render to byte-identical text.
inline std::string render_svg(const ReportDocument& doc,
                              const RenderOptions& opts = {}) {
  using detail::fmt_f6;
  if (doc.curves.empty() || doc.grid.points.size() < 2)
    throw EmptyDocument("nothing to render");
  for (const auto& c : doc.curves)
    if (c.mean.size() != doc.grid.points.size())
      throw Error("curve " + c.name + " is not aligned with the grid");

  // Winner colors, assigned in first-winning order along the beta axis.
  std::vector<std::string> winner_order;
  std::map<std::string, std::string> color_of;
  for (const Segment& s : doc.segments) {
    if (color_of.count(s.winner)) continue;
    color_of[s.winner] =
        detail::kPalette[winner_order.size() % detail::kPalette.size()];
    winner_order.push_back(s.winner);
  }

  // Curve panel geometry.
  const double pl = 60.0;                             // plot left
  const double pr = opts.curve_panel_width - 20.0;    // plot right
  const double pt = 20.0;                             // plot top
  const double pb = opts.height - 60.0;               // plot bottom
  const double lx0 = std::log10(doc.grid.beta_min);
  const double lx1 = std::log10(doc.grid.beta_max);
  const auto x_of = [&](double beta) {
    return pl + (std::log10(beta) - lx0) / (lx1 - lx0) * (pr - pl);
  };
  const auto y_of = [&](double f) {
    return pb - std::clamp(f, 0.0, 1.0) * (pb - pt);
  };

  // Scatter panel geometry (square, TPR on x, PPV on y).
  const double sl = opts.curve_panel_width + 60.0;
  const double sr = opts.width - 20.0;
  const double st = 60.0;
  const double sb = st + (sr - sl);
  const auto sx_of = [&](double tpr) { return sl + tpr * (sr - sl); };
  const auto sy_of = [&](double ppv) { return sb - ppv * (sb - st); };

  detail::SvgWriter w;
  w.out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  w.out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
           "width=\"" + fmt_f6(opts.width) + "\" height=\"" +
           fmt_f6(opts.height) + "\" viewBox=\"0 0 " + fmt_f6(opts.width) +
           " " + fmt_f6(opts.height) + "\">\n";
  w.out += "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" +
           fmt_f6(opts.width) + "\" height=\"" + fmt_f6(opts.height) +
           "\" fill=\"#ffffff\"/>\n";

  // Curve panel frame and ticks.
  w.out += "<rect class=\"panel\" x=\"" + fmt_f6(pl) + "\" y=\"" + fmt_f6(pt) +
           "\" width=\"" + fmt_f6(pr - pl) + "\" height=\"" + fmt_f6(pb - pt) +
           "\" fill=\"none\" stroke=\"#000000\"/>\n";
  {
    const int k_lo = static_cast<int>(std::ceil(lx0 - 1e-9));
    const int k_hi = static_cast<int>(std::floor(lx1 + 1e-9));
    std::vector<double> ticks;
    for (int k = k_lo; k <= k_hi; ++k) ticks.push_back(std::pow(10.0, k));
    if (ticks.size() < 2) ticks = {doc.grid.beta_min, doc.grid.beta_max};
    for (double tick : ticks) {
      const double x = x_of(tick);
      w.line(x, pb, x, pb + 6.0, "tick", "stroke=\"#000000\"");
      char label[32];
      std::snprintf(label, sizeof(label), "%g", tick);
      w.text(x, pb + 20.0, "tick-label", "middle", label);
    }
    for (int i = 0; i <= 5; ++i) {
      const double f = i / 5.0;
      const double y = y_of(f);
      w.line(pl - 6.0, y, pl, y, "tick", "stroke=\"#000000\"");
      char label[32];
      std::snprintf(label, sizeof(label), "%.1f", f);
      w.text(pl - 10.0, y + 4.0, "tick-label", "end", label);
    }
    w.text((pl + pr) / 2.0, opts.height - 18.0, "axis-label", "middle",
           "beta");
    w.text(18.0, (pt + pb) / 2.0, "axis-label", "middle", "F_beta",
           "transform=\"rotate(-90 " + fmt_f6(18.0) + " " +
               fmt_f6((pt + pb) / 2.0) + ")\"");
  }

  const auto curve_by_name =
      [&](const std::string& name) -> const CurveSummary* {
    for (const auto& c : doc.curves)
      if (c.name == name) return &c;
    return nullptr;
  };

  // Std bands for winners (cross-validation only).
  if (doc.mode == EvalMode::cross_validation) {
    for (const std::string& name : winner_order) {
      const CurveSummary* c = curve_by_name(name);
      if (!c) continue;
      std::string d = "M ";
      for (std::size_t i = 0; i < doc.grid.points.size(); ++i) {
        if (i > 0) d += " L ";
        d += fmt_f6(x_of(doc.grid.points[i])) + "," +
             fmt_f6(y_of(c->mean[i] + c->std[i]));
      }
      for (std::size_t r = doc.grid.points.size(); r-- > 0;) {
        d += " L " + fmt_f6(x_of(doc.grid.points[r])) + "," +
             fmt_f6(y_of(c->mean[r] - c->std[r]));
      }
      d += " Z";
      w.out += "<path class=\"band\" data-name=\"" +
               detail::xml_escape(name) + "\" fill=\"" + color_of[name] +
               "\" fill-opacity=\"0.25\" stroke=\"none\" d=\"" + d + "\"/>\n";
    }
  }

  const auto emit_curve = [&](const CurveSummary& c, const std::string& color,
                              const char* width) {
    std::string points;
    for (std::size_t i = 0; i < doc.grid.points.size(); ++i) {
      if (i > 0) points += ' ';
      points += fmt_f6(x_of(doc.grid.points[i])) + "," + fmt_f6(y_of(c.mean[i]));
    }
    w.out += "<polyline class=\"curve\" data-name=\"" +
             detail::xml_escape(c.name) + "\" fill=\"none\" stroke=\"" +
             color + "\" stroke-width=\"" + width + "\" points=\"" + points +
             "\"/>\n";
  };

  for (const auto& c : doc.curves)
    if (!color_of.count(c.name))
      emit_curve(c, detail::kNonWinnerColor, "1.5");
  for (const std::string& name : winner_order)
    if (const CurveSummary* c = curve_by_name(name))
      emit_curve(*c, color_of[name], "2");

  // Dominance boundaries.
  for (std::size_t i = 0; i + 1 < doc.segments.size(); ++i) {
    const double x = x_of(doc.segments[i].beta_hi);
    w.line(x, pt, x, pb, "boundary",
           "stroke=\"#999999\" stroke-dasharray=\"4 3\"");
  }

  // Significance runs as a black line near the bottom axis.
  for (const auto& [lo, hi] : doc.significance_runs) {
    w.line(x_of(lo), pb - 6.0, x_of(hi), pb - 6.0, "significance",
           "stroke=\"#000000\" stroke-width=\"3\"");
  }

  // Legend: winners with their beta ranges.
  {
    double y = pt + 16.0;
    for (const std::string& name : winner_order) {
      std::string ranges;
      for (const Segment& s : doc.segments) {
        if (s.winner != name) continue;
        if (!ranges.empty()) ranges += "; ";
        ranges += "[" + fmt_f6(s.beta_lo) + ", " + fmt_f6(s.beta_hi) + "]";
      }
      w.line(pl + 10.0, y - 4.0, pl + 34.0, y - 4.0, "legend-swatch",
             "stroke=\"" + color_of[name] + "\" stroke-width=\"3\"");
      w.text(pl + 40.0, y, "legend", "start", name + "  " + ranges);
      y += 18.0;
    }
  }

  // Scatter panel.
  w.out += "<rect class=\"panel\" x=\"" + fmt_f6(sl) + "\" y=\"" + fmt_f6(st) +
           "\" width=\"" + fmt_f6(sr - sl) + "\" height=\"" + fmt_f6(sb - st) +
           "\" fill=\"none\" stroke=\"#000000\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    char label[32];
    std::snprintf(label, sizeof(label), "%.1f", f);
    w.line(sx_of(f), sb, sx_of(f), sb + 6.0, "tick", "stroke=\"#000000\"");
    w.text(sx_of(f), sb + 20.0, "tick-label", "middle", label);
    w.line(sl - 6.0, sy_of(f), sl, sy_of(f), "tick", "stroke=\"#000000\"");
    w.text(sl - 10.0, sy_of(f) + 4.0, "tick-label", "end", label);
  }
  w.text((sl + sr) / 2.0, sb + 40.0, "axis-label", "middle", "TPR");
  w.text(sl - 42.0, (st + sb) / 2.0, "axis-label", "middle", "PPV",
         "transform=\"rotate(-90 " + fmt_f6(sl - 42.0) + " " +
             fmt_f6((st + sb) / 2.0) + ")\"");

  const char* radius = doc.mode == EvalMode::hold_out ? "4" : "3";
  const auto emit_markers = [&](const ClassifierRecord& rec,
                                const std::string& color) {
    for (const PointEstimate& p : rec.folds) {
      w.out += "<circle class=\"marker\" data-name=\"" +
               detail::xml_escape(rec.name) + "\" cx=\"" +
               fmt_f6(sx_of(p.tpr)) + "\" cy=\"" + fmt_f6(sy_of(p.ppv)) +
               "\" r=\"" + radius + "\" fill=\"" + color + "\"/>\n";
    }
  };
  for (const auto& rec : doc.pool)
    if (!color_of.count(rec.name))
      emit_markers(rec, detail::kNonWinnerColor);
  for (const std::string& name : winner_order)
    for (const auto& rec : doc.pool)
      if (rec.name == name) emit_markers(rec, color_of[name]);

  w.out += "</svg>\n";
  return w.out;
}

}  // namespace fbplot
