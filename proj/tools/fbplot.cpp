// fbplot: F_beta dominance analysis for pools of binary classifiers.
//
// Subcommands:
//   metrics    per-(classifier, fold) table of simple and F_beta metrics
//   crossover  closed-form curve intersection of two classifiers (hold-out)
//   segments   dominance partition of the beta axis + report files
//   plot       deterministic SVG figure (+ optional report files)

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fbplot/fbplot.hpp"

namespace {

struct Config {
  std::string input_path;
  std::string input_kind;
  std::string positive_label = "1";
  double beta_min = 0.01;
  double beta_max = 100.0;
  int grid_points = 1001;
  double alpha = 0.05;
  bool bonferroni = false;
  std::string formats;  // comma separated subset of svg,json,csv
  std::string output_prefix = "fbplot_report";
};

constexpr int kExitUsage = 1;
constexpr int kExitParse = 2;
constexpr int kExitMissingName = 3;
constexpr int kExitNotHoldOut = 4;
constexpr int kExitNoSignificance = 5;
constexpr int kExitUnwritable = 6;

void add_input_options(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--input", cfg.input_path, "input results file")->required();
  cmd->add_option("--kind", cfg.input_kind, "input format")
      ->required()
      ->check(CLI::IsMember({"counts-csv", "predictions-csv", "rates-json"}));
  cmd->add_option("--positive-label", cfg.positive_label,
                  "positive class label for predictions-csv (default 1)");
}

void add_analysis_options(CLI::App* cmd, Config& cfg) {
  cmd->add_option("--beta-min", cfg.beta_min, "low end of the beta range")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--beta-max", cfg.beta_max, "high end of the beta range")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid-points", cfg.grid_points,
                  "number of log-spaced grid points")
      ->check(CLI::Range(2, 1000000));
  cmd->add_option("--alpha", cfg.alpha,
                  "significance level for the paired t-test")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_flag("--bonferroni", cfg.bonferroni,
                "divide alpha by (pool size - 1)");
  cmd->add_option("--out", cfg.output_prefix, "output file prefix");
  cmd->add_option("--formats", cfg.formats,
                  "comma-separated outputs: svg,json,csv");
}

fbplot::RunTable load_table(const Config& cfg) {
  std::ifstream in(cfg.input_path, std::ios::binary);
  if (!in) throw fbplot::Error("cannot open input file: " + cfg.input_path);
  if (cfg.input_kind == "counts-csv") return fbplot::parse_counts_csv(in);
  if (cfg.input_kind == "predictions-csv")
    return fbplot::parse_predictions_csv(in, cfg.positive_label);
  return fbplot::parse_rates_json(in);
}

std::set<std::string> parse_formats(const std::string& spec, int& exit_code) {
  std::set<std::string> out;
  std::stringstream ss(spec);
  std::string token;
  while (std::getline(ss, token, ',')) {
    if (token == "svg" || token == "json" || token == "csv") {
      out.insert(token);
    } else {
      std::cerr << "fbplot: unknown format '" << token
                << "' (expected svg, json or csv)\n";
      exit_code = kExitUsage;
    }
  }
  return out;
}

int write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "fbplot: cannot write " << path << "\n";
    return kExitUnwritable;
  }
  out << content;
  out.close();
  if (!out) {
    std::cerr << "fbplot: cannot write " << path << "\n";
    return kExitUnwritable;
  }
  return 0;
}

int write_reports(const fbplot::ReportDocument& doc,
                  const std::set<std::string>& formats, const Config& cfg) {
  if (formats.count("svg")) {
    if (int rc = write_file(cfg.output_prefix + ".svg",
                            fbplot::render_svg(doc)))
      return rc;
  }
  if (formats.count("json")) {
    if (int rc = write_file(cfg.output_prefix + ".json",
                            fbplot::emit_segments_json(doc)))
      return rc;
  }
  if (formats.count("csv")) {
    if (int rc = write_file(cfg.output_prefix + ".csv",
                            fbplot::emit_segments_csv(doc)))
      return rc;
  }
  return 0;
}

int run_metrics(const Config& cfg) {
  if (cfg.input_kind == "rates-json") {
    std::cerr << "fbplot: metrics requires counts-csv or predictions-csv "
                 "input (rates carry no accuracy information)\n";
    return kExitParse;
  }
  const fbplot::RunTable table = load_table(cfg);
  for (const auto& warning : table.warnings)
    std::cerr << "fbplot: warning: " << warning << "\n";

  std::cout << "classifier,fold,acc,tpr,tnr,ppv,f0.5,f1,f2\n";
  for (const auto& row : table.rows) {
    const fbplot::RateSet r = fbplot::simple_rates(row.counts);
    const fbplot::PointEstimate p{r.ppv, r.tpr};
    std::cout << row.classifier << ',' << row.fold << ','
              << fbplot::detail::fmt_f6(r.acc) << ','
              << fbplot::detail::fmt_f6(r.tpr) << ','
              << fbplot::detail::fmt_f6(r.tnr) << ','
              << fbplot::detail::fmt_f6(r.ppv) << ','
              << fbplot::detail::fmt_f6(fbplot::f_beta(p, 0.5)) << ','
              << fbplot::detail::fmt_f6(fbplot::f_beta(p, 1.0)) << ','
              << fbplot::detail::fmt_f6(fbplot::f_beta(p, 2.0)) << "\n";
  }
  return 0;
}

int run_crossover(const Config& cfg, const std::string& name_a,
                  const std::string& name_b) {
  const fbplot::RunTable table = load_table(cfg);
  const auto records = fbplot::to_records(table);

  const fbplot::ClassifierRecord* a = nullptr;
  const fbplot::ClassifierRecord* b = nullptr;
  for (const auto& rec : records) {
    if (rec.name == name_a) a = &rec;
    if (rec.name == name_b) b = &rec;
  }
  if (!a || !b) {
    std::cerr << "fbplot: classifier '" << (!a ? name_a : name_b)
              << "' not present in input\n";
    return kExitMissingName;
  }
  if (!a->hold_out() || !b->hold_out()) {
    std::cerr << "fbplot: crossover has a closed form only for hold-out "
                 "(single fold) input\n";
    return kExitNotHoldOut;
  }

  try {
    const auto beta = fbplot::crossover_beta(a->folds[0], b->folds[0]);
    if (beta) {
      std::printf("%.9f\n", *beta);
    } else {
      const bool a_dominates = a->folds[0].ppv >= b->folds[0].ppv &&
                               a->folds[0].tpr >= b->folds[0].tpr;
      std::printf("none (%s dominates)\n",
                  a_dominates ? name_a.c_str() : name_b.c_str());
    }
  } catch (const fbplot::DegenerateInput&) {
    std::printf("none (curves identical)\n");
  }
  return 0;
}

int run_analysis(const Config& cfg, bool alpha_requested, bool is_plot,
                 const std::set<std::string>& formats) {
  const fbplot::RunTable table = load_table(cfg);
  for (const auto& warning : table.warnings)
    std::cerr << "fbplot: warning: " << warning << "\n";
  const auto records = fbplot::to_records(table);
  if (records.empty()) {
    std::cerr << "fbplot: input contains no classifiers\n";
    return kExitParse;
  }

  if (records[0].hold_out() && alpha_requested) {
    std::cerr << "fbplot: significance testing needs cross-validation input "
                 "(>= 2 folds); --alpha/--bonferroni are meaningless for "
                 "hold-out data\n";
    return kExitNoSignificance;
  }

  const fbplot::BetaGrid grid =
      fbplot::make_beta_grid(cfg.beta_min, cfg.beta_max, cfg.grid_points);
  const fbplot::ReportDocument doc =
      fbplot::analyze(records, grid, cfg.alpha, cfg.bonferroni);

  if (int rc = write_reports(doc, formats, cfg)) return rc;

  if (!is_plot) {
    for (const auto& s : doc.segments) {
      std::cout << '[' << fbplot::detail::fmt_f6(s.beta_lo) << ", "
                << fbplot::detail::fmt_f6(s.beta_hi)
                << "] winner=" << s.winner
                << " significant=" << (s.significant ? "yes" : "no") << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"F_beta dominance analysis for pools of binary classifiers"};
  app.require_subcommand(1);

  Config cfg;
  std::string name_a, name_b;

  CLI::App* metrics = app.add_subcommand(
      "metrics", "print per-(classifier, fold) metric table");
  add_input_options(metrics, cfg);

  CLI::App* crossover = app.add_subcommand(
      "crossover", "closed-form F_beta crossover of two classifiers");
  add_input_options(crossover, cfg);
  crossover->add_option("name_a", name_a, "first classifier")->required();
  crossover->add_option("name_b", name_b, "second classifier")->required();

  CLI::App* segments = app.add_subcommand(
      "segments", "dominance partition of the beta axis");
  add_input_options(segments, cfg);
  add_analysis_options(segments, cfg);

  CLI::App* plot =
      app.add_subcommand("plot", "render the F_beta plot as SVG");
  add_input_options(plot, cfg);
  add_analysis_options(plot, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "fbplot: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  if (!(cfg.beta_min < cfg.beta_max)) {
    std::cerr << "fbplot: --beta-min must be smaller than --beta-max\n";
    return kExitUsage;
  }
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) {
    std::cerr << "fbplot: --alpha must be inside (0, 1)\n";
    return kExitUsage;
  }

  try {
    if (app.got_subcommand(metrics)) return run_metrics(cfg);
    if (app.got_subcommand(crossover))
      return run_crossover(cfg, name_a, name_b);

    const bool is_plot = app.got_subcommand(plot);
    CLI::App* active = is_plot ? plot : segments;
    const bool alpha_requested = active->count("--alpha") > 0 ||
                                 active->count("--bonferroni") > 0;
    int format_error = 0;
    std::set<std::string> formats;
    if (active->count("--formats") > 0) {
      formats = parse_formats(cfg.formats, format_error);
      if (format_error) return format_error;
    } else {
      formats = is_plot ? std::set<std::string>{"svg"}
                        : std::set<std::string>{"csv", "json"};
    }
    if (is_plot) formats.insert("svg");
    return run_analysis(cfg, alpha_requested, is_plot, formats);
  } catch (const fbplot::ZeroComponent& e) {
    std::cerr << "fbplot: " << e.what() << "\n";
    return kExitParse;
  } catch (const fbplot::Error& e) {
    std::cerr << "fbplot: " << e.what() << "\n";
    return kExitParse;
  } catch (const std::exception& e) {
    std::cerr << "fbplot: " << e.what() << "\n";
    return kExitParse;
  }
}
