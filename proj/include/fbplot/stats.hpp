#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "fbplot/curve.hpp"
#include "fbplot/errors.hpp"

namespace fbplot {

struct TestResult {
  double t_stat = 0.0;
  int df = 0;
  double p_one_sided = 1.0;
};

namespace detail {

// Continued fraction for the incomplete beta function (Lentz's method,
// Numerical Recipes form).
inline double betacf(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr double kEps = 1e-15;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace detail

// Regularized incomplete beta function I_x(a, b).
inline double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double log_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                        a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(log_bt);
  if (x < (a + 1.0) / (a + b + 2.0))
    return bt * detail::betacf(a, b, x) / a;
  return 1.0 - bt * detail::betacf(b, a, 1.0 - x) / b;
}

// Survival function of Student's t: P(T_df > t), via
// I_x(df/2, 1/2) with x = df / (df + t^2), which equals P(|T| > |t|).
inline double t_sf(double t, int df) {
  if (df < 1) throw TooFewSamples("t distribution requires df >= 1");
  if (std::isinf(t)) return t > 0.0 ? 0.0 : 1.0;
  if (t == 0.0) return 0.5;
  const double nu = static_cast<double>(df);
  const double x = nu / (nu + t * t);
  const double two_sided = regularized_incomplete_beta(nu / 2.0, 0.5, x);
  return t > 0.0 ? two_sided / 2.0 : 1.0 - two_sided / 2.0;
}

// One-sided paired t-test of H1: mean(a - b) > 0 on fold-aligned samples.
// When all differences are equal the test degenerates: t = +/-inf with
// p = 0 or 1 by the sign of the common difference, and t = 0, p = 0.5 when
// the sequences are identical.
inline TestResult paired_t(std::span<const double> a,
                           std::span<const double> b) {
  if (a.size() != b.size())
    throw LengthMismatch("paired samples must have equal length");
  const std::size_t n = a.size();
  if (n < 2) throw TooFewSamples("paired t-test requires at least 2 pairs");

  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(n);

  bool all_equal = true;
  for (double v : d)
    if (v != d[0]) {
      all_equal = false;
      break;
    }

  TestResult r;
  r.df = static_cast<int>(n) - 1;
  if (all_equal) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (mean > 0.0) {
      r.t_stat = inf;
      r.p_one_sided = 0.0;
    } else if (mean < 0.0) {
      r.t_stat = -inf;
      r.p_one_sided = 1.0;
    } else {
      r.t_stat = 0.0;
      r.p_one_sided = 0.5;
    }
    return r;
  }

  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  r.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
  r.p_one_sided = t_sf(r.t_stat, r.df);
  return r;
}

struct SignificanceResult {
  std::vector<bool> mask;  // aligned with the grid points
  std::vector<Segment> segments;
  std::vector<std::pair<double, double>> runs;  // maximal true runs in beta
};

// Marks the grid points where the winning classifier of the containing
// segment is significantly better than every other classifier under the
// one-sided paired t-test at level alpha (optionally Bonferroni-adjusted to
// alpha / (pool size - 1)). A segment's `significant` flag is set when the
// mask holds at all of its interior grid points.
inline SignificanceResult significance_mask(
    const std::vector<ClassifierRecord>& pool, const BetaGrid& grid,
    std::vector<Segment> segments, double alpha, bool bonferroni = false) {
  detail::validate_pool(pool);
  const std::size_t n_folds = pool[0].folds.size();
  if (n_folds < 2)
    throw NotCVMode("significance requires cross-validation (>= 2 folds)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error("alpha must be in (0, 1)");
  if (segments.empty()) throw Error("segments must come from dominance_partition");

  const double alpha_eff =
      bonferroni && pool.size() > 1
          ? alpha / static_cast<double>(pool.size() - 1)
          : alpha;

  // Per-classifier, per-grid-point fold scores.
  std::vector<std::vector<std::vector<double>>> scores(pool.size());
  for (std::size_t c = 0; c < pool.size(); ++c) {
    scores[c].resize(grid.points.size(), std::vector<double>(n_folds));
    for (std::size_t i = 0; i < grid.points.size(); ++i)
      for (std::size_t k = 0; k < n_folds; ++k)
        scores[c][i][k] = f_beta(pool[c].folds[k], grid.points[i]);
  }

  SignificanceResult out;
  out.mask.assign(grid.points.size(), false);

  std::size_t seg = 0;
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    const double beta = grid.points[i];
    while (seg + 1 < segments.size() && beta > segments[seg].beta_hi) ++seg;
    std::size_t winner = pool.size();
    for (std::size_t c = 0; c < pool.size(); ++c)
      if (pool[c].name == segments[seg].winner) {
        winner = c;
        break;
      }
    if (winner == pool.size())
      throw Error("segment winner not present in pool: " +
                  segments[seg].winner);

    bool all_reject = true;
    for (std::size_t c = 0; c < pool.size() && all_reject; ++c) {
      if (c == winner) continue;
      const TestResult t = paired_t(scores[winner][i], scores[c][i]);
      if (!(t.p_one_sided < alpha_eff)) all_reject = false;
    }
    out.mask[i] = all_reject;
  }

  for (auto& s : segments) {
    bool significant = true;
    for (std::size_t i = 0; i < grid.points.size(); ++i) {
      const double beta = grid.points[i];
      if (beta > s.beta_lo && beta < s.beta_hi && !out.mask[i]) {
        significant = false;
        break;
      }
    }
    s.significant = significant;
  }

  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    if (!out.mask[i]) continue;
    std::size_t j = i;
    while (j + 1 < grid.points.size() && out.mask[j + 1]) ++j;
    out.runs.emplace_back(grid.points[i], grid.points[j]);
    i = j;
  }

  out.segments = std::move(segments);
  return out;
}

}  // namespace fbplot
