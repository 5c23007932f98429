#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "fbplot/errors.hpp"
#include "fbplot/metrics.hpp"

namespace fbplot {

// Log-uniform sampling of the beta axis.
struct BetaGrid {
  double beta_min = 0.0;
  double beta_max = 0.0;
  std::vector<double> points;
};

// A named classifier and its per-fold estimates. One fold means hold-out
// evaluation; several folds mean cross-validation.
struct ClassifierRecord {
  std::string name;
  std::vector<PointEstimate> folds;

  bool hold_out() const { return folds.size() == 1; }
};

// Mean and population standard deviation of F_beta across folds, aligned
// with a BetaGrid.
struct CurveSummary {
  std::string name;
  std::vector<double> mean;
  std::vector<double> std;
};

struct CrossoverPoint {
  std::string name_a;
  std::string name_b;
  double beta = 0.0;
};

// A maximal beta interval with a single best classifier.
struct Segment {
  double beta_lo = 0.0;
  double beta_hi = 0.0;
  std::string winner;
  bool significant = false;
};

inline BetaGrid make_beta_grid(double beta_min, double beta_max, int n) {
  if (!(beta_min > 0.0) || !(beta_min < beta_max))
    throw InvalidRange("beta grid requires 0 < beta_min < beta_max");
  if (n < 2) throw TooFewPoints("beta grid requires at least 2 points");

  BetaGrid grid;
  grid.beta_min = beta_min;
  grid.beta_max = beta_max;
  grid.points.resize(static_cast<std::size_t>(n));
  const double log_lo = std::log(beta_min);
  const double log_hi = std::log(beta_max);
  for (int i = 1; i + 1 < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    grid.points[static_cast<std::size_t>(i)] =
        std::exp(log_lo + t * (log_hi - log_lo));
  }
  grid.points.front() = beta_min;
  grid.points.back() = beta_max;
  return grid;
}

// Mean F_beta across folds at a single beta.
inline double mean_f_beta(const ClassifierRecord& rec, double beta) {
  double sum = 0.0;
  for (const auto& p : rec.folds) sum += f_beta(p, beta);
  return sum / static_cast<double>(rec.folds.size());
}

inline CurveSummary evaluate_curve(const ClassifierRecord& rec,
                                   const BetaGrid& grid) {
  if (rec.folds.empty())
    throw Error("classifier " + rec.name + " has no folds");
  CurveSummary out;
  out.name = rec.name;
  out.mean.reserve(grid.points.size());
  out.std.reserve(grid.points.size());
  const double n = static_cast<double>(rec.folds.size());
  std::vector<double> values(rec.folds.size());
  for (double beta : grid.points) {
    for (std::size_t k = 0; k < rec.folds.size(); ++k)
      values[k] = f_beta(rec.folds[k], beta);
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    out.mean.push_back(mean);
    out.std.push_back(rec.folds.size() > 1 ? std::sqrt(ss / n) : 0.0);
  }
  return out;
}

// Closed-form beta at which the F_beta curves of two single-fold estimates
// intersect:
//
//   beta^2 = tpr_a * tpr_b * (ppv_b - ppv_a) / (ppv_a * ppv_b * (tpr_a - tpr_b))
//
// Returns nullopt when one curve dominates the other (the radicand is not a
// finite positive number), i.e. the curves never cross at finite beta > 0.
inline std::optional<double> crossover_beta(const PointEstimate& a,
                                            const PointEstimate& b) {
  if (a.ppv <= 0.0 || a.tpr <= 0.0 || b.ppv <= 0.0 || b.tpr <= 0.0)
    throw ZeroComponent("crossover requires all four rates > 0");
  if (a == b) throw DegenerateInput("identical estimates: curves coincide");

  const double num = a.tpr * b.tpr * (b.ppv - a.ppv);
  const double den = a.ppv * b.ppv * (a.tpr - b.tpr);
  if (den == 0.0) return std::nullopt;
  const double radicand = num / den;
  if (!(radicand > 0.0) || !std::isfinite(radicand)) return std::nullopt;
  return std::sqrt(radicand);
}

namespace detail {

// Index of the best mean curve at `beta`; exact ties go to the
// lexicographically smallest name so the result is pool-order independent.
inline std::size_t argmax_at(const std::vector<ClassifierRecord>& pool,
                             double beta) {
  std::size_t best = 0;
  double best_value = mean_f_beta(pool[0], beta);
  for (std::size_t i = 1; i < pool.size(); ++i) {
    const double v = mean_f_beta(pool[i], beta);
    if (v > best_value ||
        (v == best_value && pool[i].name < pool[best].name)) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

// Locates the root of mean_f_beta(a, .) - mean_f_beta(b, .) inside
// [lo, hi], where the difference is >= 0 at lo and < 0 at hi. Bisection on
// log(beta) down to a relative beta tolerance of 1e-9.
inline double refine_boundary(const ClassifierRecord& a,
                              const ClassifierRecord& b, double lo,
                              double hi) {
  const double d_lo = mean_f_beta(a, lo) - mean_f_beta(b, lo);
  if (d_lo == 0.0) return lo;
  const double d_hi = mean_f_beta(a, hi) - mean_f_beta(b, hi);
  if (d_hi >= 0.0) return hi;
  while (hi - lo > 1e-9 * lo) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;  // cannot split further
    const double d = mean_f_beta(a, mid) - mean_f_beta(b, mid);
    if (d == 0.0) return mid;
    (d > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

inline void validate_pool(const std::vector<ClassifierRecord>& pool) {
  if (pool.empty()) throw EmptyPool("classifier pool is empty");
  const std::size_t k = pool[0].folds.size();
  for (const auto& rec : pool) {
    if (rec.folds.empty()) throw EmptyPool("classifier has no folds");
    if (rec.folds.size() != k)
      throw FoldCountMismatch("classifier " + rec.name + " has " +
                              std::to_string(rec.folds.size()) +
                              " folds, expected " + std::to_string(k));
  }
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      if (pool[i].name == pool[j].name)
        throw Error("duplicate classifier name: " + pool[i].name);
}

}  // namespace detail

// Splits [beta_min, beta_max] into maximal intervals each won by a single
// classifier (the argmax structure of the upper envelope of all curves).
//
// Hold-out pools: every pairwise closed-form crossover inside the range is a
// candidate boundary, so segments are exact no matter how coarse the grid is.
// CV pools have no closed form; argmax changes are detected on the grid and
// boundaries refined by bisection on the mean-curve difference.
//
// The `significant` flags are left false; see significance_mask.
inline std::vector<Segment> dominance_partition(
    const std::vector<ClassifierRecord>& pool, const BetaGrid& grid) {
  detail::validate_pool(pool);

  std::vector<double> cuts;
  cuts.push_back(grid.beta_min);

  if (pool[0].hold_out()) {
    std::vector<double> candidates;
    for (std::size_t i = 0; i < pool.size(); ++i) {
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        const PointEstimate& a = pool[i].folds[0];
        const PointEstimate& b = pool[j].folds[0];
        if (a == b) continue;
        if (a.ppv <= 0.0 || a.tpr <= 0.0 || b.ppv <= 0.0 || b.tpr <= 0.0)
          continue;  // a zero-component curve is identically 0: never crosses
        const auto c = crossover_beta(a, b);
        if (c && *c > grid.beta_min && *c < grid.beta_max)
          candidates.push_back(*c);
      }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()),
                     candidates.end());
    cuts.insert(cuts.end(), candidates.begin(), candidates.end());
  } else {
    std::size_t prev = detail::argmax_at(pool, grid.points[0]);
    for (std::size_t i = 1; i < grid.points.size(); ++i) {
      const std::size_t next = detail::argmax_at(pool, grid.points[i]);
      if (next != prev) {
        cuts.push_back(detail::refine_boundary(
            pool[prev], pool[next], grid.points[i - 1], grid.points[i]));
        prev = next;
      }
    }
  }
  cuts.push_back(grid.beta_max);

  // Winner of each elementary interval, evaluated at its geometric midpoint;
  // equal-winner neighbours collapse into one segment.
  std::vector<Segment> segments;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i] < cuts[i + 1])) continue;
    const double mid = std::sqrt(cuts[i] * cuts[i + 1]);
    const std::string& winner = pool[detail::argmax_at(pool, mid)].name;
    if (!segments.empty() && segments.back().winner == winner) {
      segments.back().beta_hi = cuts[i + 1];
    } else {
      segments.push_back({cuts[i], cuts[i + 1], winner, false});
    }
  }
  return segments;
}

// All pairwise closed-form crossovers of a hold-out pool, sorted by beta.
// Pairs that never cross (dominance) contribute nothing.
inline std::vector<CrossoverPoint> all_crossovers(
    const std::vector<ClassifierRecord>& pool) {
  detail::validate_pool(pool);
  for (const auto& rec : pool)
    if (!rec.hold_out())
      throw NotHoldOutMode("crossovers have a closed form only for "
                           "single-fold records");

  std::vector<CrossoverPoint> out;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i + 1; j < pool.size(); ++j) {
      const auto& a = pool[i];
      const auto& b = pool[j];
      const auto beta = crossover_beta(a.folds[0], b.folds[0]);
      if (!beta) continue;
      const bool swap = b.name < a.name;
      out.push_back({swap ? b.name : a.name, swap ? a.name : b.name, *beta});
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

}  // namespace fbplot
