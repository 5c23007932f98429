#pragma once

#include <algorithm>
#include <cstdint>
#include <string>

#include "fbplot/errors.hpp"

namespace fbplot {

// One classifier's outcome counts on one evaluation fold.
struct ConfusionCounts {
  std::int64_t tp = 0;
  std::int64_t fn = 0;
  std::int64_t fp = 0;
  std::int64_t tn = 0;

  std::int64_t total() const { return tp + fn + fp + tn; }

  bool valid() const {
    return tp >= 0 && fn >= 0 && fp >= 0 && tn >= 0 && total() > 0;
  }

  friend bool operator==(const ConfusionCounts&,
                         const ConfusionCounts&) = default;
};

// The simple per-class rates derived from a confusion matrix.
// `ppv_undefined` marks the ppv=0 convention used when the classifier never
// predicts positive (tp + fp = 0).
struct RateSet {
  double acc = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  double ppv = 0.0;
  bool ppv_undefined = false;
};

// A (precision, recall) coordinate; everything downstream is built on these.
struct PointEstimate {
  double ppv = 0.0;
  double tpr = 0.0;

  friend bool operator==(const PointEstimate&, const PointEstimate&) = default;
};

inline RateSet simple_rates(const ConfusionCounts& c) {
  if (!c.valid())
    throw Error("invalid confusion counts: all four must be >= 0 and sum > 0");
  if (c.tp + c.fn == 0)
    throw NoPositiveInstances("no positive instances (tp + fn = 0)");
  if (c.tn + c.fp == 0)
    throw NoNegativeInstances("no negative instances (tn + fp = 0)");

  RateSet r;
  r.acc = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  r.tpr = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  r.tnr = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
  if (c.tp + c.fp == 0) {
    r.ppv = 0.0;
    r.ppv_undefined = true;
  } else {
    r.ppv = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  return r;
}

// F_beta = (beta^2 + 1) * ppv * tpr / (beta^2 * ppv + tpr).
// Converges to ppv as beta -> 0 and to tpr as beta -> inf; beta = 1 is the
// harmonic mean. Defined as 0 when ppv = tpr = 0. The result is clamped to
// [min(ppv, tpr), max(ppv, tpr)], which the exact value always satisfies.
inline double f_beta(const PointEstimate& p, double beta) {
  if (!(beta > 0.0)) throw NonPositiveBeta("beta must be > 0");
  const double b2 = beta * beta;
  const double den = b2 * p.ppv + p.tpr;
  if (den == 0.0) return 0.0;
  const double value = (b2 + 1.0) * p.ppv * p.tpr / den;
  return std::clamp(value, std::min(p.ppv, p.tpr), std::max(p.ppv, p.tpr));
}

}  // namespace fbplot
