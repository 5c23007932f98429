#pragma once

#include <stdexcept>
#include <string>

namespace fbplot {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- metrics ---------------------------------------------------------------

struct NoPositiveInstances : Error {
  using Error::Error;
};

struct NoNegativeInstances : Error {
  using Error::Error;
};

struct NonPositiveBeta : Error {
  using Error::Error;
};

// --- curves ----------------------------------------------------------------

struct InvalidRange : Error {
  using Error::Error;
};

struct TooFewPoints : Error {
  using Error::Error;
};

struct DegenerateInput : Error {
  using Error::Error;
};

struct ZeroComponent : Error {
  using Error::Error;
};

struct EmptyPool : Error {
  using Error::Error;
};

struct FoldCountMismatch : Error {
  using Error::Error;
};

struct NotHoldOutMode : Error {
  using Error::Error;
};

// --- stats -----------------------------------------------------------------

struct LengthMismatch : Error {
  using Error::Error;
};

struct TooFewSamples : Error {
  using Error::Error;
};

struct NotCVMode : Error {
  using Error::Error;
};

// --- ingest ----------------------------------------------------------------

struct MissingHeader : Error {
  using Error::Error;
};

// Carries 1-based coordinates of the offending cell (row 1 is the header).
struct BadCell : Error {
  BadCell(int row_, int column_, const std::string& detail)
      : Error("bad cell at row " + std::to_string(row_) + ", column " +
              std::to_string(column_) + ": " + detail),
        row(row_),
        column(column_) {}
  int row;
  int column;
};

struct DuplicateKey : Error {
  DuplicateKey(const std::string& classifier_, int fold_)
      : Error("duplicate (classifier, fold) key: (" + classifier_ + ", " +
              std::to_string(fold_) + ")"),
        classifier(classifier_),
        fold(fold_) {}
  std::string classifier;
  int fold;
};

struct RaggedFolds : Error {
  using Error::Error;
};

struct MalformedDocument : Error {
  using Error::Error;
};

struct ValueOutOfRange : Error {
  ValueOutOfRange(const std::string& classifier_, int fold_,
                  const std::string& field_, double value_)
      : Error("value out of range for classifier " + classifier_ + ", fold " +
              std::to_string(fold_) + ", field " + field_ + ": " +
              std::to_string(value_)),
        classifier(classifier_),
        fold(fold_),
        field(field_),
        value(value_) {}
  std::string classifier;
  int fold;
  std::string field;
  double value;
};

// --- report ----------------------------------------------------------------

struct EmptyDocument : Error {
  using Error::Error;
};

}  // namespace fbplot
