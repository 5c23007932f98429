#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fbplot/ingest.hpp"

using namespace fbplot;

namespace {

RunTable counts_from(const std::string& text) {
  std::istringstream in(text);
  return parse_counts_csv(in);
}

RunTable predictions_from(const std::string& text,
                          const std::string& label = "1") {
  std::istringstream in(text);
  return parse_predictions_csv(in, label);
}

RunTable rates_from(const std::string& text) {
  std::istringstream in(text);
  return parse_rates_json(in);
}

}  // namespace

TEST_CASE("parse_counts_csv single row") {
  const RunTable t = counts_from(
      "classifier,fold,tp,fn,fp,tn\n"
      "A,0,50,10,5,935\n");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.kind == PayloadKind::counts);
  CHECK(t.rows[0].classifier == "A");
  CHECK(t.rows[0].fold == 0);
  CHECK(t.rows[0].counts == ConfusionCounts{50, 10, 5, 935});
}

TEST_CASE("parse_counts_csv accepts CRLF and a trailing blank line") {
  const RunTable t = counts_from(
      "classifier,fold,tp,fn,fp,tn\r\n"
      "A,0,5,5,5,5\r\n"
      "\r\n");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].counts.tp == 5);
}

TEST_CASE("parse_counts_csv rejects duplicates and ragged folds") {
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fn,fp,tn\n"
                              "A,0,1,1,1,1\n"
                              "A,0,2,2,2,2\n"),
                  DuplicateKey);
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fn,fp,tn\n"
                              "A,0,1,1,1,1\n"
                              "A,1,1,1,1,1\n"
                              "B,0,1,1,1,1\n"),
                  RaggedFolds);
}

TEST_CASE("parse_counts_csv header errors") {
  CHECK_THROWS_AS(counts_from(""), MissingHeader);
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fp,fn,tn\nA,0,1,1,1,1\n"),
                  MissingHeader);
}

TEST_CASE("parse_counts_csv bad cells carry coordinates") {
  try {
    counts_from("classifier,fold,tp,fn,fp,tn\nA,0,1,x,1,1\n");
    FAIL("expected BadCell");
  } catch (const BadCell& e) {
    CHECK(e.row == 2);
    CHECK(e.column == 4);
  }
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fn,fp,tn\nA,0,1,1,1\n"),
                  BadCell);
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fn,fp,tn\nA,-1,1,1,1,1\n"),
                  BadCell);
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fn,fp,tn\nA,0,0,0,0,0\n"),
                  BadCell);
  CHECK_THROWS_AS(counts_from("classifier,fold,tp,fn,fp,tn\n,0,1,1,1,1\n"),
                  BadCell);
}

TEST_CASE("parse_counts_csv is order-insensitive") {
  const RunTable a = counts_from(
      "classifier,fold,tp,fn,fp,tn\n"
      "B,1,4,4,4,4\n"
      "A,0,1,1,1,1\n"
      "A,1,2,2,2,2\n"
      "B,0,3,3,3,3\n");
  const RunTable b = counts_from(
      "classifier,fold,tp,fn,fp,tn\n"
      "A,0,1,1,1,1\n"
      "A,1,2,2,2,2\n"
      "B,0,3,3,3,3\n"
      "B,1,4,4,4,4\n");
  CHECK(a == b);
}

TEST_CASE("counts CSV round-trips through its serialized form") {
  const RunTable t = counts_from(
      "classifier,fold,tp,fn,fp,tn\n"
      "B,0,30,3,9,800\n"
      "A,1,20,2,8,900\n"
      "A,0,50,10,5,935\n"
      "B,1,31,4,7,801\n");
  const std::string text = serialize_counts_csv(t);
  const RunTable again = counts_from(text);
  CHECK(t == again);
  CHECK(serialize_counts_csv(again) == text);
}

TEST_CASE("parse_predictions_csv tallies one of each outcome") {
  const RunTable t = predictions_from(
      "classifier,fold,y_true,y_pred\n"
      "A,0,1,1\n"
      "A,0,1,0\n"
      "A,0,0,1\n"
      "A,0,0,0\n");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.rows[0].counts == ConfusionCounts{1, 1, 1, 1});
  CHECK(t.warnings.empty());
}

TEST_CASE("parse_predictions_csv with an always-positive predictor") {
  const RunTable t = predictions_from(
      "classifier,fold,y_true,y_pred\n"
      "A,0,1,1\n"
      "A,0,0,1\n"
      "A,0,0,1\n"
      "A,0,0,1\n");
  CHECK(t.rows[0].counts == ConfusionCounts{1, 0, 3, 0});
}

TEST_CASE("parse_predictions_csv respects a custom positive label") {
  const RunTable t = predictions_from(
      "classifier,fold,y_true,y_pred\n"
      "A,0,spam,spam\n"
      "A,0,ham,spam\n"
      "A,0,ham,ham\n",
      "spam");
  CHECK(t.rows[0].counts == ConfusionCounts{1, 0, 1, 1});
}

TEST_CASE("parse_predictions_csv warns when the positive label never occurs") {
  const RunTable t = predictions_from(
      "classifier,fold,y_true,y_pred\n"
      "A,0,a,b\n"
      "A,0,b,a\n",
      "positive");
  REQUIRE(t.warnings.size() == 1);
  CHECK(t.warnings[0].find("positive") != std::string::npos);
}

TEST_CASE("parse_predictions_csv matches an independent tally") {
  std::mt19937 rng(53);
  std::uniform_int_distribution<int> clf(0, 2);
  std::uniform_int_distribution<int> fold(0, 1);
  std::uniform_int_distribution<int> label(0, 1);

  std::string text = "classifier,fold,y_true,y_pred\n";
  // independent tally: (classifier, fold) -> [tp, fn, fp, tn]
  std::map<std::pair<std::string, int>, std::array<int, 4>> expected;
  for (auto& name : {"m0", "m1", "m2"})
    for (int f = 0; f < 2; ++f) expected[{name, f}] = {0, 0, 0, 0};
  for (int i = 0; i < 1000; ++i) {
    const std::string name = "m" + std::to_string(clf(rng));
    const int f = fold(rng);
    const int y_true = label(rng);
    const int y_pred = label(rng);
    text += name + "," + std::to_string(f) + "," + std::to_string(y_true) +
            "," + std::to_string(y_pred) + "\n";
    auto& cell = expected[{name, f}];
    if (y_true == 1 && y_pred == 1) ++cell[0];
    if (y_true == 1 && y_pred == 0) ++cell[1];
    if (y_true == 0 && y_pred == 1) ++cell[2];
    if (y_true == 0 && y_pred == 0) ++cell[3];
  }

  const RunTable t = predictions_from(text);
  REQUIRE(t.rows.size() == expected.size());
  for (const auto& row : t.rows) {
    const auto& cell = expected.at({row.classifier, row.fold});
    CHECK(row.counts.tp == cell[0]);
    CHECK(row.counts.fn == cell[1]);
    CHECK(row.counts.fp == cell[2]);
    CHECK(row.counts.tn == cell[3]);
  }
}

TEST_CASE("parse_rates_json single record") {
  const RunTable t = rates_from(R"({"A":[{"fold":0,"ppv":0.9,"tpr":0.6}]})");
  REQUIRE(t.rows.size() == 1);
  CHECK(t.kind == PayloadKind::rates);
  CHECK(t.rows[0].rates == PointEstimate{0.9, 0.6});
}

TEST_CASE("parse_rates_json rejects out-of-range values") {
  try {
    rates_from(R"({"A":[{"fold":0,"ppv":1.2,"tpr":0.6}]})");
    FAIL("expected ValueOutOfRange");
  } catch (const ValueOutOfRange& e) {
    CHECK(e.classifier == "A");
    CHECK(e.fold == 0);
    CHECK(e.field == "ppv");
  }
  CHECK_THROWS_AS(rates_from(R"({"A":[{"fold":0,"ppv":0.9,"tpr":-0.1}]})"),
                  ValueOutOfRange);
}

TEST_CASE("parse_rates_json malformed documents") {
  CHECK_THROWS_AS(rates_from("not json"), MalformedDocument);
  CHECK_THROWS_AS(rates_from("[1,2,3]"), MalformedDocument);
  CHECK_THROWS_AS(rates_from(R"({"A":{"fold":0}})"), MalformedDocument);
  CHECK_THROWS_AS(
      rates_from(R"({"A":[{"fold":0,"ppv":0.9,"tpr":0.6,"extra":1}]})"),
      MalformedDocument);
  CHECK_THROWS_AS(rates_from(R"({"A":[{"fold":0,"ppv":0.9}]})"),
                  MalformedDocument);
  CHECK_THROWS_AS(rates_from(R"({"A":[{"fold":-1,"ppv":0.9,"tpr":0.6}]})"),
                  MalformedDocument);
  CHECK_THROWS_AS(rates_from(R"({"A,B":[{"fold":0,"ppv":0.9,"tpr":0.6}]})"),
                  MalformedDocument);
  CHECK_THROWS_AS(
      rates_from(
          R"({"A":[{"fold":0,"ppv":0.9,"tpr":0.6},{"fold":0,"ppv":0.8,"tpr":0.5}]})"),
      DuplicateKey);
  CHECK_THROWS_AS(
      rates_from(
          R"({"A":[{"fold":0,"ppv":0.9,"tpr":0.6}],"B":[{"fold":1,"ppv":0.8,"tpr":0.5}]})"),
      RaggedFolds);
}

TEST_CASE("rates JSON round-trips through its serialized form") {
  const RunTable t = rates_from(
      R"({"B":[{"fold":1,"ppv":0.123456789012345,"tpr":0.5},{"fold":0,"ppv":0.9,"tpr":0.6}],
          "A":[{"fold":0,"ppv":0.3333333333333333,"tpr":0.25},{"fold":1,"ppv":1.0,"tpr":0.0}]})");
  const std::string text = serialize_rates_json(t);
  const RunTable again = rates_from(text);
  CHECK(t == again);
  CHECK(serialize_rates_json(again) == text);
}

TEST_CASE("to_records converts counts to point estimates") {
  const RunTable t = counts_from(
      "classifier,fold,tp,fn,fp,tn\n"
      "A,0,50,10,5,935\n");
  const auto records = to_records(t);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].folds.size() == 1);
  CHECK(records[0].folds[0].ppv ==
        Catch::Approx(0.9090909090909091).epsilon(1e-12));
  CHECK(records[0].folds[0].tpr ==
        Catch::Approx(0.8333333333333334).epsilon(1e-12));
}

TEST_CASE("to_records passes rates through unchanged") {
  const RunTable t = rates_from(
      R"({"A":[{"fold":1,"ppv":0.8,"tpr":0.7},{"fold":0,"ppv":0.9,"tpr":0.6}]})");
  const auto records = to_records(t);
  REQUIRE(records.size() == 1);
  REQUIRE(records[0].folds.size() == 2);
  // folds come out ordered by fold id
  CHECK(records[0].folds[0] == PointEstimate{0.9, 0.6});
  CHECK(records[0].folds[1] == PointEstimate{0.8, 0.7});
}

TEST_CASE("to_records sorts classifiers by name") {
  const RunTable t = rates_from(
      R"({"zeta":[{"fold":0,"ppv":0.5,"tpr":0.5}],
          "alpha":[{"fold":0,"ppv":0.6,"tpr":0.6}]})");
  const auto records = to_records(t);
  REQUIRE(records.size() == 2);
  CHECK(records[0].name == "alpha");
  CHECK(records[1].name == "zeta");
}

TEST_CASE("to_records propagates rate errors with context") {
  const RunTable t = counts_from(
      "classifier,fold,tp,fn,fp,tn\n"
      "A,3,0,0,5,95\n");
  try {
    to_records(t);
    FAIL("expected NoPositiveInstances");
  } catch (const NoPositiveInstances& e) {
    const std::string msg = e.what();
    CHECK(msg.find("A") != std::string::npos);
    CHECK(msg.find("3") != std::string::npos);
  }
}
