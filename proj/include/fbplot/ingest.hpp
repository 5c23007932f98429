#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fbplot/curve.hpp"
#include "fbplot/errors.hpp"
#include "fbplot/metrics.hpp"
#include "fbplot/strfmt.hpp"

namespace fbplot {

enum class PayloadKind { counts, rates };

// One (classifier, fold) result. Exactly one of `counts` / `rates` is
// meaningful, selected by the owning table's kind.
struct RunRow {
  std::string classifier;
  int fold = 0;
  ConfusionCounts counts;
  PointEstimate rates;

  friend bool operator==(const RunRow&, const RunRow&) = default;
};

// Normalized experiment results: rows sorted by (classifier, fold), one
// payload kind throughout, identical fold sets across classifiers.
struct RunTable {
  PayloadKind kind = PayloadKind::counts;
  std::vector<RunRow> rows;
  std::vector<std::string> warnings;

  friend bool operator==(const RunTable&, const RunTable&) = default;
};

namespace detail {

inline std::vector<std::string> split_csv_line(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.emplace_back(line.substr(start));
      return fields;
    }
    fields.emplace_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Whole-field integer parse; no leading/trailing whitespace allowed.
inline std::int64_t parse_int_cell(const std::string& cell, int row,
                                   int column) {
  std::int64_t value = 0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || cell.empty())
    throw BadCell(row, column, "expected an integer, got '" + cell + "'");
  return value;
}

inline void finalize_table(RunTable& table) {
  std::sort(table.rows.begin(), table.rows.end(),
            [](const RunRow& a, const RunRow& b) {
              if (a.classifier != b.classifier)
                return a.classifier < b.classifier;
              return a.fold < b.fold;
            });

  // Identical fold sets across classifiers (the paired t-test downstream
  // needs fold-aligned samples).
  std::map<std::string, std::vector<int>> fold_sets;
  for (const auto& row : table.rows)
    fold_sets[row.classifier].push_back(row.fold);
  const std::vector<int>* reference = nullptr;
  for (const auto& [name, folds] : fold_sets) {
    if (!reference) {
      reference = &folds;
    } else if (folds != *reference) {
      throw RaggedFolds("classifier " + name +
                        " has a different fold set than the others");
    }
  }
}

}  // namespace detail

// CSV of precomputed confusion counts. Header (exact):
//   classifier,fold,tp,fn,fp,tn
inline RunTable parse_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw MissingHeader("empty input, expected header "
                        "'classifier,fold,tp,fn,fp,tn'");
  {
    std::string_view header(line);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header != "classifier,fold,tp,fn,fp,tn")
      throw MissingHeader("expected header 'classifier,fold,tp,fn,fp,tn', "
                          "got '" + std::string(header) + "'");
  }

  RunTable table;
  table.kind = PayloadKind::counts;
  std::set<std::pair<std::string, int>> seen;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 6)
      throw BadCell(row_no, 1, "expected 6 fields, got " +
                                   std::to_string(fields.size()));
    RunRow row;
    row.classifier = fields[0];
    if (row.classifier.empty())
      throw BadCell(row_no, 1, "empty classifier name");
    const std::int64_t fold = detail::parse_int_cell(fields[1], row_no, 2);
    if (fold < 0) throw BadCell(row_no, 2, "fold must be >= 0");
    row.fold = static_cast<int>(fold);
    std::int64_t* cells[4] = {&row.counts.tp, &row.counts.fn, &row.counts.fp,
                              &row.counts.tn};
    for (int c = 0; c < 4; ++c) {
      *cells[c] = detail::parse_int_cell(fields[static_cast<std::size_t>(c) + 2],
                                         row_no, c + 3);
      if (*cells[c] < 0) throw BadCell(row_no, c + 3, "count must be >= 0");
    }
    if (row.counts.total() == 0)
      throw BadCell(row_no, 3, "all four counts are zero");
    if (!seen.insert({row.classifier, row.fold}).second)
      throw DuplicateKey(row.classifier, row.fold);
    table.rows.push_back(std::move(row));
  }
  detail::finalize_table(table);
  return table;
}

// CSV of per-instance predictions, aggregated into confusion counts by
// comparing labels against `positive_label`. Header (exact):
//   classifier,fold,y_true,y_pred
inline RunTable parse_predictions_csv(std::istream& in,
                                      const std::string& positive_label) {
  std::string line;
  if (!std::getline(in, line))
    throw MissingHeader("empty input, expected header "
                        "'classifier,fold,y_true,y_pred'");
  {
    std::string_view header(line);
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header != "classifier,fold,y_true,y_pred")
      throw MissingHeader("expected header 'classifier,fold,y_true,y_pred', "
                          "got '" + std::string(header) + "'");
  }

  std::map<std::pair<std::string, int>, ConfusionCounts> tally;
  bool positive_seen = false;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 4)
      throw BadCell(row_no, 1, "expected 4 fields, got " +
                                   std::to_string(fields.size()));
    if (fields[0].empty()) throw BadCell(row_no, 1, "empty classifier name");
    const std::int64_t fold = detail::parse_int_cell(fields[1], row_no, 2);
    if (fold < 0) throw BadCell(row_no, 2, "fold must be >= 0");
    const bool true_pos = fields[2] == positive_label;
    const bool pred_pos = fields[3] == positive_label;
    positive_seen = positive_seen || true_pos;
    ConfusionCounts& c = tally[{fields[0], static_cast<int>(fold)}];
    if (true_pos && pred_pos)
      ++c.tp;
    else if (true_pos && !pred_pos)
      ++c.fn;
    else if (!true_pos && pred_pos)
      ++c.fp;
    else
      ++c.tn;
  }

  RunTable table;
  table.kind = PayloadKind::counts;
  for (const auto& [key, counts] : tally) {
    RunRow row;
    row.classifier = key.first;
    row.fold = key.second;
    row.counts = counts;
    table.rows.push_back(std::move(row));
  }
  if (!positive_seen)
    table.warnings.push_back("positive label '" + positive_label +
                             "' appears in no y_true cell");
  detail::finalize_table(table);
  return table;
}

// JSON of precomputed (ppv, tpr) pairs:
//   {"name": [{"fold": 0, "ppv": 0.9, "tpr": 0.6}, ...], ...}
// Unknown fields are rejected.
inline RunTable parse_rates_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw MalformedDocument(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw MalformedDocument("top level must be an object mapping classifier "
                            "names to fold arrays");

  RunTable table;
  table.kind = PayloadKind::rates;
  std::set<std::pair<std::string, int>> seen;
  for (const auto& [name, entries] : doc.items()) {
    if (name.empty()) throw MalformedDocument("empty classifier name");
    for (char c : name)
      if (c == ',' || static_cast<unsigned char>(c) < 0x20)
        throw MalformedDocument("classifier name '" + name +
                                "' contains a comma or control character");
    if (!entries.is_array())
      throw MalformedDocument("classifier " + name +
                              ": expected an array of fold objects");
    for (const auto& entry : entries) {
      if (!entry.is_object())
        throw MalformedDocument("classifier " + name +
                                ": expected a fold object");
      for (const auto& [key, _] : entry.items())
        if (key != "fold" && key != "ppv" && key != "tpr")
          throw MalformedDocument("classifier " + name +
                                  ": unknown field '" + key + "'");
      if (!entry.contains("fold") || !entry.contains("ppv") ||
          !entry.contains("tpr"))
        throw MalformedDocument("classifier " + name +
                                ": fold object needs fold, ppv, tpr");
      if (!entry["fold"].is_number_integer() ||
          entry["fold"].get<std::int64_t>() < 0)
        throw MalformedDocument("classifier " + name +
                                ": fold must be an integer >= 0");
      const int fold = entry["fold"].get<int>();
      for (const char* field : {"ppv", "tpr"}) {
        if (!entry[field].is_number())
          throw MalformedDocument("classifier " + name + ", fold " +
                                  std::to_string(fold) + ": " + field +
                                  " must be a number");
        const double v = entry[field].get<double>();
        if (!(v >= 0.0 && v <= 1.0))
          throw ValueOutOfRange(name, fold, field, v);
      }
      if (!seen.insert({name, fold}).second) throw DuplicateKey(name, fold);
      RunRow row;
      row.classifier = name;
      row.fold = fold;
      row.rates = {entry["ppv"].get<double>(), entry["tpr"].get<double>()};
      table.rows.push_back(std::move(row));
    }
  }
  detail::finalize_table(table);
  return table;
}

// Canonical text forms; parse -> serialize -> parse is the identity.
inline std::string serialize_counts_csv(const RunTable& table) {
  if (table.kind != PayloadKind::counts)
    throw Error("serialize_counts_csv requires counts payloads");
  std::string out = "classifier,fold,tp,fn,fp,tn\n";
  for (const auto& row : table.rows) {
    out += row.classifier;
    out += ',';
    out += std::to_string(row.fold);
    for (std::int64_t v :
         {row.counts.tp, row.counts.fn, row.counts.fp, row.counts.tn}) {
      out += ',';
      out += std::to_string(v);
    }
    out += '\n';
  }
  return out;
}

inline std::string serialize_rates_json(const RunTable& table) {
  if (table.kind != PayloadKind::rates)
    throw Error("serialize_rates_json requires rates payloads");
  std::string out = "{\n";
  for (std::size_t i = 0; i < table.rows.size();) {
    const std::string& name = table.rows[i].classifier;
    out += "  \"" + detail::json_escape(name) + "\": [\n";
    std::size_t j = i;
    for (; j < table.rows.size() && table.rows[j].classifier == name; ++j) {
      const RunRow& row = table.rows[j];
      out += "    {\"fold\": " + std::to_string(row.fold) +
             ", \"ppv\": " + detail::fmt_roundtrip(row.rates.ppv) +
             ", \"tpr\": " + detail::fmt_roundtrip(row.rates.tpr) + "}";
      out += (j + 1 < table.rows.size() &&
              table.rows[j + 1].classifier == name)
                 ? ",\n"
                 : "\n";
    }
    out += "  ]";
    i = j;
    out += i < table.rows.size() ? ",\n" : "\n";
  }
  out += "}\n";
  return out;
}

// Converts a table to fold-ordered classifier records, applying simple_rates
// to counts payloads. Output is sorted by name.
inline std::vector<ClassifierRecord> to_records(const RunTable& table) {
  std::vector<ClassifierRecord> records;
  for (const auto& row : table.rows) {
    if (records.empty() || records.back().name != row.classifier)
      records.push_back({row.classifier, {}});
    if (table.kind == PayloadKind::rates) {
      records.back().folds.push_back(row.rates);
    } else {
      try {
        const RateSet r = simple_rates(row.counts);
        records.back().folds.push_back({r.ppv, r.tpr});
      } catch (const NoPositiveInstances& e) {
        throw NoPositiveInstances("classifier " + row.classifier + ", fold " +
                                  std::to_string(row.fold) + ": " + e.what());
      } catch (const NoNegativeInstances& e) {
        throw NoNegativeInstances("classifier " + row.classifier + ", fold " +
                                  std::to_string(row.fold) + ": " + e.what());
      }
    }
  }
  return records;
}

}  // namespace fbplot
