// Copyright 2026 The provshift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "provshift/metrics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <tuple>

#include "provshift/errors.h"

namespace provshift {
namespace {

void CheckInputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw DomainError("scores and labels differ in length");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw DomainError("labels must be 0 or 1");
  }
}

// Indices sorted by score, descending; ties keep input order (irrelevant to
// the result since ties are consumed as one group).
std::vector<std::size_t> DescendingOrder(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a,
                                                   std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

}  // namespace

std::vector<PRPoint> PrecisionRecallCurve(std::span<const double> scores,
                                          std::span<const int> labels) {
  CheckInputs(scores, labels);
  const auto total_pos = std::count(labels.begin(), labels.end(), 1);
  if (total_pos == 0) throw UndefinedMetric("no positive labels");
  const auto order = DescendingOrder(scores);
  std::vector<PRPoint> curve;
  std::size_t tp = 0, seen = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    while (k < order.size() && scores[order[k]] == threshold) {
      tp += static_cast<std::size_t>(labels[order[k]]);
      ++seen;
      ++k;
    }
    curve.push_back({threshold,
                     static_cast<double>(tp) / static_cast<double>(seen),
                     static_cast<double>(tp) / static_cast<double>(total_pos)});
  }
  return curve;
}

double Auprc(std::span<const double> scores, std::span<const int> labels) {
  CheckInputs(scores, labels);
  const auto order = DescendingOrder(scores);
  std::size_t total_pos = 0;
  for (int y : labels) total_pos += static_cast<std::size_t>(y);
  if (total_pos == 0) throw UndefinedMetric("AUPRC needs a positive label");
  double ap = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double threshold = scores[order[k]];
    std::size_t group_pos = 0;
    while (k < order.size() && scores[order[k]] == threshold) {
      group_pos += static_cast<std::size_t>(labels[order[k]]);
      ++seen;
      ++k;
    }
    tp += group_pos;
    if (group_pos > 0) {
      ap += (static_cast<double>(tp) / static_cast<double>(seen)) *
            static_cast<double>(group_pos);
    }
  }
  return ap / static_cast<double>(total_pos);
}

namespace {

auto GroupKey(const EvalRecord& r) {
  return std::make_tuple(r.q, r.alpha_test, static_cast<int>(r.mode),
                         std::cref(r.representation), r.v);
}

}  // namespace

void SortRecords(std::vector<EvalRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const EvalRecord& a, const EvalRecord& b) {
                     return std::tuple_cat(GroupKey(a), std::tie(a.seed)) <
                            std::tuple_cat(GroupKey(b), std::tie(b.seed));
                   });
}

std::vector<AggregateRow> Aggregate(std::span<const EvalRecord> records) {
  std::vector<EvalRecord> sorted(records.begin(), records.end());
  SortRecords(sorted);
  std::vector<AggregateRow> rows;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && GroupKey(sorted[j]) == GroupKey(sorted[i])) {
      sum += sorted[j].auprc;
      ++j;
    }
    AggregateRow row;
    row.q = sorted[i].q;
    row.alpha_test = sorted[i].alpha_test;
    row.mode = sorted[i].mode;
    row.representation = sorted[i].representation;
    row.v = sorted[i].v;
    row.n = j - i;
    row.mean = sum / static_cast<double>(row.n);
    if (row.n > 1) {
      double ss = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        const double d = sorted[k].auprc - row.mean;
        ss += d * d;
      }
      row.std = std::sqrt(ss / static_cast<double>(row.n - 1));
    } else {
      row.single = true;
    }
    rows.push_back(std::move(row));
    i = j;
  }
  return rows;
}

std::string FormatDouble(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double ParseDouble(const std::string& s, std::size_t line) {
  double value = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(line, "bad number '" + s + "'");
  }
  return value;
}

std::uint64_t ParseUnsigned(const std::string& s, std::size_t line) {
  std::uint64_t value = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError(line, "bad integer '" + s + "'");
  }
  return value;
}

std::vector<std::vector<std::string>> ReadCsv(std::istream& in,
                                              const std::string& header,
                                              std::size_t columns) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, "missing CSV header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != header) {
    throw ParseError(1, "unexpected header '" + line + "', want '" + header +
                            "'");
  }
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != columns) {
      throw ParseError(line_no, "expected " + std::to_string(columns) +
                                    " fields, got " +
                                    std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

constexpr char kResultsHeader[] = "q,alpha_test,mode,representation,v,seed,auprc";
constexpr char kAggregateHeader[] =
    "q,alpha_test,mode,representation,v,n,mean,std,single";

}  // namespace

void WriteResultsCsv(std::span<const EvalRecord> records, std::ostream& out) {
  out << kResultsHeader << '\n';
  for (const auto& r : records) {
    out << FormatDouble(r.q) << ',' << FormatDouble(r.alpha_test) << ','
        << ModelModeName(r.mode) << ',' << r.representation << ','
        << FormatDouble(r.v) << ',' << r.seed << ',' << FormatDouble(r.auprc)
        << '\n';
  }
}

std::vector<EvalRecord> ReadResultsCsv(std::istream& in) {
  std::vector<EvalRecord> records;
  std::size_t line_no = 1;
  for (const auto& f : ReadCsv(in, kResultsHeader, 7)) {
    ++line_no;
    EvalRecord r;
    r.q = ParseDouble(f[0], line_no);
    r.alpha_test = ParseDouble(f[1], line_no);
    r.mode = ParseModelMode(f[2]);
    r.representation = f[3];
    r.v = ParseDouble(f[4], line_no);
    r.seed = ParseUnsigned(f[5], line_no);
    r.auprc = ParseDouble(f[6], line_no);
    records.push_back(std::move(r));
  }
  return records;
}

void WriteAggregateCsv(std::span<const AggregateRow> rows, std::ostream& out) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows) {
    out << FormatDouble(r.q) << ',' << FormatDouble(r.alpha_test) << ','
        << ModelModeName(r.mode) << ',' << r.representation << ','
        << FormatDouble(r.v) << ',' << r.n << ',' << FormatDouble(r.mean)
        << ',' << FormatDouble(r.std) << ',' << (r.single ? 1 : 0) << '\n';
  }
}

std::vector<AggregateRow> ReadAggregateCsv(std::istream& in) {
  std::vector<AggregateRow> rows;
  std::size_t line_no = 1;
  for (const auto& f : ReadCsv(in, kAggregateHeader, 9)) {
    ++line_no;
    AggregateRow r;
    r.q = ParseDouble(f[0], line_no);
    r.alpha_test = ParseDouble(f[1], line_no);
    r.mode = ParseModelMode(f[2]);
    r.representation = f[3];
    r.v = ParseDouble(f[4], line_no);
    r.n = ParseUnsigned(f[5], line_no);
    r.mean = ParseDouble(f[6], line_no);
    r.std = ParseDouble(f[7], line_no);
    r.single = f[8] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace provshift
