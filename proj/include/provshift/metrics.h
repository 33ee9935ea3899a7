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

#ifndef PROVSHIFT_METRICS_H_
#define PROVSHIFT_METRICS_H_

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "provshift/model.h"

namespace provshift {

struct PRPoint {
  double threshold = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

// One point per distinct score, thresholds descending; a point counts every
// example scored >= threshold as predicted positive.
std::vector<PRPoint> PrecisionRecallCurve(std::span<const double> scores,
                                          std::span<const int> labels);

// Average precision. Examples are grouped by identical score; each group
// contributes precision-after-group * positives-in-group / total-positives.
// Throws UndefinedMetric without positives and DomainError on length
// mismatch.
double Auprc(std::span<const double> scores, std::span<const int> labels);

struct EvalRecord {
  double q = 0.0;
  double alpha_test = 0.0;
  ModelMode mode = ModelMode::kBackdoor;
  std::string representation;
  double v = 0.0;
  std::uint64_t seed = 0;
  double auprc = 0.0;
};

struct AggregateRow {
  double q = 0.0;
  double alpha_test = 0.0;
  ModelMode mode = ModelMode::kBackdoor;
  std::string representation;
  double v = 0.0;
  std::size_t n = 0;
  double mean = 0.0;
  double std = 0.0;     // sample standard deviation; 0 when n == 1
  bool single = false;  // n == 1, std carries no information
};

// Groups by (q, alpha_test, mode, representation, v); output sorted by that
// key with backdoor before vanilla.
std::vector<AggregateRow> Aggregate(std::span<const EvalRecord> records);

// Sorts records by (q, alpha_test, mode, representation, v, seed).
void SortRecords(std::vector<EvalRecord>& records);

// Shortest decimal text that reads back to the same double.
std::string FormatDouble(double x);

// Header: q,alpha_test,mode,representation,v,seed,auprc
void WriteResultsCsv(std::span<const EvalRecord> records, std::ostream& out);
std::vector<EvalRecord> ReadResultsCsv(std::istream& in);

// Header: q,alpha_test,mode,representation,v,n,mean,std,single
void WriteAggregateCsv(std::span<const AggregateRow> rows, std::ostream& out);
std::vector<AggregateRow> ReadAggregateCsv(std::istream& in);

}  // namespace provshift

#endif  // PROVSHIFT_METRICS_H_
