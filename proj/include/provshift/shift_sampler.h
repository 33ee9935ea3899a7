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
#ifndef PROVSHIFT_SHIFT_SAMPLER_H_
#define PROVSHIFT_SHIFT_SAMPLER_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "provshift/corpus.h"

namespace provshift {

// Test-time class rates implied by fixed training rates, a fixed source
// mixture q = p(z=1) and a fixed overall prevalence.
struct TestRates {
  double p0_test = 0.0;  // p_test(y=1 | z=0)
  double p1_test = 0.0;  // p_test(y=1 | z=1)
  double const_y = 0.0;  // p(y=1), shared by train and test
  double alpha_train = 0.0;
};

// Solves q*p1 + (1-q)*p0 = const_y together with p1 = alpha_test*p0.
// Requires a0 in (0,1], a1 in [0,1], q in (0,1), alpha_test >= 0
// (DomainError otherwise). Throws InfeasibleDistribution if either test
// rate exceeds 1. When alpha_test == a1/a0 the training rates are returned
// unchanged.
TestRates DeriveTestRates(double a0_train, double a1_train, double q,
                          double alpha_test);

// Splits total into integer parts proportional to shares (which sum to 1).
// Parts are floored, then the leftover units go to the largest fractional
// remainders; equal remainders favour the lower index.
std::vector<std::size_t> LargestRemainder(std::size_t total,
                                          const std::vector<double>& shares);

// Rounds the source marginal first (q), then the label split within each
// source (p0, p1).
CellCounts ComputeCellCounts(std::size_t size, double q, double p0,
                             double p1);

struct ShiftParams {
  double a0_train = 0.5;
  double a1_train = 0.2;
  double q = 0.5;
  double alpha_test = 0.4;
  std::size_t train_size = 2000;
  std::size_t test_size = 500;
  std::uint64_t seed = 0;
};

// One fully derived train/test distribution.
struct ShiftSetting {
  ShiftParams params;
  double alpha_train = 0.0;
  double const_y = 0.0;
  double p0_test = 0.0;
  double p1_test = 0.0;
  CellCounts train_counts;
  CellCounts test_counts;
};

// Throws DomainError / InfeasibleDistribution as DeriveTestRates.
ShiftSetting MakeShiftSetting(const ShiftParams& params);

nlohmann::json ShiftSettingToJson(const ShiftSetting& setting);
// Reads the input fields and re-derives everything else.
ShiftSetting ShiftSettingFromJson(const nlohmann::json& j);

// True iff train + test fit into the pool for every (z, y) cell.
bool CheckFeasible(const ShiftSetting& setting, const CellCounts& pool);

// Like CheckFeasible, but an infeasible rate combination yields false.
bool IsFeasible(const ShiftParams& params, const CellCounts& pool);

// A sequence of grid values. Ranges are computed as start + k*step for
// integer k and snapped to 12 decimals, so 0.15 prints as 0.15.
struct GridAxis {
  std::vector<double> values;

  static GridAxis Range(double start, double stop, double step);
  static GridAxis List(std::vector<double> values);
};

struct GridSpec {
  double a0_train = 0.5;
  double a1_train = 0.2;
  std::size_t train_size = 2000;
  std::size_t test_size = 500;
  GridAxis q;
  GridAxis alpha_test;

  std::size_t CandidateCount() const {
    return q.values.size() * alpha_test.values.size();
  }
};

// q from 0.10 to 0.90 step 0.05, alpha_test from 0 to 10 step 0.05,
// a0 = 0.5, a1 = 0.2, 2000 train and 500 test documents.
GridSpec ReferenceGrid();

// Axis JSON is either an array of values or {"start","stop","step"}.
GridAxis GridAxisFromJson(const nlohmann::json& j);
GridSpec GridSpecFromJson(const nlohmann::json& j);

// All feasible settings, q-major then alpha_test, in grid order. Seeds are
// left at zero.
std::vector<ShiftSetting> EnumerateGrid(const CellCounts& pool,
                                        const GridSpec& grid);

struct Split {
  std::vector<std::string> train;  // document ids
  std::vector<std::string> test;
};

struct SplitIndices {
  std::vector<std::size_t> train;  // corpus positions, ascending
  std::vector<std::size_t> test;
};

// Uniform sampling without replacement inside each (z, y) cell, seeded by
// setting.params.seed. Throws InfeasiblePool if a cell is too small.
SplitIndices DrawSplitIndices(const ShiftSetting& setting,
                              const Corpus& corpus);
Split DrawSplit(const ShiftSetting& setting, const Corpus& corpus);

// Seed of the split for one (q, alpha_test) grid point and repeat.
std::uint64_t SplitSeed(std::uint64_t global_seed, double q, double alpha_test,
                        std::uint64_t repeat_index);

}  // namespace provshift

#endif  // PROVSHIFT_SHIFT_SAMPLER_H_
