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

#include "provshift/shift_sampler.h"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "provshift/errors.h"

namespace provshift {
namespace {

// Nearest-integer rounding with ties resolved toward z=0 (for the source
// split) and toward negatives (for the label split). Stated independently
// of the largest-remainder implementation.
std::size_t RoundNearestLow(double target, std::size_t total) {
  const double lo = std::floor(target + 1e-9);
  const double hi = lo + 1.0;
  std::size_t best = static_cast<std::size_t>(lo);
  if (hi <= static_cast<double>(total) &&
      (hi - target) < (target - lo) - 1e-9) {
    best = static_cast<std::size_t>(hi);
  }
  return best;
}

CellCounts OracleCounts(std::size_t n, double q, double p0, double p1) {
  const std::size_t n1 = RoundNearestLow(q * static_cast<double>(n), n);
  const std::size_t n0 = n - n1;
  const std::size_t pos0 = RoundNearestLow(p0 * static_cast<double>(n0), n0);
  const std::size_t pos1 = RoundNearestLow(p1 * static_cast<double>(n1), n1);
  return CellCounts(n0 - pos0, pos0, n1 - pos1, pos1);
}

TEST(DeriveTestRates, MatchedAlphaReturnsTrainingRates) {
  const TestRates r = DeriveTestRates(0.5, 0.2, 0.5, 0.4);
  EXPECT_EQ(r.p0_test, 0.5);
  EXPECT_EQ(r.p1_test, 0.2);
  EXPECT_DOUBLE_EQ(r.alpha_train, 0.4);
}

TEST(DeriveTestRates, AlphaOneEqualizesRates) {
  const TestRates r = DeriveTestRates(0.5, 0.2, 0.5, 1.0);
  EXPECT_NEAR(r.const_y, 0.35, 1e-15);
  EXPECT_NEAR(r.p0_test, 0.35, 1e-15);
  EXPECT_NEAR(r.p1_test, 0.35, 1e-15);
}

TEST(DeriveTestRates, AlphaTwo) {
  const TestRates r = DeriveTestRates(0.5, 0.2, 0.5, 2.0);
  EXPECT_NEAR(r.const_y, 0.35, 1e-15);
  EXPECT_NEAR(r.p0_test, 0.35 / 1.5, 1e-12);
  EXPECT_NEAR(r.p1_test, 0.7 / 1.5, 1e-12);
  // Constraint identities.
  EXPECT_NEAR(0.5 * r.p1_test + 0.5 * r.p0_test, r.const_y, 1e-12);
  EXPECT_NEAR(r.p1_test, 2.0 * r.p0_test, 1e-12);
}

TEST(DeriveTestRates, ExtremeCombinationIsInfeasible) {
  // const_y = 0.44, p0 = 0.44/2.8, p1 = 10 * p0 = 1.5714...
  EXPECT_THROW(DeriveTestRates(0.5, 0.2, 0.2, 10.0), InfeasibleDistribution);
}

TEST(DeriveTestRates, DomainErrors) {
  EXPECT_THROW(DeriveTestRates(0.0, 0.2, 0.5, 1.0), DomainError);
  EXPECT_THROW(DeriveTestRates(0.5, 1.2, 0.5, 1.0), DomainError);
  EXPECT_THROW(DeriveTestRates(0.5, 0.2, 1.0, 1.0), DomainError);
  EXPECT_THROW(DeriveTestRates(0.5, 0.2, 0.5, -0.1), DomainError);
}

TEST(DeriveTestRates, IdentitiesHoldOnRandomInputs) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int checked = 0;
  for (int i = 0; i < 2000; ++i) {
    const double a0 = 0.01 + 0.99 * unit(gen);
    const double a1 = unit(gen);
    const double q = 0.01 + 0.98 * unit(gen);
    const double alpha = 10.0 * unit(gen);
    TestRates r;
    try {
      r = DeriveTestRates(a0, a1, q, alpha);
    } catch (const InfeasibleDistribution&) {
      continue;
    }
    ++checked;
    EXPECT_NEAR(q * r.p1_test + (1 - q) * r.p0_test, r.const_y, 1e-12);
    EXPECT_NEAR(r.p1_test, alpha * r.p0_test, 1e-12);
    EXPECT_LE(r.p0_test, 1.0);
    EXPECT_LE(r.p1_test, 1.0);
  }
  EXPECT_GT(checked, 1000);
}

TEST(DeriveTestRates, MonotoneInAlpha) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 300; ++i) {
    const double a0 = 0.3 + 0.7 * unit(gen);
    const double a1 = 0.05 + 0.3 * unit(gen);
    const double q = 0.05 + 0.9 * unit(gen);
    const double lo = 0.2 + 2.0 * unit(gen);
    const double hi = lo + 0.01 + unit(gen);
    TestRates r_lo, r_hi;
    try {
      r_lo = DeriveTestRates(a0, a1, q, lo);
      r_hi = DeriveTestRates(a0, a1, q, hi);
    } catch (const InfeasibleDistribution&) {
      continue;
    }
    EXPECT_GT(r_lo.p0_test, r_hi.p0_test);
    EXPECT_LT(r_lo.p1_test, r_hi.p1_test);
  }
}

TEST(LargestRemainder, DistributesLeftover) {
  EXPECT_EQ(LargestRemainder(10, {0.34, 0.33, 0.33}),
            (std::vector<std::size_t>{4, 3, 3}));
  EXPECT_EQ(LargestRemainder(3, {0.5, 0.5}),
            (std::vector<std::size_t>{2, 1}));
  EXPECT_EQ(LargestRemainder(7, {1.0, 0.0}), (std::vector<std::size_t>{7, 0}));
}

TEST(ComputeCellCounts, TrainingSplitAtReferenceRates) {
  const CellCounts c = ComputeCellCounts(2000, 0.5, 0.5, 0.2);
  EXPECT_EQ(c, CellCounts(500, 500, 800, 200));
}

TEST(ComputeCellCounts, TieAtAlphaOne) {
  const TestRates r = DeriveTestRates(0.5, 0.2, 0.5, 1.0);
  const CellCounts c = ComputeCellCounts(500, 0.5, r.p0_test, r.p1_test);
  EXPECT_EQ(c.SourceTotal(0), 250u);
  EXPECT_EQ(c.SourceTotal(1), 250u);
  EXPECT_TRUE(c.at(0, 1) == 87 || c.at(0, 1) == 88);
  EXPECT_EQ(c, OracleCounts(500, 0.5, r.p0_test, r.p1_test));
  EXPECT_EQ(c.at(0, 1), 87u);
  EXPECT_EQ(c.at(1, 1), 87u);
}

TEST(ComputeCellCounts, AlphaZeroHasNoMimicPositives) {
  const TestRates r = DeriveTestRates(0.5, 0.2, 0.5, 0.0);
  EXPECT_EQ(ComputeCellCounts(500, 0.5, r.p0_test, r.p1_test).at(1, 1), 0u);
}

TEST(ComputeCellCounts, MatchesNearestRoundingOracle) {
  const GridSpec grid = ReferenceGrid();
  for (double q : grid.q.values) {
    for (double alpha : grid.alpha_test.values) {
      TestRates r;
      try {
        r = DeriveTestRates(0.5, 0.2, q, alpha);
      } catch (const InfeasibleDistribution&) {
        continue;
      }
      for (std::size_t n : {500u, 2000u, 37u}) {
        const CellCounts c = ComputeCellCounts(n, q, r.p0_test, r.p1_test);
        ASSERT_EQ(c, OracleCounts(n, q, r.p0_test, r.p1_test))
            << "q=" << q << " alpha=" << alpha << " n=" << n;
        EXPECT_EQ(c.Total(), n);
        EXPECT_LE(std::abs(static_cast<double>(c.SourceTotal(1)) -
                           q * static_cast<double>(n)),
                  1.0);
      }
    }
  }
}

TEST(MakeShiftSetting, DerivesEverything) {
  ShiftParams p;
  p.q = 0.3;
  p.alpha_test = 2.0;
  const ShiftSetting s = MakeShiftSetting(p);
  EXPECT_DOUBLE_EQ(s.alpha_train, 0.4);
  EXPECT_NEAR(s.const_y, 0.3 * 0.2 + 0.7 * 0.5, 1e-15);
  EXPECT_NEAR(s.p1_test, 2.0 * s.p0_test, 1e-12);
  EXPECT_EQ(s.train_counts.Total(), 2000u);
  EXPECT_EQ(s.test_counts.Total(), 500u);
  EXPECT_EQ(s.train_counts.SourceTotal(1), 600u);
  EXPECT_EQ(s.test_counts.SourceTotal(1), 150u);
}

TEST(MakeShiftSetting, JsonRoundTrip) {
  ShiftParams p;
  p.q = 0.45;
  p.alpha_test = 3.25;
  p.seed = 99;
  const ShiftSetting s = MakeShiftSetting(p);
  const ShiftSetting back = ShiftSettingFromJson(ShiftSettingToJson(s));
  EXPECT_EQ(back.params.seed, 99u);
  EXPECT_EQ(back.test_counts, s.test_counts);
  EXPECT_EQ(back.p0_test, s.p0_test);
}

TEST(CheckFeasible, ReferencePoolAtMatchedAlpha) {
  ShiftParams p;
  p.q = 0.5;
  p.alpha_test = 0.4;
  const ShiftSetting s = MakeShiftSetting(p);
  const CellCounts pool = ReferencePoolCounts();
  bool oracle = true;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      oracle &= s.train_counts.at(z, y) + s.test_counts.at(z, y) <=
                pool.at(z, y);
    }
  }
  EXPECT_TRUE(oracle);
  EXPECT_TRUE(CheckFeasible(s, pool));
}

TEST(CheckFeasible, TinyPool) {
  const ShiftSetting s = MakeShiftSetting(ShiftParams{});
  EXPECT_FALSE(CheckFeasible(s, CellCounts(3, 3, 2, 2)));
}

TEST(CheckFeasible, InfeasibleRatesAreNotFeasible) {
  ShiftParams p;
  p.q = 0.2;
  p.alpha_test = 10.0;
  EXPECT_FALSE(IsFeasible(p, ReferencePoolCounts()));
}

TEST(CheckFeasible, BoundaryIsInclusive) {
  const ShiftSetting s = MakeShiftSetting(ShiftParams{});
  CellCounts exact;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      exact.at(z, y) = s.train_counts.at(z, y) + s.test_counts.at(z, y);
    }
  }
  EXPECT_TRUE(CheckFeasible(s, exact));
  --exact.at(1, 1);
  EXPECT_FALSE(CheckFeasible(s, exact));
}

TEST(GridAxis, RangeUsesIntegerMultiples) {
  const GridAxis q = GridAxis::Range(0.10, 0.90, 0.05);
  ASSERT_EQ(q.values.size(), 17u);
  EXPECT_EQ(q.values[1], 0.15);
  EXPECT_EQ(q.values[16], 0.9);
  const GridAxis a = GridAxis::Range(0.0, 10.0, 0.05);
  ASSERT_EQ(a.values.size(), 201u);
  EXPECT_EQ(a.values[0], 0.0);
  EXPECT_EQ(a.values[8], 0.4);
  EXPECT_EQ(a.values[200], 10.0);
}

TEST(EnumerateGrid, ReferenceCandidateCount) {
  const GridSpec grid = ReferenceGrid();
  std::size_t loop_count = 0;
  for (std::size_t i = 0; i < grid.q.values.size(); ++i) {
    for (std::size_t j = 0; j < grid.alpha_test.values.size(); ++j) {
      ++loop_count;
    }
  }
  EXPECT_EQ(loop_count, 3417u);
  EXPECT_EQ(grid.CandidateCount(), 3417u);
}

TEST(EnumerateGrid, SinglePoint) {
  GridSpec grid = ReferenceGrid();
  grid.q = GridAxis::List({0.5});
  grid.alpha_test = GridAxis::List({0.4});
  const auto settings = EnumerateGrid(ReferencePoolCounts(), grid);
  ASSERT_EQ(settings.size(), 1u);
  EXPECT_EQ(settings[0].params.q, 0.5);
}

TEST(EnumerateGrid, OrderedQMajorAndMatchesIsFeasible) {
  const GridSpec grid = ReferenceGrid();
  const CellCounts pool = ReferencePoolCounts();
  const auto settings = EnumerateGrid(pool, grid);
  std::size_t expected = 0;
  for (double q : grid.q.values) {
    for (double a : grid.alpha_test.values) {
      ShiftParams p;
      p.q = q;
      p.alpha_test = a;
      expected += IsFeasible(p, pool) ? 1 : 0;
    }
  }
  EXPECT_EQ(settings.size(), expected);
  for (std::size_t i = 1; i < settings.size(); ++i) {
    const auto& a = settings[i - 1].params;
    const auto& b = settings[i].params;
    EXPECT_TRUE(a.q < b.q || (a.q == b.q && a.alpha_test < b.alpha_test));
  }
}

TEST(GridSpec, FromJson) {
  const GridSpec g = GridSpecFromJson(
      {{"q", {0.3, 0.5}}, {"alpha_test", {{"start", 0}, {"stop", 1}, {"step", 0.5}}}});
  EXPECT_EQ(g.q.values, (std::vector<double>{0.3, 0.5}));
  EXPECT_EQ(g.alpha_test.values, (std::vector<double>{0.0, 0.5, 1.0}));
  EXPECT_EQ(g.train_size, 2000u);
}

Corpus MakePool(std::size_t per_cell) {
  std::vector<Document> docs;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      for (std::size_t k = 0; k < per_cell; ++k) {
        docs.push_back({"d" + std::to_string(z) + std::to_string(y) + "_" +
                            std::to_string(k),
                        "t", y, z});
      }
    }
  }
  return Corpus(std::move(docs));
}

ShiftSetting SmallSetting(std::uint64_t seed) {
  ShiftParams p;
  p.q = 0.5;
  p.alpha_test = 1.0;
  p.train_size = 20;
  p.test_size = 8;
  p.seed = seed;
  return MakeShiftSetting(p);
}

TEST(DrawSplit, DeterministicAndExact) {
  const Corpus pool = MakePool(20);
  const ShiftSetting s = SmallSetting(3);
  const Split a = DrawSplit(s, pool);
  const Split b = DrawSplit(s, pool);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test, b.test);
  EXPECT_EQ(a.train.size(), 20u);
  EXPECT_EQ(a.test.size(), 8u);

  CellCounts train, test;
  for (const auto& id : a.train) {
    const auto& d = pool[pool.Find(id)];
    ++train.at(d.source, d.label);
  }
  for (const auto& id : a.test) {
    const auto& d = pool[pool.Find(id)];
    ++test.at(d.source, d.label);
  }
  EXPECT_EQ(train, s.train_counts);
  EXPECT_EQ(test, s.test_counts);

  const Split other = DrawSplit(SmallSetting(4), pool);
  EXPECT_NE(a.train, other.train);
}

TEST(DrawSplit, NeverRepeatsAnId) {
  const Corpus pool = MakePool(20);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Split s = DrawSplit(SmallSetting(seed), pool);
    std::set<std::string> ids(s.train.begin(), s.train.end());
    EXPECT_EQ(ids.size(), s.train.size());
    for (const auto& id : s.test) EXPECT_TRUE(ids.insert(id).second) << id;
  }
}

TEST(DrawSplit, FullCellTakesEveryMember) {
  const ShiftSetting s = SmallSetting(1);
  // Pool sized exactly to the split.
  std::vector<Document> docs;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      const std::size_t n = s.train_counts.at(z, y) + s.test_counts.at(z, y);
      for (std::size_t k = 0; k < n; ++k) {
        docs.push_back({"e" + std::to_string(z * 2 + y) + "_" +
                            std::to_string(k),
                        "t", y, z});
      }
    }
  }
  const Corpus pool(std::move(docs));
  const Split split = DrawSplit(s, pool);
  EXPECT_EQ(split.train.size() + split.test.size(), pool.size());
}

TEST(DrawSplit, InsufficientPoolThrows) {
  EXPECT_THROW(DrawSplitIndices(SmallSetting(0), MakePool(3)), InfeasiblePool);
}

TEST(DrawSplit, InclusionFrequencyIsHypergeometric) {
  const Corpus pool = MakePool(20);
  const ShiftSetting base = SmallSetting(0);
  constexpr int kTrials = 10000;
  std::map<std::string, int> train_hits, test_hits;
  for (int t = 0; t < kTrials; ++t) {
    ShiftSetting s = base;
    s.params.seed = static_cast<std::uint64_t>(t);
    const Split split = DrawSplit(s, pool);
    for (const auto& id : split.train) ++train_hits[id];
    for (const auto& id : split.test) ++test_hits[id];
  }
  for (const auto& d : pool.documents()) {
    const double pool_n = 20.0;
    const double p_train = base.train_counts.at(d.source, d.label) / pool_n;
    const double p_test = base.test_counts.at(d.source, d.label) / pool_n;
    const double se_train = std::sqrt(p_train * (1 - p_train) / kTrials);
    const double se_test = std::sqrt(p_test * (1 - p_test) / kTrials);
    EXPECT_NEAR(train_hits[d.id] / double{kTrials}, p_train, 3 * se_train + 1e-12)
        << d.id;
    EXPECT_NEAR(test_hits[d.id] / double{kTrials}, p_test, 3 * se_test + 1e-12)
        << d.id;
  }
}

TEST(SplitSeed, DependsOnEveryInput) {
  const auto base = SplitSeed(0, 0.5, 0.4, 0);
  EXPECT_EQ(base, SplitSeed(0, 0.5, 0.4, 0));
  EXPECT_NE(base, SplitSeed(1, 0.5, 0.4, 0));
  EXPECT_NE(base, SplitSeed(0, 0.55, 0.4, 0));
  EXPECT_NE(base, SplitSeed(0, 0.5, 0.45, 0));
  EXPECT_NE(base, SplitSeed(0, 0.5, 0.4, 1));
  EXPECT_NE(SplitSeed(0, 0.4, 0.5, 0), SplitSeed(0, 0.5, 0.4, 0));
}

}  // namespace
}  // namespace provshift
