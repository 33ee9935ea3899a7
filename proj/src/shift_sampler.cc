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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "provshift/errors.h"
#include "provshift/random.h"

namespace provshift {
namespace {

// Guards floor() against representation error such as 2000*0.3 landing a
// hair below 600.
constexpr double kRoundingSlack = 1e-9;

double SnapToGrid(double x) { return std::round(x * 1e12) / 1e12; }

}  // namespace

TestRates DeriveTestRates(double a0_train, double a1_train, double q,
                          double alpha_test) {
  if (!(a0_train > 0.0 && a0_train <= 1.0)) {
    throw DomainError("a0_train must lie in (0,1]");
  }
  if (!(a1_train >= 0.0 && a1_train <= 1.0)) {
    throw DomainError("a1_train must lie in [0,1]");
  }
  if (!(q > 0.0 && q < 1.0)) throw DomainError("q must lie in (0,1)");
  if (!(alpha_test >= 0.0) || !std::isfinite(alpha_test)) {
    throw DomainError("alpha_test must be a finite nonnegative number");
  }
  TestRates r;
  r.alpha_train = a1_train / a0_train;
  r.const_y = q * a1_train + (1.0 - q) * a0_train;
  if (alpha_test == r.alpha_train) {
    r.p0_test = a0_train;
    r.p1_test = a1_train;
    return r;
  }
  r.p0_test = r.const_y / ((1.0 - q) + q * alpha_test);
  r.p1_test = alpha_test * r.p0_test;
  if (r.p0_test > 1.0 || r.p1_test > 1.0) {
    throw InfeasibleDistribution(
        "test rates out of range: p0_test=" + std::to_string(r.p0_test) +
        " p1_test=" + std::to_string(r.p1_test));
  }
  return r;
}

std::vector<std::size_t> LargestRemainder(std::size_t total,
                                          const std::vector<double>& shares) {
  std::vector<std::size_t> parts(shares.size(), 0);
  std::vector<double> remainders(shares.size(), 0.0);
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    const double raw = static_cast<double>(total) * shares[i];
    const double floored = std::floor(raw + kRoundingSlack);
    parts[i] = static_cast<std::size_t>(std::max(0.0, floored));
    remainders[i] = std::max(0.0, raw - floored);
    assigned += parts[i];
  }
  if (assigned > total) {
    throw DomainError("shares sum to more than one");
  }
  std::vector<std::size_t> order(shares.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return remainders[a] > remainders[b] + kRoundingSlack;
                   });
  for (std::size_t k = 0; assigned < total; ++k) {
    ++parts[order[k % order.size()]];
    ++assigned;
  }
  return parts;
}

CellCounts ComputeCellCounts(std::size_t size, double q, double p0,
                             double p1) {
  const auto by_source = LargestRemainder(size, {1.0 - q, q});
  const auto uw = LargestRemainder(by_source[0], {1.0 - p0, p0});
  const auto mimic = LargestRemainder(by_source[1], {1.0 - p1, p1});
  return CellCounts(uw[0], uw[1], mimic[0], mimic[1]);
}

ShiftSetting MakeShiftSetting(const ShiftParams& params) {
  if (params.train_size == 0 || params.test_size == 0) {
    throw DomainError("train_size and test_size must be positive");
  }
  const TestRates rates = DeriveTestRates(params.a0_train, params.a1_train,
                                          params.q, params.alpha_test);
  ShiftSetting s;
  s.params = params;
  s.alpha_train = rates.alpha_train;
  s.const_y = rates.const_y;
  s.p0_test = rates.p0_test;
  s.p1_test = rates.p1_test;
  s.train_counts = ComputeCellCounts(params.train_size, params.q,
                                     params.a0_train, params.a1_train);
  s.test_counts =
      ComputeCellCounts(params.test_size, params.q, s.p0_test, s.p1_test);
  return s;
}

namespace {

nlohmann::json CountsToJson(const CellCounts& c) {
  nlohmann::json j;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      j[std::to_string(z) + "," + std::to_string(y)] = c.at(z, y);
    }
  }
  return j;
}

}  // namespace

nlohmann::json ShiftSettingToJson(const ShiftSetting& s) {
  return {{"a0_train", s.params.a0_train},
          {"a1_train", s.params.a1_train},
          {"q", s.params.q},
          {"alpha_test", s.params.alpha_test},
          {"train_size", s.params.train_size},
          {"test_size", s.params.test_size},
          {"seed", s.params.seed},
          {"alpha_train", s.alpha_train},
          {"const_y", s.const_y},
          {"p0_test", s.p0_test},
          {"p1_test", s.p1_test},
          {"train_counts", CountsToJson(s.train_counts)},
          {"test_counts", CountsToJson(s.test_counts)}};
}

ShiftSetting ShiftSettingFromJson(const nlohmann::json& j) {
  ShiftParams p;
  try {
    p.a0_train = j.value("a0_train", p.a0_train);
    p.a1_train = j.value("a1_train", p.a1_train);
    p.q = j.at("q").get<double>();
    p.alpha_test = j.at("alpha_test").get<double>();
    p.train_size = j.value("train_size", p.train_size);
    p.test_size = j.value("test_size", p.test_size);
    p.seed = j.value("seed", p.seed);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("shift setting: ") + e.what());
  }
  return MakeShiftSetting(p);
}

bool CheckFeasible(const ShiftSetting& setting, const CellCounts& pool) {
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      if (setting.train_counts.at(z, y) + setting.test_counts.at(z, y) >
          pool.at(z, y)) {
        return false;
      }
    }
  }
  return true;
}

bool IsFeasible(const ShiftParams& params, const CellCounts& pool) {
  try {
    return CheckFeasible(MakeShiftSetting(params), pool);
  } catch (const InfeasibleDistribution&) {
    return false;
  }
}

GridAxis GridAxis::Range(double start, double stop, double step) {
  if (!(step > 0.0) || !(stop >= start)) {
    throw ConfigError("grid range needs step > 0 and stop >= start");
  }
  const auto n =
      static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  GridAxis axis;
  axis.values.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    axis.values.push_back(SnapToGrid(start + static_cast<double>(k) * step));
  }
  return axis;
}

GridAxis GridAxis::List(std::vector<double> values) {
  if (values.empty()) throw ConfigError("grid axis must not be empty");
  return GridAxis{std::move(values)};
}

GridSpec ReferenceGrid() {
  GridSpec g;
  g.q = GridAxis::Range(0.10, 0.90, 0.05);
  g.alpha_test = GridAxis::Range(0.0, 10.0, 0.05);
  return g;
}

GridAxis GridAxisFromJson(const nlohmann::json& j) {
  try {
    if (j.is_array()) return GridAxis::List(j.get<std::vector<double>>());
    if (j.is_number()) return GridAxis::List({j.get<double>()});
    return GridAxis::Range(j.at("start").get<double>(),
                           j.at("stop").get<double>(),
                           j.at("step").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid axis: ") + e.what());
  }
}

GridSpec GridSpecFromJson(const nlohmann::json& j) {
  GridSpec g = ReferenceGrid();
  try {
    g.a0_train = j.value("a0_train", g.a0_train);
    g.a1_train = j.value("a1_train", g.a1_train);
    g.train_size = j.value("train_size", g.train_size);
    g.test_size = j.value("test_size", g.test_size);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("grid spec: ") + e.what());
  }
  if (j.contains("q")) g.q = GridAxisFromJson(j.at("q"));
  if (j.contains("alpha_test")) {
    g.alpha_test = GridAxisFromJson(j.at("alpha_test"));
  }
  return g;
}

std::vector<ShiftSetting> EnumerateGrid(const CellCounts& pool,
                                        const GridSpec& grid) {
  std::vector<ShiftSetting> out;
  for (double q : grid.q.values) {
    for (double alpha : grid.alpha_test.values) {
      ShiftParams p;
      p.a0_train = grid.a0_train;
      p.a1_train = grid.a1_train;
      p.q = q;
      p.alpha_test = alpha;
      p.train_size = grid.train_size;
      p.test_size = grid.test_size;
      ShiftSetting s;
      try {
        s = MakeShiftSetting(p);
      } catch (const InfeasibleDistribution&) {
        continue;
      }
      if (CheckFeasible(s, pool)) out.push_back(std::move(s));
    }
  }
  return out;
}

SplitIndices DrawSplitIndices(const ShiftSetting& setting,
                              const Corpus& corpus) {
  std::array<std::vector<std::size_t>, 4> cells;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    cells[static_cast<std::size_t>(corpus[i].source * 2 + corpus[i].label)]
        .push_back(i);
  }
  Rng rng(setting.params.seed);
  SplitIndices split;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      auto& members = cells[static_cast<std::size_t>(z * 2 + y)];
      const std::size_t n_train = setting.train_counts.at(z, y);
      const std::size_t n_test = setting.test_counts.at(z, y);
      const std::size_t need = n_train + n_test;
      if (need > members.size()) {
        throw InfeasiblePool("cell (" + std::to_string(z) + "," +
                             std::to_string(y) + ") needs " +
                             std::to_string(need) + " documents, pool has " +
                             std::to_string(members.size()));
      }
      // Partial Fisher-Yates: the first need slots become a uniform
      // sample without replacement.
      for (std::size_t k = 0; k < need; ++k) {
        const std::size_t j = k + rng.Index(members.size() - k);
        std::swap(members[k], members[j]);
      }
      split.train.insert(split.train.end(), members.begin(),
                         members.begin() + static_cast<std::ptrdiff_t>(n_train));
      split.test.insert(split.test.end(),
                        members.begin() + static_cast<std::ptrdiff_t>(n_train),
                        members.begin() + static_cast<std::ptrdiff_t>(need));
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

Split DrawSplit(const ShiftSetting& setting, const Corpus& corpus) {
  const SplitIndices idx = DrawSplitIndices(setting, corpus);
  Split split;
  split.train.reserve(idx.train.size());
  split.test.reserve(idx.test.size());
  for (std::size_t i : idx.train) split.train.push_back(corpus[i].id);
  for (std::size_t i : idx.test) split.test.push_back(corpus[i].id);
  return split;
}

std::uint64_t SplitSeed(std::uint64_t global_seed, double q, double alpha_test,
                        std::uint64_t repeat_index) {
  return HashSeed(global_seed, q, alpha_test, repeat_index);
}

}  // namespace provshift
