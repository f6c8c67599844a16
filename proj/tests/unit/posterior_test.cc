// Copyright 2026  The tsda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "tsda/codec/posterior.h"
#include "tsda/common/error.h"
#include "tsda/common/rng.h"

namespace tsda::codec {
namespace {

using Big = boost::multiprecision::cpp_bin_float_50;

std::vector<double> RandomLogits(Rng& rng, int n, double scale = 5.0) {
  std::vector<double> z(n);
  for (double& v : z) v = scale * rng.Normal();
  return z;
}

std::vector<double> BigSoftmax(const std::vector<double>& z, double t) {
  std::vector<Big> e(z.size());
  Big sum = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    e[i] = boost::multiprecision::exp(Big(z[i]) / Big(t));
    sum += e[i];
  }
  std::vector<double> out(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = static_cast<double>(e[i] / sum);
  return out;
}

// Sort-then-take with the stated tie rule.
std::vector<int> SortTopK(const std::vector<double>& z, int k) {
  std::vector<int> idx(z.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return z[a] > z[b]; });
  idx.resize(k);
  return idx;
}

double Entropy(const std::vector<double>& p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

TEST(SoftmaxTest, ConstantLogitsAreUniform) {
  const std::vector<double> z(7, 3.25);
  for (double t : {0.5, 1.0, 5.0})
    for (double p : SoftmaxT(z, t)) EXPECT_NEAR(p, 1.0 / 7.0, 1e-15);
}

TEST(SoftmaxTest, TwoClassExample) {
  const std::vector<double> z = {0.0, std::log(2.0)};
  const auto q = SoftmaxT(z, 1.0);
  EXPECT_NEAR(q[0], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(q[1], 2.0 / 3.0, 1e-15);
}

TEST(SoftmaxTest, MatchesHighPrecisionOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto z = RandomLogits(rng, 1 + trial * 7, 20.0);
    const auto q = SoftmaxT(z, 2.0);
    const auto want = BigSoftmax(z, 2.0);
    for (std::size_t i = 0; i < z.size(); ++i) ASSERT_NEAR(q[i], want[i], 1e-12);
  }
}

TEST(SoftmaxTest, HugeLogitsStayFinite) {
  const std::vector<double> z = {1e300, -1e300, 0.0};
  const auto q = SoftmaxT(z, 1.0);
  EXPECT_EQ(q[0], 1.0);
  EXPECT_EQ(q[1], 0.0);
}

TEST(SoftmaxTest, RejectsBadInput) {
  EXPECT_THROW(SoftmaxT(std::vector<double>{1.0, NAN}, 1.0), InvalidArgument);
  EXPECT_THROW(SoftmaxT(std::vector<double>{1.0}, 0.0), InvalidArgument);
  EXPECT_THROW(SoftmaxT(std::vector<double>{}, 1.0), InvalidArgument);
}

TEST(SoftmaxTest, EntropyIncreasesWithTemperature) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const auto z = RandomLogits(rng, 2 + trial % 40);
    double prev = -1.0;
    for (double t : {0.5, 1.0, 2.0, 5.0}) {
      const double h = Entropy(SoftmaxT(z, t));
      EXPECT_GT(h, prev);
      prev = h;
    }
  }
}

TEST(SelectTopKTest, Examples) {
  EXPECT_EQ(SelectTopK(std::vector<double>{3, 1, 2, 0}, 2), (std::vector<int>{0, 2}));
  EXPECT_EQ(SelectTopK(std::vector<double>{3, 1, 2, 0}, 4), (std::vector<int>{0, 2, 1, 3}));
  EXPECT_EQ(SelectTopK(std::vector<double>{1, 2, 2, 1}, 3), (std::vector<int>{1, 2, 0}));
  EXPECT_THROW(SelectTopK(std::vector<double>{1, 2}, 0), InvalidArgument);
  EXPECT_THROW(SelectTopK(std::vector<double>{1, 2}, 3), InvalidArgument);
}

TEST(SelectTopKTest, MatchesFullSortWithDuplicates) {
  Rng rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 60;
    std::vector<double> z(n);
    for (double& v : z) v = static_cast<double>(rng.UniformInt(-3, 3));
    const int k = static_cast<int>(rng.UniformInt(1, n));
    ASSERT_EQ(SelectTopK(z, k), SortTopK(z, k));
  }
}

TEST(TopKPosteriorTest, FullSelectionIsPlainSoftmax) {
  Rng rng(4);
  const auto z = RandomLogits(rng, 12);
  const TopKResult r = TopKPosterior(z, 12, 2.0);
  const auto q = SoftmaxT(z, 2.0);
  EXPECT_NEAR(r.emphasis, 1.0, 1e-15);
  for (int i = 0; i < 12; ++i) EXPECT_NEAR(r.probs[i], q[i], 1e-15);
}

TEST(TopKPosteriorTest, UniformLogits) {
  const std::vector<double> z(10, -1.5);
  const TopKResult r = TopKPosterior(z, 4, 1.7);
  EXPECT_NEAR(r.emphasis, 10.0 / 4.0, 1e-14);
  for (int i : r.selected) EXPECT_NEAR(r.probs[i], 0.25, 1e-15);
}

TEST(TopKPosteriorTest, WorkedExample) {
  const TopKResult r = TopKPosterior(std::vector<double>{3, 1, 2}, 2, 1.0);
  EXPECT_NEAR(r.probs[0], 0.7311, 5e-5);
  EXPECT_EQ(r.probs[1], 0.0);
  EXPECT_NEAR(r.probs[2], 0.2689, 5e-5);
  EXPECT_NEAR(r.emphasis, 1.0989, 5e-5);
  const double e = std::exp(1.0), e2 = e * e, e3 = e2 * e;
  EXPECT_NEAR(r.probs[0], e3 / (e3 + e2), 1e-15);
  EXPECT_NEAR(r.emphasis, (e3 + e + e2) / (e3 + e2), 1e-15);
}

TEST(TopKPosteriorTest, MaskedSoftmaxOracleAndProperties) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 50;
    const auto z = RandomLogits(rng, n);
    const int k = static_cast<int>(rng.UniformInt(1, n));
    const double t = std::vector<double>{0.5, 1.0, 2.0, 5.0}[trial % 4];
    const TopKResult r = TopKPosterior(z, k, t);
    const auto q = SoftmaxT(z, t);
    const auto sel = SortTopK(z, k);
    double kept = 0.0;
    for (int i : sel) kept += q[i];
    std::vector<double> want(n, 0.0);
    for (int i : sel) want[i] = q[i] / kept;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      ASSERT_NEAR(r.probs[i], want[i], 1e-12);
      sum += r.probs[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
    EXPECT_GE(r.emphasis, 1.0);
    EXPECT_NEAR(r.emphasis, 1.0 / kept, 1e-9 * r.emphasis);
    for (int i : sel) EXPECT_NEAR(r.probs[i], r.emphasis * q[i], 1e-12);
    for (std::size_t a = 1; a < sel.size(); ++a)
      EXPECT_NEAR(r.probs[sel[a]] / r.probs[sel[0]], q[sel[a]] / q[sel[0]], 1e-9);
    const int argmax = static_cast<int>(std::max_element(z.begin(), z.end()) - z.begin());
    EXPECT_EQ(std::max_element(r.probs.begin(), r.probs.end()) - r.probs.begin(), argmax);
  }
}

TEST(FloorConstantTest, DefaultPolicy) {
  const std::vector<double> z = {3, 1, 2};
  const std::vector<int> sel = {0, 2};
  EXPECT_EQ(DefaultFloorConstant(z, sel, 2.0), 2.0 - 100.0);
}

TEST(FloorConstantTest, WorkedExample) {
  const std::vector<double> z = {3, 1, 2};
  const auto c = TopKPosteriorC(z, 2, 1.0, -50.0);
  const auto r = TopKPosterior(z, 2, 1.0);
  for (int i : {0, 2}) EXPECT_NEAR(c[i], r.probs[i], 1e-12);
  const double e = std::exp(1.0);
  EXPECT_NEAR(c[1], std::exp(-50.0) / (std::exp(-50.0) + e * e * e + e * e), 1e-30);
  EXPECT_GT(c[1], 0.0);
}

TEST(FloorConstantTest, EqualLogitsGivePlainSoftmax) {
  const std::vector<double> z(5, 0.7);
  const auto c = TopKPosteriorC(z, 5, 1.0, 0.7);
  for (double p : c) EXPECT_NEAR(p, 0.2, 1e-15);
}

TEST(FloorConstantTest, AboveSelectedLogitIsRejected) {
  EXPECT_THROW(TopKPosteriorC(std::vector<double>{3, 1, 2}, 2, 1.0, 2.5), InvalidArgument);
}

TEST(FloorConstantTest, SuppressedMassShrinksAsCDecreases) {
  Rng rng(6);
  const auto z = RandomLogits(rng, 30);
  const auto sel = SortTopK(z, 5);
  double prev = 1.0;
  for (double c = z[sel.back()]; c > z[sel.back()] - 200.0; c -= 10.0) {
    const auto p = TopKPosteriorC(z, 5, 2.0, c);
    double suppressed = 0.0;
    for (int i = 0; i < 30; ++i)
      if (std::find(sel.begin(), sel.end(), i) == sel.end()) suppressed += p[i];
    EXPECT_LT(suppressed, prev);
    prev = suppressed;
  }
}

TEST(FloorConstantTest, EmphasisFactorBound) {
  const std::vector<double> z = {3, 1, 2};
  EXPECT_GE(EmphasisFactorC(z, 2, 1.0, -50.0), 1.0);
}

TEST(SparseFrameTest, RoundsThenSelects) {
  const std::vector<double> z = {0.1, 0.3, 0.2, 0.3};
  const SparseFrame f = MakeSparseFrame(z, 3);
  ASSERT_EQ(f.entries.size(), 3u);
  EXPECT_EQ(f.entries[0].index, 1);
  EXPECT_EQ(f.entries[1].index, 3);
  EXPECT_EQ(f.entries[2].index, 2);
  EXPECT_EQ(f.entries[0].logit, 0.3f);
  EXPECT_EQ(CheckSparseFrame(f, 4), "");
  EXPECT_NE(CheckSparseFrame(f, 3), "");
}

TEST(SparseFrameTest, SparsePosteriorMatchesTopK) {
  Rng rng(7);
  std::vector<double> z = RandomLogits(rng, 20);
  for (double& v : z) v = static_cast<float>(v);
  const SparseFrame f = MakeSparseFrame(z, 6);
  const auto p = SparsePosterior(f, 2.0);
  const auto r = TopKPosterior(z, 6, 2.0);
  for (std::size_t j = 0; j < f.entries.size(); ++j) EXPECT_NEAR(p[j], r.probs[f.entries[j].index], 1e-15);
}

TEST(SparseFrameTest, CheckFindsViolations) {
  SparseFrame f;
  EXPECT_NE(CheckSparseFrame(f, 4), "");
  f.entries = {{1, 0.5f}, {2, 0.7f}};
  EXPECT_NE(CheckSparseFrame(f, 4), "");
  f.entries = {{1, 0.7f}, {1, 0.5f}};
  EXPECT_NE(CheckSparseFrame(f, 4), "");
  f.entries = {{2, 0.7f}, {1, 0.7f}};
  EXPECT_NE(CheckSparseFrame(f, 4), "");
  f.entries = {{1, 0.7f}, {2, 0.7f}};
  EXPECT_EQ(CheckSparseFrame(f, 4), "");
}

}  // namespace
}  // namespace tsda::codec
