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
#include <complex>
#include <numbers>
#include <sstream>

#include "tsda/common/error.h"
#include "tsda/common/rng.h"
#include "tsda/features/lfbe.h"

namespace tsda::features {
namespace {

signal::AudioBuffer Audio(std::vector<double> samples, int fs = 16000) {
  signal::AudioBuffer a;
  a.samples = std::move(samples);
  a.sample_rate = fs;
  return a;
}

signal::AudioBuffer RandomAudio(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.Uniform(-0.5, 0.5);
  return Audio(std::move(x));
}

// Straightforward recomputation: explicit Hann window, O(n^2) DFT, and
// triangular weights evaluated from the mel formula.
FrameMatrix NaiveLfbe(const signal::AudioBuffer& a, int win, int hop, int n_fft, int n_mels,
                      double fmin, double fmax) {
  const int fs = a.sample_rate;
  const std::size_t frames = a.size() < static_cast<std::size_t>(win) ? 0 : 1 + (a.size() - win) / hop;
  const int bins = n_fft / 2 + 1;
  auto mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto inv = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  std::vector<double> edge(n_mels + 2);
  for (int i = 0; i < n_mels + 2; ++i) edge[i] = inv(mel(fmin) + (mel(fmax) - mel(fmin)) * i / (n_mels + 1));
  FrameMatrix out(frames, n_mels);
  for (std::size_t t = 0; t < frames; ++t) {
    std::vector<double> power(bins);
    for (int k = 0; k < bins; ++k) {
      std::complex<double> acc = 0.0;
      for (int n = 0; n < win; ++n) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / win));
        acc += a.samples[t * hop + n] * w * std::exp(std::complex<double>(0.0, -2.0 * std::numbers::pi * k * n / n_fft));
      }
      power[k] = std::norm(acc);
    }
    for (int m = 0; m < n_mels; ++m) {
      double e = 0.0;
      for (int k = 0; k < bins; ++k) {
        const double f = static_cast<double>(k) * fs / n_fft;
        double w = 0.0;
        if (f > edge[m] && f <= edge[m + 1]) w = (f - edge[m]) / (edge[m + 1] - edge[m]);
        else if (f > edge[m + 1] && f < edge[m + 2]) w = (edge[m + 2] - f) / (edge[m + 2] - edge[m + 1]);
        e += w * power[k];
      }
      out(t, m) = std::log(std::max(e, 1e-10));
    }
  }
  return out;
}

TEST(StftTest, ZeroSignalGivesZeroSpectra) {
  const FrameMatrix p = StftPower(Audio(std::vector<double>(1000, 0.0)), 0.025, 0.010, 512);
  ASSERT_EQ(p.rows, 4u);
  ASSERT_EQ(p.cols, 257u);
  for (double v : p.data) EXPECT_EQ(v, 0.0);
}

TEST(StftTest, FrameCounts) {
  EXPECT_EQ(StftPower(Audio(std::vector<double>(400, 0.1)), 0.025, 0.010, 512).rows, 1u);
  EXPECT_EQ(StftPower(Audio(std::vector<double>(399, 0.1)), 0.025, 0.010, 512).rows, 0u);
  EXPECT_EQ(StftPower(Audio(std::vector<double>(1000, 0.1)), 0.025, 0.010, 512).rows, 4u);
}

TEST(StftTest, BinCentredSineHasItsPeakBin) {
  const int fs = 16000, n_fft = 512, bin = 37;
  std::vector<double> x(4000);
  for (std::size_t n = 0; n < x.size(); ++n)
    x[n] = std::sin(2.0 * std::numbers::pi * bin * fs / n_fft * n / fs);
  const FrameMatrix p = StftPower(Audio(x), 0.025, 0.010, n_fft);
  for (std::size_t t = 0; t < p.rows; ++t) {
    const auto row = p.row(t);
    EXPECT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), bin);
  }
}

TEST(StftTest, WindowLongerThanFftIsRejected) {
  EXPECT_THROW(StftPower(Audio(std::vector<double>(1000, 0.0)), 0.05, 0.01, 512), InvalidArgument);
}

TEST(MelTest, ScaleAnchors) {
  EXPECT_EQ(HzToMel(0.0), 0.0);
  EXPECT_NEAR(HzToMel(700.0), 2595.0 * std::log10(2.0), 1e-12);
  EXPECT_NEAR(HzToMel(700.0), 781.17, 5e-3);
  EXPECT_NEAR(MelToHz(HzToMel(1234.5)), 1234.5, 1e-9);
}

TEST(MelBankTest, DefaultBankInvariants) {
  const FrontEndConfig fe;
  EXPECT_EQ(fe.n_mels, 64);
  const MelBank bank = MakeMelBank(16000, fe.n_fft, fe.n_mels, fe.fmin, fe.fmax);
  ASSERT_EQ(bank.filters.rows, 64u);
  ASSERT_EQ(bank.filters.cols, 257u);
  for (std::size_t m = 0; m < bank.filters.rows; ++m) {
    const auto row = bank.filters.row(m);
    double total = 0.0;
    for (double w : row) {
      EXPECT_GE(w, 0.0);
      total += w;
    }
    EXPECT_GT(total, 0.0);
    // Unimodal: non-decreasing up to the peak, non-increasing after it.
    const auto peak = std::max_element(row.begin(), row.end()) - row.begin();
    for (long k = 1; k <= peak; ++k) EXPECT_GE(row[k], row[k - 1]);
    for (std::size_t k = peak + 1; k < row.size(); ++k) EXPECT_LE(row[k], row[k - 1]);
    if (m > 0) {
      EXPECT_GT(bank.center_hz[m], bank.center_hz[m - 1]);
    }
  }
}

TEST(MelBankTest, InvalidEdgesAreRejected) {
  EXPECT_THROW(MakeMelBank(16000, 512, 64, 100.0, 50.0), InvalidArgument);
  EXPECT_THROW(MakeMelBank(16000, 512, 64, 0.0, 9000.0), InvalidArgument);
  EXPECT_THROW(MakeMelBank(16000, 512, 0, 0.0, 8000.0), InvalidArgument);
  EXPECT_THROW(MakeMelBank(16000, 16, 64, 0.0, 8000.0), InvalidArgument);
}

TEST(LfbeTest, ZeroSignalIsAtTheFloor) {
  const FeatureMatrix f = Lfbe(Audio(std::vector<double>(2000, 0.0)), FrontEndConfig{});
  ASSERT_EQ(f.dim(), 64u);
  for (double v : f.values.data) EXPECT_EQ(v, std::log(1e-10));
}

TEST(LfbeTest, DoublingAmplitudeAddsLogFour) {
  const signal::AudioBuffer a = RandomAudio(3000, 1);
  signal::AudioBuffer b = a;
  for (double& v : b.samples) v *= 2.0;
  const FeatureMatrix fa = Lfbe(a, FrontEndConfig{}), fb = Lfbe(b, FrontEndConfig{});
  for (std::size_t i = 0; i < fa.values.data.size(); ++i) {
    ASSERT_GT(fa.values.data[i], std::log(1e-10));
    EXPECT_NEAR(fb.values.data[i] - fa.values.data[i], std::log(4.0), 1e-9);
  }
}

TEST(LfbeTest, MatchesNaiveRecomputation) {
  const signal::AudioBuffer a = RandomAudio(1600, 2);
  const FrontEndConfig fe;
  const FeatureMatrix f = Lfbe(a, fe);
  const FrameMatrix want = NaiveLfbe(a, 400, 160, fe.n_fft, fe.n_mels, fe.fmin, fe.fmax);
  ASSERT_EQ(f.values.rows, want.rows);
  for (std::size_t i = 0; i < want.data.size(); ++i) EXPECT_NEAR(f.values.data[i], want.data[i], 1e-9);
}

TEST(LfbeTest, IsDeterministicAndFinite) {
  const signal::AudioBuffer a = RandomAudio(5000, 3);
  const FeatureMatrix f1 = Lfbe(a, FrontEndConfig{}), f2 = Lfbe(a, FrontEndConfig{});
  EXPECT_EQ(f1.values, f2.values);
  for (double v : f1.values.data) EXPECT_TRUE(std::isfinite(v));
}

TEST(LfbeFileTest, LayoutAndRoundTrip) {
  FeatureMatrix f;
  f.values = FrameMatrix(2, 3);
  for (std::size_t i = 0; i < 6; ++i) f.values.data[i] = 0.25 * i - 0.1;
  std::stringstream ss;
  WriteFeatures(ss, f);
  const std::string bytes = ss.str();
  ASSERT_EQ(bytes.size(), 4u + 2 + 2 + 4 + 6 * 4);
  EXPECT_EQ(bytes.substr(0, 12), std::string("LFBE\x01\x00\x03\x00\x02\x00\x00\x00", 12));
  const FeatureMatrix g = ReadFeatures(ss);
  ASSERT_EQ(g.values.rows, 2u);
  ASSERT_EQ(g.values.cols, 3u);
  for (std::size_t i = 0; i < 6; ++i)
    EXPECT_EQ(g.values.data[i], static_cast<double>(static_cast<float>(f.values.data[i])));
}

TEST(LfbeFileTest, RejectsCorruptStreams) {
  std::istringstream bad_magic(std::string("LFBX\x01\x00\x01\x00\x00\x00\x00\x00", 12));
  EXPECT_THROW(ReadFeatures(bad_magic), IoError);
  std::istringstream truncated(std::string("LFBE\x01\x00\x01\x00\x02\x00\x00\x00\x00\x00", 14));
  EXPECT_THROW(ReadFeatures(truncated), IoError);
}

}  // namespace
}  // namespace tsda::features
