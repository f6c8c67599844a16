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

#include "tsda/features/lfbe.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>

#include "tsda/common/binary_io.h"
#include "tsda/common/error.h"
#include "tsda/common/fft.h"

namespace tsda::features {
namespace {

int ToSamples(double seconds, int sample_rate) {
  return static_cast<int>(std::lround(seconds * sample_rate));
}

}  // namespace

signal::FrameLayout LayoutFor(const FrontEndConfig& cfg, int sample_rate) {
  return {ToSamples(cfg.win_s, sample_rate), ToSamples(cfg.hop_s, sample_rate)};
}

FrameMatrix StftPower(const signal::AudioBuffer& audio, double win_s, double hop_s,
                      int n_fft) {
  signal::Validate(audio);
  const int win = ToSamples(win_s, audio.sample_rate);
  const int hop = ToSamples(hop_s, audio.sample_rate);
  if (hop <= 0) throw InvalidArgument("stft: hop must be positive");
  if (win <= 0 || win > n_fft) throw InvalidArgument("stft: window must fit in n_fft");
  const std::size_t frames = signal::FrameCount(audio.size(), {win, hop});
  const int bins = n_fft / 2 + 1;
  FrameMatrix out(frames, static_cast<std::size_t>(bins));
  if (frames == 0) return out;

  std::vector<double> window(static_cast<std::size_t>(win));
  for (int n = 0; n < win; ++n)
    window[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / win);
  RealFft fft(n_fft);
  std::vector<double> frame(static_cast<std::size_t>(win));
  std::vector<std::complex<double>> spec(static_cast<std::size_t>(bins));
  for (std::size_t t = 0; t < frames; ++t) {
    const double* src = audio.samples.data() + t * static_cast<std::size_t>(hop);
    for (int n = 0; n < win; ++n) frame[n] = src[n] * window[n];
    fft.Forward(frame, spec);
    auto row = out.row(t);
    for (int k = 0; k < bins; ++k) row[k] = std::norm(spec[k]);
  }
  return out;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double MelToHz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelBank MakeMelBank(int sample_rate, int n_fft, int n_mels, double fmin, double fmax) {
  if (n_mels < 1) throw InvalidArgument("mel bank: n_mels must be >= 1");
  if (n_fft < 2) throw InvalidArgument("mel bank: n_fft must be >= 2");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= 0.5 * sample_rate))
    throw InvalidArgument("mel bank: need 0 <= fmin < fmax <= fs/2");
  const int bins = n_fft / 2 + 1;
  MelBank bank;
  bank.fmin = fmin;
  bank.fmax = fmax;
  bank.filters = FrameMatrix(static_cast<std::size_t>(n_mels), static_cast<std::size_t>(bins));
  const double mel_lo = HzToMel(fmin), mel_hi = HzToMel(fmax);
  std::vector<double> edges(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));
  for (int m = 0; m < n_mels; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    bank.center_hz.push_back(mid);
    double total = 0.0;
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * sample_rate / n_fft;
      double w = 0.0;
      if (f > lo && f <= mid) w = (f - lo) / (mid - lo);
      else if (f > mid && f < hi) w = (hi - f) / (hi - mid);
      bank.filters(m, k) = w;
      total += w;
    }
    if (!(total > 0.0))
      throw InvalidArgument("mel bank: filter " + std::to_string(m) +
                            " covers no FFT bin; increase n_fft or reduce n_mels");
  }
  return bank;
}

FeatureMatrix Lfbe(const signal::AudioBuffer& audio, const MelBank& bank, double win_s,
                   double hop_s, int n_fft) {
  const FrameMatrix power = StftPower(audio, win_s, hop_s, n_fft);
  if (power.cols != bank.filters.cols)
    throw InvalidArgument("lfbe: mel bank does not match n_fft");
  FeatureMatrix feats;
  feats.frame_shift_s = hop_s;
  feats.frame_length_s = win_s;
  feats.values = FrameMatrix(power.rows, bank.filters.rows);
  for (std::size_t t = 0; t < power.rows; ++t) {
    const auto p = power.row(t);
    for (std::size_t m = 0; m < bank.filters.rows; ++m) {
      const auto w = bank.filters.row(m);
      double e = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) e += w[k] * p[k];
      feats.values(t, m) = std::log(std::max(e, kLogFloor));
    }
  }
  return feats;
}

FeatureMatrix Lfbe(const signal::AudioBuffer& audio, const FrontEndConfig& cfg) {
  const MelBank bank = MakeMelBank(audio.sample_rate, cfg.n_fft, cfg.n_mels, cfg.fmin, cfg.fmax);
  return Lfbe(audio, bank, cfg.win_s, cfg.hop_s, cfg.n_fft);
}

void WriteFeatures(std::ostream& os, const FeatureMatrix& feats) {
  if (feats.dim() > 0xffff) throw InvalidArgument("lfbe file: too many dimensions");
  BinaryWriter w(os);
  w.Bytes("LFBE");
  w.U16(1);
  w.U16(static_cast<std::uint16_t>(feats.dim()));
  w.U32(static_cast<std::uint32_t>(feats.num_frames()));
  for (double v : feats.values.data) w.F32(static_cast<float>(v));
  if (!w.good()) throw IoError("lfbe file: write failed");
}

void WriteFeatures(const std::filesystem::path& path, const FeatureMatrix& feats) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("lfbe file: cannot open " + path.string());
  WriteFeatures(os, feats);
}

FeatureMatrix ReadFeatures(std::istream& is) {
  BinaryReader r(is);
  std::string magic;
  std::uint16_t version = 0, dims = 0;
  std::uint32_t frames = 0;
  if (!r.Bytes(magic, 4) || magic != "LFBE") throw IoError("lfbe file: bad magic");
  if (!r.U16(version) || !r.U16(dims) || !r.U32(frames))
    throw IoError("lfbe file: truncated header");
  if (version != 1) throw IoError("lfbe file: unsupported version " + std::to_string(version));
  FeatureMatrix feats;
  feats.values = FrameMatrix(frames, dims);
  for (double& v : feats.values.data) {
    float f;
    if (!r.F32(f)) throw IoError("lfbe file: truncated body");
    v = f;
  }
  return feats;
}

FeatureMatrix ReadFeatures(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("lfbe file: cannot open " + path.string());
  return ReadFeatures(is);
}

}  // namespace tsda::features
