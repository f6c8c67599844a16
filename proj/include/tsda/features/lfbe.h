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

#ifndef TSDA_FEATURES_LFBE_H_
#define TSDA_FEATURES_LFBE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "tsda/common/frame_matrix.h"
#include "tsda/signal/audio.h"
#include "tsda/signal/corpus.h"

namespace tsda::features {

using tsda::FrameMatrix;

struct FeatureMatrix {
  FrameMatrix values;  // frames x n_mels
  double frame_shift_s = 0.010;
  double frame_length_s = 0.025;

  std::size_t num_frames() const { return values.rows; }
  std::size_t dim() const { return values.cols; }
};

struct FrontEndConfig {
  double win_s = 0.025;
  double hop_s = 0.010;
  int n_fft = 512;
  int n_mels = 64;
  double fmin = 20.0;
  double fmax = 7600.0;
};

/// Window and hop in samples at the given rate.
signal::FrameLayout LayoutFor(const FrontEndConfig& cfg, int sample_rate);

/// Hann-windowed power spectra, n_fft/2 + 1 bins per frame.
FrameMatrix StftPower(const signal::AudioBuffer& audio, double win_s, double hop_s,
                      int n_fft);

double HzToMel(double hz);
double MelToHz(double mel);

struct MelBank {
  FrameMatrix filters;  // n_mels x (n_fft/2 + 1)
  std::vector<double> center_hz;
  double fmin = 0.0;
  double fmax = 0.0;
};

/// Triangular filters with centres uniform on the mel scale.
MelBank MakeMelBank(int sample_rate, int n_fft, int n_mels, double fmin, double fmax);

inline constexpr double kLogFloor = 1e-10;

FeatureMatrix Lfbe(const signal::AudioBuffer& audio, const MelBank& bank, double win_s,
                   double hop_s, int n_fft);

/// Convenience wrapper building the bank from `cfg`.
FeatureMatrix Lfbe(const signal::AudioBuffer& audio, const FrontEndConfig& cfg);

// LFBE file: magic "LFBE", u16 version = 1, u16 n_dims, u32 n_frames, then
// row-major little-endian f32. Values are rounded to f32 on write.
void WriteFeatures(std::ostream& os, const FeatureMatrix& feats);
void WriteFeatures(const std::filesystem::path& path, const FeatureMatrix& feats);
FeatureMatrix ReadFeatures(std::istream& is);
FeatureMatrix ReadFeatures(const std::filesystem::path& path);

}  // namespace tsda::features

#endif  // TSDA_FEATURES_LFBE_H_
