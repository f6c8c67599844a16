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

#ifndef TSDA_SIGNAL_DSP_H_
#define TSDA_SIGNAL_DSP_H_

#include <span>

#include "tsda/signal/audio.h"
#include "tsda/signal/room.h"

namespace tsda::signal {

enum class ConvolutionMethod { kAuto, kDirect, kFft };

/// Linear convolution of `signal` with `ir`, truncated to the input length.
/// kAuto picks the direct sum for short responses and FFT otherwise.
AudioBuffer Convolve(const AudioBuffer& signal, const ImpulseResponse& ir,
                     ConvolutionMethod method = ConvolutionMethod::kAuto);

/// Sums `noises` (each looped or truncated to the clean length), scales the
/// sum so that 10 log10(P_clean / P_scaled_noise) == snr_db, and adds it to
/// `clean`. P is the mean squared amplitude over the whole utterance.
AudioBuffer MixAtSnr(const AudioBuffer& clean, std::span<const AudioBuffer> noises,
                     double snr_db);

/// The gain MixAtSnr applies to the noise sum.
double SnrGain(double clean_power, double noise_power, double snr_db);

/// 10 log10(P_clean / P_(mixture - clean)).
double MeasureSnrDb(const AudioBuffer& clean, const AudioBuffer& mixture);

/// Repeats `noise` cyclically from `offset` until `length` samples are filled.
std::vector<double> LoopToLength(std::span<const double> noise, std::size_t length,
                                 std::size_t offset = 0);

}  // namespace tsda::signal

#endif  // TSDA_SIGNAL_DSP_H_
