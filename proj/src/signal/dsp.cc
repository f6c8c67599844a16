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

#include "tsda/signal/dsp.h"

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "tsda/common/error.h"
#include "tsda/common/fft.h"

namespace tsda::signal {
namespace {

void ConvolveDirect(std::span<const double> x, std::span<const double> h,
                    std::span<double> y) {
  for (std::size_t n = 0; n < y.size(); ++n) {
    double acc = 0.0;
    const std::size_t kmax = std::min(h.size(), n + 1);
    for (std::size_t k = 0; k < kmax; ++k) acc += h[k] * x[n - k];
    y[n] = acc;
  }
}

void ConvolveFft(std::span<const double> x, std::span<const double> h,
                 std::span<double> y) {
  int size = 1;
  while (static_cast<std::size_t>(size) < x.size() + h.size() - 1) size <<= 1;
  RealFft fft(size);
  std::vector<std::complex<double>> xs(fft.num_bins()), hs(fft.num_bins());
  fft.Forward(x, xs);
  fft.Forward(h, hs);
  for (int i = 0; i < fft.num_bins(); ++i) xs[i] *= hs[i];
  std::vector<double> full(size);
  fft.Inverse(xs, full);
  const double scale = 1.0 / size;
  for (std::size_t n = 0; n < y.size(); ++n) y[n] = full[n] * scale;
}

}  // namespace

AudioBuffer Convolve(const AudioBuffer& signal, const ImpulseResponse& ir,
                     ConvolutionMethod method) {
  if (signal.sample_rate != ir.sample_rate)
    throw InvalidArgument("convolve: sample rate mismatch (" +
                          std::to_string(signal.sample_rate) + " vs " +
                          std::to_string(ir.sample_rate) + ")");
  if (ir.taps.empty()) throw InvalidArgument("convolve: empty impulse response");
  AudioBuffer out;
  out.sample_rate = signal.sample_rate;
  out.samples.assign(signal.size(), 0.0);
  if (signal.empty()) return out;
  if (method == ConvolutionMethod::kAuto)
    method = ir.taps.size() <= 64 ? ConvolutionMethod::kDirect
                                  : ConvolutionMethod::kFft;
  if (method == ConvolutionMethod::kDirect)
    ConvolveDirect(signal.samples, ir.taps, out.samples);
  else
    ConvolveFft(signal.samples, ir.taps, out.samples);
  return out;
}

std::vector<double> LoopToLength(std::span<const double> noise, std::size_t length,
                                 std::size_t offset) {
  if (noise.empty()) throw InvalidArgument("loop: empty noise");
  std::vector<double> out(length);
  for (std::size_t i = 0; i < length; ++i) out[i] = noise[(offset + i) % noise.size()];
  return out;
}

double SnrGain(double clean_power, double noise_power, double snr_db) {
  return std::sqrt(clean_power / (noise_power * std::pow(10.0, snr_db / 10.0)));
}

AudioBuffer MixAtSnr(const AudioBuffer& clean, std::span<const AudioBuffer> noises,
                     double snr_db) {
  if (noises.empty()) throw InvalidArgument("mix: at least one noise is required");
  if (!std::isfinite(snr_db)) throw InvalidArgument("mix: non-finite snr");
  const double clean_power = MeanPower(clean.samples);
  if (!(clean_power > 0.0))
    throw InvalidArgument("mix: clean signal has zero power, SNR undefined");
  std::vector<double> sum(clean.size(), 0.0);
  for (const AudioBuffer& noise : noises) {
    if (noise.sample_rate != clean.sample_rate)
      throw InvalidArgument("mix: sample rate mismatch");
    if (!(MeanPower(noise.samples) > 0.0))
      throw InvalidArgument("mix: noise has zero power, SNR undefined");
    const std::vector<double> looped = LoopToLength(noise.samples, clean.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += looped[i];
  }
  const double noise_power = MeanPower(sum);
  if (!(noise_power > 0.0))
    throw InvalidArgument("mix: noises cancel to zero power, SNR undefined");
  const double g = SnrGain(clean_power, noise_power, snr_db);
  AudioBuffer out = clean;
  for (std::size_t i = 0; i < sum.size(); ++i) out.samples[i] += g * sum[i];
  return out;
}

double MeasureSnrDb(const AudioBuffer& clean, const AudioBuffer& mixture) {
  if (clean.size() != mixture.size())
    throw InvalidArgument("snr: length mismatch");
  std::vector<double> residual(clean.size());
  for (std::size_t i = 0; i < residual.size(); ++i)
    residual[i] = mixture.samples[i] - clean.samples[i];
  return 10.0 * std::log10(MeanPower(clean.samples) / MeanPower(residual));
}

}  // namespace tsda::signal
