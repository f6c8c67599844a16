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

#ifndef TSDA_SIGNAL_AUDIO_H_
#define TSDA_SIGNAL_AUDIO_H_

#include <span>
#include <vector>

namespace tsda::signal {

/// Mono waveform. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = 16000;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// Throws InvalidArgument unless sample_rate > 0 and every sample is finite.
void Validate(const AudioBuffer& audio);

/// Mean squared amplitude over the whole buffer; 0 for an empty buffer.
double MeanPower(std::span<const double> samples);

}  // namespace tsda::signal

#endif  // TSDA_SIGNAL_AUDIO_H_
