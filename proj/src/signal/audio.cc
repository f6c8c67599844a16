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

#include "tsda/signal/audio.h"

#include <cmath>

#include "tsda/common/error.h"

namespace tsda::signal {

void Validate(const AudioBuffer& audio) {
  if (audio.sample_rate <= 0)
    throw InvalidArgument("audio: sample rate must be positive");
  for (double s : audio.samples)
    if (!std::isfinite(s)) throw InvalidArgument("audio: non-finite sample");
}

double MeanPower(std::span<const double> samples) {
  if (samples.empty()) return 0.0;
  double acc = 0.0;
  for (double s : samples) acc += s * s;
  return acc / static_cast<double>(samples.size());
}

}  // namespace tsda::signal
