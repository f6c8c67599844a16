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

#ifndef TSDA_SIGNAL_WAV_H_
#define TSDA_SIGNAL_WAV_H_

#include <filesystem>
#include <iosfwd>

#include "tsda/signal/audio.h"

namespace tsda::signal {

// RIFF/WAVE, PCM 16-bit little-endian, mono. A sample s is stored as
// round(32768 s) saturated to [-32768, 32767] and read back as v / 32768.

void WriteWav(std::ostream& os, const AudioBuffer& audio);
void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio);
AudioBuffer ReadWav(std::istream& is);
AudioBuffer ReadWav(const std::filesystem::path& path);

/// Rounds every sample to the nearest value representable in the WAV
/// output, i.e. ReadWav(WriteWav(QuantizeToPcm16(x))) == QuantizeToPcm16(x).
void QuantizeToPcm16(AudioBuffer& audio);

}  // namespace tsda::signal

#endif  // TSDA_SIGNAL_WAV_H_
