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

#include "tsda/signal/wav.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "tsda/common/binary_io.h"
#include "tsda/common/error.h"

namespace tsda::signal {
namespace {

std::int16_t ToPcm(double s) {
  const double v = std::round(s * 32768.0);
  return static_cast<std::int16_t>(std::clamp(v, -32768.0, 32767.0));
}

}  // namespace

void QuantizeToPcm16(AudioBuffer& audio) {
  for (double& s : audio.samples) s = ToPcm(s) / 32768.0;
}

void WriteWav(std::ostream& os, const AudioBuffer& audio) {
  Validate(audio);
  const auto data_bytes = static_cast<std::uint32_t>(audio.size() * 2);
  BinaryWriter w(os);
  w.Bytes("RIFF");
  w.U32(36 + data_bytes);
  w.Bytes("WAVE");
  w.Bytes("fmt ");
  w.U32(16);
  w.U16(1);  // PCM
  w.U16(1);  // mono
  w.U32(static_cast<std::uint32_t>(audio.sample_rate));
  w.U32(static_cast<std::uint32_t>(audio.sample_rate) * 2);
  w.U16(2);
  w.U16(16);
  w.Bytes("data");
  w.U32(data_bytes);
  for (double s : audio.samples) w.I16(ToPcm(s));
  if (!w.good()) throw IoError("wav: write failed");
}

void WriteWav(const std::filesystem::path& path, const AudioBuffer& audio) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("wav: cannot open " + path.string());
  WriteWav(os, audio);
}

AudioBuffer ReadWav(std::istream& is) {
  BinaryReader r(is);
  std::string tag;
  std::uint32_t riff_size = 0;
  if (!r.Bytes(tag, 4) || tag != "RIFF" || !r.U32(riff_size) ||
      !r.Bytes(tag, 4) || tag != "WAVE")
    throw IoError("wav: not a RIFF/WAVE stream");
  AudioBuffer audio;
  bool have_fmt = false;
  while (true) {
    std::uint32_t chunk_size = 0;
    if (!r.Bytes(tag, 4) || !r.U32(chunk_size))
      throw IoError("wav: missing data chunk");
    if (tag == "fmt ") {
      std::uint16_t format = 0, channels = 0, align = 0, bits = 0;
      std::uint32_t rate = 0, byte_rate = 0;
      if (!r.U16(format) || !r.U16(channels) || !r.U32(rate) ||
          !r.U32(byte_rate) || !r.U16(align) || !r.U16(bits))
        throw IoError("wav: truncated fmt chunk");
      if (format != 1 || channels != 1 || bits != 16)
        throw IoError("wav: only 16-bit PCM mono is supported");
      std::string skip;
      if (chunk_size > 16 && !r.Bytes(skip, chunk_size - 16))
        throw IoError("wav: truncated fmt chunk");
      audio.sample_rate = static_cast<int>(rate);
      have_fmt = true;
    } else if (tag == "data") {
      if (!have_fmt) throw IoError("wav: data chunk before fmt chunk");
      audio.samples.resize(chunk_size / 2);
      for (double& s : audio.samples) {
        std::int16_t v;
        if (!r.I16(v)) throw IoError("wav: truncated data chunk");
        s = v / 32768.0;
      }
      return audio;
    } else {
      std::string skip;
      if (!r.Bytes(skip, chunk_size + (chunk_size & 1)))
        throw IoError("wav: truncated chunk " + tag);
    }
  }
}

AudioBuffer ReadWav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("wav: cannot open " + path.string());
  return ReadWav(is);
}

}  // namespace tsda::signal
