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

#ifndef TSDA_SIGNAL_CORPUS_H_
#define TSDA_SIGNAL_CORPUS_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "tsda/common/rng.h"
#include "tsda/signal/audio.h"
#include "tsda/signal/room.h"

namespace tsda::signal {

/// Acoustic simulation ranges. Every per-utterance quantity is drawn
/// uniformly from these.
struct SimConfig {
  std::pair<double, double> snr_range_db{0.0, 30.0};
  std::pair<double, double> t60_range_s{0.5, 0.9};
  std::pair<int, int> noises_per_utt{1, 3};
  std::array<std::pair<double, double>, 3> room_dim_ranges{
      {{4.0, 8.0}, {3.0, 6.0}, {2.5, 3.5}}};
  std::uint64_t seed = 0;
  int sample_rate = 16000;
  int max_order_cap = 60;
  int noise_bank_size = 32;
  double noise_length_s = 2.0;
  double speed_of_sound = 343.0;
};

void Validate(const SimConfig& sim);

/// Framing used to derive frame labels; must match the feature front end.
struct FrameLayout {
  int frame_length = 400;  // samples
  int frame_shift = 160;
};

/// Number of analysis frames of a signal: 1 + floor((len - win) / hop) when
/// len >= win, else 0.
std::size_t FrameCount(std::size_t num_samples, const FrameLayout& layout);

struct CorpusSpec {
  SimConfig sim;
  int n_utts = 0;
  int n_classes = 2;
  FrameLayout frames;
  std::pair<int, int> tokens_per_utt{3, 6};
  std::pair<int, int> segment_frames{8, 16};
  std::string id_prefix = "utt";
  /// 0 for the base corpus. Copy c > 0 keeps every clean utterance and
  /// re-draws room, noises and SNR from an independent stream.
  int copy_index = 0;
  int jobs = 1;
};

struct UtteranceRecord {
  std::string id;
  AudioBuffer clean;  // dry, un-reverberated
  AudioBuffer noisy;  // reverberated and mixed
  std::vector<std::uint16_t> frame_labels;
  std::vector<std::uint16_t> token_refs;
};

/// Per-utterance simulation parameters, one manifest line each.
struct UtteranceMeta {
  std::string id;
  double snr_db = 0.0;
  double t60_s = 0.0;
  std::vector<std::string> noise_ids;
  Vec3 room_dims{};
};

struct NoiseClip {
  std::string id;
  AudioBuffer audio;
};

struct Corpus {
  std::vector<UtteranceRecord> records;
  std::vector<UtteranceMeta> meta;
  std::vector<std::string> noise_bank_ids;
};

/// Spectral identity of a class: fundamental and two formant-like peaks.
struct ClassVoice {
  double f0 = 0.0;
  double formant1 = 0.0;
  double formant2 = 0.0;
};

ClassVoice VoiceForClass(int class_index);

/// Deterministic "multimedia" noise bank derived from sim.seed: tonal
/// music-like mixtures with tremolo plus coloured broadband noise.
std::vector<NoiseClip> GenerateNoiseBank(const SimConfig& sim);

/// Pure function of the spec: same spec, bit-identical corpus. Records are
/// quantized to the 16-bit WAV grid so in-memory and on-disk audio agree.
Corpus GenerateCorpus(const CorpusSpec& spec);

struct CorpusWriteOptions {
  bool clean_audio = true;
  bool noisy_audio = true;
  bool labels = true;
};

// On-disk layout: manifest.jsonl, noise_bank.json and, as selected,
// wav/<id>.clean.wav, wav/<id>.noisy.wav, labels/<id>.lbl. Paths of files
// not written are empty strings in the manifest.
void WriteCorpus(const std::filesystem::path& dir, const Corpus& corpus,
                 const CorpusWriteOptions& options = {});

struct ManifestEntry {
  std::string id;
  std::string clean_path;
  std::string noisy_path;
  double snr_db = 0.0;
  double t60_s = 0.0;
  std::vector<std::string> noise_ids;
  Vec3 room_dims{};
  std::string label_path;
};

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path);

// LBL1: magic "LBL1", u32 frame count, u16 class indices, little-endian.
void WriteLabels(const std::filesystem::path& path,
                 const std::vector<std::uint16_t>& labels);
std::vector<std::uint16_t> ReadLabels(const std::filesystem::path& path);

}  // namespace tsda::signal

#endif  // TSDA_SIGNAL_CORPUS_H_
