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

#include "tsda/signal/corpus.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "json.hpp"

#include "tsda/common/binary_io.h"
#include "tsda/common/error.h"
#include "tsda/common/parallel.h"
#include "tsda/signal/dsp.h"
#include "tsda/signal/wav.h"

namespace tsda::signal {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Radical inverse in the given base; used to spread formant pairs.
double Halton(int index, int base) {
  double f = 1.0, r = 0.0;
  for (int i = index; i > 0; i /= base) {
    f /= base;
    r += f * (i % base);
  }
  return r;
}

double SpectralEnvelope(double f, const ClassVoice& v) {
  const double b1 = 90.0 + 0.08 * v.formant1;
  const double b2 = 130.0 + 0.06 * v.formant2;
  const double p1 = (f - v.formant1) / b1;
  const double p2 = (f - v.formant2) / b2;
  return std::exp(-0.5 * p1 * p1) + 0.6 * std::exp(-0.5 * p2 * p2) +
         0.03 / (1.0 + f / 1000.0);
}

// Harmonic stack with a fixed fundamental; oscillators advance by complex
// rotation rather than per-sample sin().
void AddHarmonicStack(std::span<double> out, double f0, int sample_rate,
                      const ClassVoice& envelope_voice, Rng& rng) {
  const double fmax = std::min(0.5 * sample_rate - 400.0, 6000.0);
  for (int h = 1; h * f0 < fmax; ++h) {
    const double f = h * f0;
    const double amp = SpectralEnvelope(f, envelope_voice);
    std::complex<double> z = std::polar(amp, kTwoPi * rng.Uniform());
    const std::complex<double> w = std::polar(1.0, kTwoPi * f / sample_rate);
    for (double& s : out) {
      s += z.imag();
      z *= w;
    }
  }
}

void ApplyRamps(std::span<double> seg, std::size_t ramp) {
  ramp = std::min(ramp, seg.size() / 2);
  for (std::size_t i = 0; i < ramp; ++i) {
    const double g = 0.5 - 0.5 * std::cos(std::numbers::pi * (i + 0.5) / ramp);
    seg[i] *= g;
    seg[seg.size() - 1 - i] *= g;
  }
}

void ScaleToRms(std::span<double> x, double rms) {
  const double p = MeanPower(x);
  if (p <= 0.0) return;
  const double g = rms / std::sqrt(p);
  for (double& s : x) s *= g;
}

Vec3 RandomPoint(const Vec3& dims, Rng& rng) {
  Vec3 p;
  for (int a = 0; a < 3; ++a) {
    const double margin = std::min(0.5, dims[a] / 4.0);
    p[a] = rng.Uniform(margin, dims[a] - margin);
  }
  return p;
}

double Dist(const Vec3& a, const Vec3& b) {
  return std::hypot(a[0] - b[0], a[1] - b[1], a[2] - b[2]);
}

RoomSpec MakeRoom(const Vec3& dims, const Vec3& src, const Vec3& mic, double t60,
                  const SimConfig& sim) {
  RoomSpec room;
  room.dims = dims;
  room.source_pos = src;
  room.mic_pos = mic;
  room.t60 = t60;
  room.speed_of_sound = sim.speed_of_sound;
  room.max_reflection_order = DefaultMaxOrder(room, sim.max_order_cap);
  return room;
}

// The wall coefficient is a property of the room, so every source in it
// shares the value calibrated on the speech path.
AudioBuffer Reverberate(const AudioBuffer& dry, const RoomSpec& room, double beta,
                        const SimConfig& sim) {
  return Convolve(dry, SimulateRir(room, beta, sim.sample_rate, std::max<std::size_t>(dry.size(), 1)));
}

struct CleanUtterance {
  AudioBuffer audio;
  std::vector<std::uint16_t> frame_labels;
  std::vector<std::uint16_t> token_refs;
};

CleanUtterance SynthesizeClean(const CorpusSpec& spec, Rng& rng) {
  const FrameLayout& fl = spec.frames;
  const int n_tokens =
      static_cast<int>(rng.UniformInt(spec.tokens_per_utt.first, spec.tokens_per_utt.second));
  CleanUtterance u;
  int prev = -1;
  for (int t = 0; t < n_tokens; ++t) {
    int c;
    if (prev < 0) {
      c = static_cast<int>(rng.UniformInt(0, spec.n_classes - 1));
    } else {
      // Consecutive tokens always differ.
      c = static_cast<int>(rng.UniformInt(0, spec.n_classes - 2));
      if (c >= prev) ++c;
    }
    prev = c;
    u.token_refs.push_back(static_cast<std::uint16_t>(c));
    const int frames = static_cast<int>(
        rng.UniformInt(spec.segment_frames.first, spec.segment_frames.second));
    u.frame_labels.insert(u.frame_labels.end(), frames, static_cast<std::uint16_t>(c));
  }
  // Lead and tail padding of (win - hop) / 2 samples put the centre of frame
  // t inside the segment that owns label t.
  const std::size_t pad = static_cast<std::size_t>((fl.frame_length - fl.frame_shift) / 2);
  const std::size_t body = u.frame_labels.size() * static_cast<std::size_t>(fl.frame_shift);
  u.audio.sample_rate = spec.sim.sample_rate;
  u.audio.samples.assign(2 * pad + body, 0.0);

  const double level = rng.Uniform(0.05, 0.2);
  std::size_t offset = pad;
  std::size_t label_pos = 0;
  for (std::uint16_t c : u.token_refs) {
    std::size_t frames = 0;
    while (label_pos + frames < u.frame_labels.size() &&
           u.frame_labels[label_pos + frames] == c)
      ++frames;
    label_pos += frames;
    const std::size_t len = frames * static_cast<std::size_t>(fl.frame_shift);
    std::span<double> seg(u.audio.samples.data() + offset, len);
    ClassVoice v = VoiceForClass(c);
    const double f0 = v.f0 * std::exp(0.03 * rng.Normal());
    v.formant1 *= std::exp(0.04 * rng.Normal());
    v.formant2 *= std::exp(0.04 * rng.Normal());
    AddHarmonicStack(seg, f0, spec.sim.sample_rate, v, rng);
    ApplyRamps(seg, static_cast<std::size_t>(spec.sim.sample_rate / 200));
    ScaleToRms(seg, level * std::exp(0.15 * rng.Normal()));
    offset += len;
  }
  // Low-level self noise keeps the dry spectrum free of exact zeros.
  for (double& s : u.audio.samples) s += 0.003 * level * rng.Normal();
  return u;
}

AudioBuffer SynthesizeNoise(const SimConfig& sim, Rng& rng) {
  const auto n = static_cast<std::size_t>(sim.noise_length_s * sim.sample_rate);
  std::vector<double> tonal(n, 0.0), broadband(n, 0.0);

  // Music-like part: chords of harmonic tones, re-drawn every 0.1-0.4 s.
  std::size_t pos = 0;
  while (pos < n) {
    const auto len = std::min<std::size_t>(
        n - pos, static_cast<std::size_t>(rng.Uniform(0.1, 0.4) * sim.sample_rate));
    std::span<double> seg(tonal.data() + pos, len);
    const int voices = static_cast<int>(rng.UniformInt(2, 4));
    for (int v = 0; v < voices; ++v) {
      const double f0 = 80.0 * std::pow(1000.0 / 80.0, rng.Uniform());
      const double amp = rng.Uniform(0.3, 1.0);
      for (int h = 1; h <= 8 && h * f0 < 0.5 * sim.sample_rate - 400.0; ++h) {
        std::complex<double> z = std::polar(amp / h, kTwoPi * rng.Uniform());
        const std::complex<double> w = std::polar(1.0, kTwoPi * h * f0 / sim.sample_rate);
        for (double& s : seg) {
          s += z.imag();
          z *= w;
        }
      }
    }
    ApplyRamps(seg, static_cast<std::size_t>(sim.sample_rate / 100));
    pos += len;
  }
  const double rate = rng.Uniform(2.0, 8.0);
  const double depth = rng.Uniform(0.2, 0.6);
  const double phase = kTwoPi * rng.Uniform();
  for (std::size_t i = 0; i < n; ++i)
    tonal[i] *= 1.0 + depth * std::sin(kTwoPi * rate * i / sim.sample_rate + phase);

  // Coloured broadband part: one-pole low-pass, optionally differenced.
  const double a = rng.Uniform(0.3, 0.97);
  const bool highpass = rng.Uniform() < 0.3;
  double state = 0.0, prev = 0.0;
  for (double& s : broadband) {
    state = a * state + (1.0 - a) * rng.Normal();
    s = highpass ? state - prev : state;
    prev = state;
  }
  ScaleToRms(tonal, 1.0);
  ScaleToRms(broadband, 1.0);
  const double w = rng.Uniform(0.3, 1.0);
  AudioBuffer out;
  out.sample_rate = sim.sample_rate;
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) out.samples[i] = w * tonal[i] + (1.0 - w) * broadband[i];
  ScaleToRms(out.samples, 0.1);
  return out;
}

std::string BankPrefix(std::uint64_t seed) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "noise-%08llx",
                static_cast<unsigned long long>(DeriveSeed(seed, "noise-bank-id") & 0xffffffffULL));
  return buf;
}

template <typename T>
void CheckRange(const std::pair<T, T>& r, const char* name) {
  if (!(r.first <= r.second))
    throw InvalidArgument(std::string("sim config: ") + name + " has lo > hi");
}

}  // namespace

void Validate(const SimConfig& sim) {
  CheckRange(sim.snr_range_db, "snr_range_db");
  CheckRange(sim.t60_range_s, "t60_range_s");
  CheckRange(sim.noises_per_utt, "noises_per_utt");
  for (const auto& r : sim.room_dim_ranges) {
    CheckRange(r, "room_dim_ranges");
    if (!(r.first > 0.0)) throw InvalidArgument("sim config: room dimensions must be positive");
  }
  if (!(sim.t60_range_s.first > 0.0))
    throw InvalidArgument("sim config: t60 must be positive");
  if (sim.noise_bank_size < 1) throw InvalidArgument("sim config: empty noise bank");
  if (sim.noises_per_utt.first < 1 || sim.noises_per_utt.second > sim.noise_bank_size)
    throw InvalidArgument("sim config: noises_per_utt must lie within [1, noise bank size]");
  if (sim.sample_rate <= 0) throw InvalidArgument("sim config: sample rate must be positive");
  if (sim.max_order_cap < 0) throw InvalidArgument("sim config: negative order cap");
  if (!(sim.noise_length_s > 0.0)) throw InvalidArgument("sim config: noise length must be positive");
}

std::size_t FrameCount(std::size_t num_samples, const FrameLayout& layout) {
  const auto win = static_cast<std::size_t>(layout.frame_length);
  if (num_samples < win) return 0;
  return 1 + (num_samples - win) / static_cast<std::size_t>(layout.frame_shift);
}

ClassVoice VoiceForClass(int class_index) {
  constexpr int kPitchLevels = 5;
  const int pitch = class_index % kPitchLevels;
  const int vowel = class_index / kPitchLevels + 1;
  ClassVoice v;
  v.f0 = 100.0 * std::pow(2.4, pitch / static_cast<double>(kPitchLevels - 1));
  v.formant1 = 250.0 + 600.0 * Halton(vowel, 2);
  v.formant2 = std::max(v.formant1 + 400.0, 900.0 + 1600.0 * Halton(vowel, 3));
  return v;
}

std::vector<NoiseClip> GenerateNoiseBank(const SimConfig& sim) {
  Validate(sim);
  const std::string prefix = BankPrefix(sim.seed);
  std::vector<NoiseClip> bank(static_cast<std::size_t>(sim.noise_bank_size));
  for (std::size_t j = 0; j < bank.size(); ++j) {
    Rng rng(DeriveSeed(sim.seed, "noise-bank", j));
    char id[16];
    std::snprintf(id, sizeof id, "-%03zu", j);
    bank[j] = {prefix + id, SynthesizeNoise(sim, rng)};
  }
  return bank;
}

Corpus GenerateCorpus(const CorpusSpec& spec) {
  Validate(spec.sim);
  if (spec.n_classes < 2 || spec.n_classes > 65535)
    throw InvalidArgument("corpus: n_classes must lie in [2, 65535]");
  if (spec.n_utts < 0) throw InvalidArgument("corpus: negative utterance count");
  if (spec.frames.frame_shift <= 0 || spec.frames.frame_length < spec.frames.frame_shift)
    throw InvalidArgument("corpus: frame length must be >= frame shift > 0");
  if (spec.tokens_per_utt.first < 1 || spec.tokens_per_utt.first > spec.tokens_per_utt.second ||
      spec.segment_frames.first < 1 || spec.segment_frames.first > spec.segment_frames.second)
    throw InvalidArgument("corpus: invalid token or segment ranges");

  const SimConfig& sim = spec.sim;
  const std::vector<NoiseClip> bank = GenerateNoiseBank(sim);
  Corpus corpus;
  corpus.noise_bank_ids.reserve(bank.size());
  for (const auto& clip : bank) corpus.noise_bank_ids.push_back(clip.id);
  const auto n = static_cast<std::size_t>(spec.n_utts);
  corpus.records.resize(n);
  corpus.meta.resize(n);
  const std::uint64_t acoustic_seed =
      DeriveSeed(sim.seed, "acoustic", static_cast<std::uint64_t>(spec.copy_index));

  ParallelFor(n, spec.jobs, [&](std::size_t i) {
    char id[64];
    std::snprintf(id, sizeof id, "%s-%06zu", spec.id_prefix.c_str(), i);
    Rng clean_rng(DeriveSeed(sim.seed, "clean", i));
    CleanUtterance clean = SynthesizeClean(spec, clean_rng);

    Rng rng(DeriveSeed(acoustic_seed, "utt", i));
    UtteranceMeta meta;
    meta.id = id;
    for (int a = 0; a < 3; ++a)
      meta.room_dims[a] = rng.Uniform(sim.room_dim_ranges[a].first, sim.room_dim_ranges[a].second);
    meta.t60_s = rng.Uniform(sim.t60_range_s.first, sim.t60_range_s.second);
    meta.snr_db = rng.Uniform(sim.snr_range_db.first, sim.snr_range_db.second);
    const Vec3 mic = RandomPoint(meta.room_dims, rng);
    Vec3 src;
    do {
      src = RandomPoint(meta.room_dims, rng);
    } while (Dist(src, mic) < 0.5);

    const RoomSpec speech_room = MakeRoom(meta.room_dims, src, mic, meta.t60_s, sim);
    const double beta = CalibrateReflectionCoeff(speech_room, sim.sample_rate);

    const int n_noises = static_cast<int>(rng.UniformInt(sim.noises_per_utt.first, sim.noises_per_utt.second));
    std::vector<std::size_t> pool(bank.size());
    for (std::size_t j = 0; j < pool.size(); ++j) pool[j] = j;
    std::vector<AudioBuffer> noises;
    for (int k = 0; k < n_noises; ++k) {
      // Partial Fisher-Yates: distinct noises per utterance.
      const auto pick = static_cast<std::size_t>(
          rng.UniformInt(k, static_cast<std::int64_t>(pool.size()) - 1));
      std::swap(pool[k], pool[pick]);
      const NoiseClip& clip = bank[pool[k]];
      meta.noise_ids.push_back(clip.id);
      AudioBuffer looped;
      looped.sample_rate = sim.sample_rate;
      looped.samples = LoopToLength(
          clip.audio.samples, clean.audio.size(),
          static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(clip.audio.size()) - 1)));
      Vec3 pos;
      do {
        pos = RandomPoint(meta.room_dims, rng);
      } while (Dist(pos, mic) < 0.5);
      noises.push_back(
          Reverberate(looped, MakeRoom(meta.room_dims, pos, mic, meta.t60_s, sim), beta, sim));
    }
    const AudioBuffer wet = Reverberate(clean.audio, speech_room, beta, sim);
    AudioBuffer noisy = MixAtSnr(wet, noises, meta.snr_db);

    // Level-match the mixture to the dry signal, then guard against clipping.
    ScaleToRms(noisy.samples, std::sqrt(MeanPower(clean.audio.samples)));
    double peak = 0.0;
    for (double s : noisy.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.99)
      for (double& s : noisy.samples) s *= 0.99 / peak;

    UtteranceRecord& rec = corpus.records[i];
    rec.id = id;
    rec.clean = std::move(clean.audio);
    rec.noisy = std::move(noisy);
    QuantizeToPcm16(rec.clean);
    QuantizeToPcm16(rec.noisy);
    rec.frame_labels = std::move(clean.frame_labels);
    rec.token_refs = std::move(clean.token_refs);
    corpus.meta[i] = std::move(meta);
  });
  return corpus;
}

void WriteLabels(const std::filesystem::path& path,
                 const std::vector<std::uint16_t>& labels) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("labels: cannot open " + path.string());
  BinaryWriter w(os);
  w.Bytes("LBL1");
  w.U32(static_cast<std::uint32_t>(labels.size()));
  for (auto c : labels) w.U16(c);
  if (!w.good()) throw IoError("labels: write failed for " + path.string());
}

std::vector<std::uint16_t> ReadLabels(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("labels: cannot open " + path.string());
  BinaryReader r(is);
  std::string magic;
  std::uint32_t n = 0;
  if (!r.Bytes(magic, 4) || magic != "LBL1") throw IoError("labels: bad magic in " + path.string());
  if (!r.U32(n)) throw IoError("labels: truncated header in " + path.string());
  std::vector<std::uint16_t> labels(n);
  for (auto& c : labels)
    if (!r.U16(c)) throw IoError("labels: truncated body in " + path.string());
  return labels;
}

void WriteCorpus(const std::filesystem::path& dir, const Corpus& corpus,
                 const CorpusWriteOptions& options) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  if (options.labels) fs::create_directories(dir / "labels");
  if (options.clean_audio || options.noisy_audio) fs::create_directories(dir / "wav");
  {
    std::ofstream bank(dir / "noise_bank.json");
    bank << nlohmann::ordered_json{{"noise_ids", corpus.noise_bank_ids}}.dump(2) << '\n';
    if (!bank) throw IoError("corpus: cannot write noise bank manifest in " + dir.string());
  }
  std::ofstream manifest(dir / "manifest.jsonl");
  if (!manifest) throw IoError("corpus: cannot write manifest in " + dir.string());
  for (std::size_t i = 0; i < corpus.records.size(); ++i) {
    const UtteranceRecord& rec = corpus.records[i];
    const UtteranceMeta& meta = corpus.meta[i];
    std::string clean_path, noisy_path, label_path;
    if (options.clean_audio) {
      clean_path = "wav/" + rec.id + ".clean.wav";
      WriteWav(dir / clean_path, rec.clean);
    }
    if (options.noisy_audio) {
      noisy_path = "wav/" + rec.id + ".noisy.wav";
      WriteWav(dir / noisy_path, rec.noisy);
    }
    if (options.labels) {
      label_path = "labels/" + rec.id + ".lbl";
      WriteLabels(dir / label_path, rec.frame_labels);
    }
    nlohmann::ordered_json j;
    j["id"] = rec.id;
    j["clean_path"] = clean_path;
    j["noisy_path"] = noisy_path;
    j["snr_db"] = meta.snr_db;
    j["t60_s"] = meta.t60_s;
    j["noise_ids"] = meta.noise_ids;
    j["room_dims"] = meta.room_dims;
    j["label_path"] = label_path;
    manifest << j.dump() << '\n';
  }
  if (!manifest) throw IoError("corpus: manifest write failed in " + dir.string());
}

std::vector<ManifestEntry> ReadManifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("manifest: cannot open " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.id = j.at("id").get<std::string>();
      e.clean_path = j.at("clean_path").get<std::string>();
      e.noisy_path = j.at("noisy_path").get<std::string>();
      e.snr_db = j.at("snr_db").get<double>();
      e.t60_s = j.at("t60_s").get<double>();
      e.noise_ids = j.at("noise_ids").get<std::vector<std::string>>();
      e.room_dims = j.at("room_dims").get<Vec3>();
      e.label_path = j.at("label_path").get<std::string>();
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw IoError("manifest: malformed line in " + path.string() + ": " + ex.what());
    }
  }
  return entries;
}

}  // namespace tsda::signal
