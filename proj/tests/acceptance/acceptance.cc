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

// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "CLI11.hpp"
#include "grad_check.h"
#include "tsda/codec/posterior.h"
#include "tsda/codec/stgt.h"
#include "tsda/common/hash.h"
#include "tsda/common/rng.h"
#include "tsda/pipeline/experiment.h"
#include "tsda/signal/dsp.h"
#include "tsda/signal/room.h"

namespace tsda {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

std::string Fixed(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

// The sample set shared by criteria 1 and 2: 1000 vectors cycling through
// every (N, T, k) combination.
struct CodecSample {
  std::vector<double> z;
  double temperature;
  int k;
};

std::vector<CodecSample> CodecSamples() {
  const int ns[] = {8, 300, 3010};
  const double ts[] = {0.5, 1.0, 2.0, 5.0};
  Rng rng(20240601);
  std::vector<CodecSample> out;
  for (int i = 0; i < 1000; ++i) {
    const int n = ns[i % 3];
    const double t = ts[(i / 3) % 4];
    const int ks[] = {1, 5, 20, n};
    const int k = std::min(ks[(i / 12) % 4], n);
    CodecSample s{std::vector<double>(n), t, k};
    const double scale = 1.0 + 9.0 * rng.Uniform(0.0, 1.0);
    for (double& v : s.z) v = scale * rng.Normal();
    out.push_back(std::move(s));
  }
  return out;
}

// Dense softmax in long double, masked to the k largest logits (ties to the
// lower index) and renormalized.
std::vector<double> MaskedSoftmaxOracle(const std::vector<double>& z, int k, double t) {
  const std::size_t n = z.size();
  const long double m = *std::max_element(z.begin(), z.end());
  std::vector<long double> q(n);
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n; ++i) sum += q[i] = std::exp((z[i] - m) / t);
  for (auto& v : q) v /= sum;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return z[a] > z[b]; });
  std::vector<long double> masked(n, 0.0L);
  long double kept = 0.0L;
  for (int j = 0; j < k; ++j) kept += masked[idx[j]] = q[idx[j]];
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(masked[i] / kept);
  return out;
}

Outcome CodecOracle() {
  const auto samples = CodecSamples();
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (const auto& s : samples) {
    const auto got = codec::TopKPosterior(s.z, s.k, s.temperature).probs;
    const auto want = MaskedSoftmaxOracle(s.z, s.k, s.temperature);
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  const double secs = Seconds(t0);
  return {worst <= 1e-12 && secs < 10.0,
          "max abs error " + Sci(worst) + " over " + std::to_string(samples.size()) +
              " vectors, " + Fixed(secs, 2) + " s"};
}

Outcome FloorVariantAgreement() {
  double worst = 0.0, worst_ratio = 0.0;
  bool bound_ok = true;
  for (const auto& s : CodecSamples()) {
    const auto r = codec::TopKPosterior(s.z, s.k, s.temperature);
    const double c = codec::DefaultFloorConstant(s.z, r.selected, s.temperature);
    const auto floored = codec::TopKPosteriorC(s.z, s.k, s.temperature);
    std::vector<bool> in_k(s.z.size(), false);
    for (int i : r.selected) in_k[i] = true;
    double suppressed = 0.0;
    for (std::size_t i = 0; i < s.z.size(); ++i) {
      worst = std::max(worst, std::abs(floored[i] - r.probs[i]));
      if (!in_k[i]) suppressed += floored[i];
    }
    const double zmax = *std::max_element(s.z.begin(), s.z.end());
    const double bound = static_cast<double>(s.z.size() - s.k) * std::exp((c - zmax) / s.temperature);
    if (suppressed > bound * (1.0 + 1e-12)) bound_ok = false;
    if (bound > 0.0) worst_ratio = std::max(worst_ratio, suppressed / bound);
  }
  return {worst < 1e-9 && bound_ok,
          "max |q~' - q'| " + Sci(worst) + ", suppressed mass / bound <= " +
              Fixed(worst_ratio, 6)};
}

std::string EncodeStgt(const codec::StgtHeader& h,
                       const std::vector<codec::SoftTargetUtterance>& utts) {
  std::ostringstream os;
  codec::StgtWriter w(os, h);
  for (const auto& u : utts) w.Write(u);
  w.Finish();
  return os.str();
}

codec::FormatError::Kind DecodeKind(const std::string& bytes, bool* threw) {
  std::istringstream is(bytes);
  try {
    codec::DecodeStream(is);
  } catch (const codec::FormatError& e) {
    *threw = true;
    return e.kind();
  }
  *threw = false;
  return codec::FormatError::Kind::kInvalidValue;
}

Outcome StgtRoundTrip() {
  using Kind = codec::FormatError::Kind;
  Rng rng(7);
  int corpora = 0;
  bool ok = true;
  std::string why;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = static_cast<int>(rng.UniformInt(2, 400));
    const int k = static_cast<int>(rng.UniformInt(1, std::min(n, 40)));
    std::vector<codec::SoftTargetUtterance> utts;
    const int count = static_cast<int>(rng.UniformInt(0, 6));
    std::size_t frames = 0, id_bytes = 0;
    for (int u = 0; u < count; ++u) {
      codec::SoftTargetUtterance utt;
      utt.id = "u" + std::to_string(trial) + "-" + std::to_string(u);
      const int len = u == 0 ? 0 : u == 1 ? 1 : static_cast<int>(rng.UniformInt(2, 50));
      for (int f = 0; f < len; ++f) {
        std::vector<double> z(n);
        for (double& v : z) v = 5.0 * rng.Normal();
        utt.frames.push_back(codec::MakeSparseFrame(z, k));
      }
      frames += utt.frames.size();
      id_bytes += utt.id.size();
      utts.push_back(std::move(utt));
    }
    const codec::StgtHeader h{static_cast<std::uint32_t>(n), static_cast<std::uint16_t>(k), 2.0f,
                              static_cast<std::uint32_t>(count)};
    const std::string bytes = EncodeStgt(h, utts);
    std::istringstream is(bytes);
    const codec::StgtContent back = codec::DecodeStream(is);
    if (!(back.header == h) || back.utterances != utts || EncodeStgt(back.header, back.utterances) != bytes) {
      ok = false;
      why = "roundtrip mismatch in trial " + std::to_string(trial);
    }
    const std::size_t want_size =
        codec::kStgtHeaderBytes + static_cast<std::size_t>(count) * 6 + id_bytes + frames * 6 * k;
    if (bytes.size() != want_size) {
      ok = false;
      why = "payload is not 6k bytes per frame";
    }
    ++corpora;
  }

  // Corruptions of a two-entry frame: header 20 bytes, id "a", then the
  // frame count and entries.
  std::vector<double> z = {0.5, 3.0, 1.0, -2.0};
  const codec::SoftTargetUtterance u{"a", {codec::MakeSparseFrame(z, 2)}};
  const std::string good = EncodeStgt({4, 2, 1.0f, 1}, {u});
  const std::size_t first = codec::kStgtHeaderBytes + 2 + 1 + 4;
  auto with = [&](std::size_t at, const std::string& patch) {
    std::string s = good;
    s.replace(at, patch.size(), patch);
    return s;
  };
  std::string swapped = good;
  std::swap_ranges(swapped.begin() + first, swapped.begin() + first + 6, swapped.begin() + first + 6);
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::string nan_bytes(4, '\0');
  std::memcpy(nan_bytes.data(), &nan, 4);
  const std::vector<std::tuple<std::string, std::string, Kind>> cases = {
      {"bad magic", with(0, "XGTS"), Kind::kBadMagic},
      {"version", with(4, std::string("\x02\x00", 2)), Kind::kVersionMismatch},
      {"truncated", good.substr(0, good.size() - 1), Kind::kTruncated},
      {"trailing", good + "!", Kind::kTrailingData},
      {"unsorted", swapped, Kind::kUnsorted},
      {"duplicate", with(first + 6, good.substr(first, 2)), Kind::kDuplicateIndex},
      {"out of range", with(first, std::string("\x04\x00", 2)), Kind::kIndexOutOfRange},
      {"non-finite", with(first + 2, nan_bytes), Kind::kInvalidValue},
      {"header k > N", with(10, std::string("\x05\x00", 2)), Kind::kInvalidHeader},
  };
  for (const auto& [name, bytes, want] : cases) {
    bool threw = false;
    const Kind got = DecodeKind(bytes, &threw);
    if (!threw || got != want) {
      ok = false;
      why = "corruption '" + name + "' not reported with the expected kind";
    }
  }

  const std::vector<std::string> ids = {"utt"};
  const std::vector<std::uint32_t> counts = {1000};
  const double ratio = static_cast<double>(codec::StgtStreamBytes(ids, counts, 20)) / (1000.0 * 3010 * 4);
  if (!(ratio < 0.01)) {
    ok = false;
    why = "sparse/dense ratio too large";
  }
  return {ok, ok ? std::to_string(corpora) + " corpora bit-exact, " + std::to_string(cases.size()) +
                       " corruptions classified, N=3010 k=20 ratio " + Fixed(ratio, 5)
                 : why};
}

Outcome GradientChecks() {
  const auto t0 = Clock::now();
  double worst = 0.0;
  const auto cases = testing::GradCheckCases();
  for (const auto& c : cases) worst = std::max(worst, testing::RunGradCheck(c).max_rel_error);
  const double secs = Seconds(t0);
  return {cases.size() == 20 && worst < 1e-4 && secs < 60.0,
          "max relative error " + Sci(worst) + " over " + std::to_string(cases.size()) +
              " configurations, " + Fixed(secs, 2) + " s"};
}

Outcome Acoustics() {
  using signal::RoomSpec;
  bool ok = true;
  std::ostringstream detail;
  RoomSpec room;
  room.dims = {6.0, 5.0, 3.0};
  room.source_pos = {1.3, 2.1, 1.6};
  room.mic_pos = {4.2, 3.3, 1.2};
  detail << "T60";
  for (double t60 : {0.3, 0.5, 0.9}) {
    room.t60 = t60;
    room.max_reflection_order = std::max(30, signal::DefaultMaxOrder(room, 60));
    const double beta = signal::CalibrateReflectionCoeff(room, 16000);
    const double measured = signal::EstimateT60(signal::SimulateRir(room, beta, 16000));
    ok = ok && std::abs(measured - t60) <= 0.2 * t60;
    detail << " " << t60 << "->" << Fixed(measured, 3);
  }

  Rng rng(3);
  double worst_snr = 0.0;
  for (double snr : {-5.0, 0.0, 7.3, 20.0, 30.0}) {
    signal::AudioBuffer clean, noise;
    for (int i = 0; i < 8000; ++i) clean.samples.push_back(rng.Normal());
    for (int i = 0; i < 3000; ++i) noise.samples.push_back(rng.Uniform(-1.0, 1.0));
    const signal::AudioBuffer mixed = signal::MixAtSnr(clean, std::vector<signal::AudioBuffer>{noise}, snr);
    worst_snr = std::max(worst_snr, std::abs(signal::MeasureSnrDb(clean, mixed) - snr));
  }
  ok = ok && worst_snr <= 1e-9;
  detail << "; SNR error " << worst_snr;

  // Brute force over the lattice: per axis the image coordinate is
  // (1 - 2p) x + 2 n L with |n - p| + |n| reflections.
  std::size_t matched = 0;
  bool images_ok = true;
  for (int order = 0; order <= 2; ++order) {
    room.max_reflection_order = order;
    std::multiset<std::tuple<long long, long long, long long, int>> want, got;
    auto key = [](const signal::Vec3& p, int r) {
      return std::make_tuple(std::llround(p[0] * 1e9), std::llround(p[1] * 1e9),
                             std::llround(p[2] * 1e9), r);
    };
    for (int nx = -2; nx <= 2; ++nx)
      for (int ny = -2; ny <= 2; ++ny)
        for (int nz = -2; nz <= 2; ++nz)
          for (int p = 0; p < 8; ++p) {
            const int n[3] = {nx, ny, nz};
            signal::Vec3 pos;
            int refl = 0;
            for (int a = 0; a < 3; ++a) {
              const int pa = (p >> a) & 1;
              pos[a] = (1 - 2 * pa) * room.source_pos[a] + 2.0 * n[a] * room.dims[a];
              refl += std::abs(n[a] - pa) + std::abs(n[a]);
            }
            if (refl <= order) want.insert(key(pos, refl));
          }
    for (const auto& img : signal::EnumerateImageSources(room, order)) got.insert(key(img.position, img.order));
    images_ok = images_ok && want == got;
    matched += got.size();
  }
  ok = ok && images_ok;
  detail << "; images " << (images_ok ? "match" : "differ") << " (" << matched << " over orders 0-2)";
  return {ok, detail.str()};
}

struct SeedResult {
  std::uint64_t seed = 0;
  pipeline::RunReport table;
  double student_t2_k20 = 0.0;
  double student_t5_k5 = 0.0;
  std::vector<pipeline::GridRow> grid;
  std::vector<pipeline::SizeRow> size;
  double table_seconds = 0.0;
  std::string error;
};

pipeline::ExperimentConfig SeedConfig(const pipeline::ExperimentConfig& base, std::uint64_t seed,
                                      const fs::path& dir) {
  pipeline::ExperimentConfig cfg = base;
  cfg.seed = seed;
  cfg.output_dir = dir;
  cfg.sweep.temperatures = {1.0, 2.0, 5.0};
  cfg.sweep.ks = {5, 20, 40, pipeline::kMaxK};
  cfg.sweep.size_multipliers = {1, 2, 4, 6};
  return cfg;
}

double NoisyTer(const pipeline::RunReport& r, const std::string& system) {
  for (const auto& row : r.systems)
    if (row.system == system) return row.noisy_ter;
  throw InvalidArgument("missing system " + system);
}

// Every file under the stage cache, keyed by path relative to the root.
std::map<std::string, std::string> TreeHashes(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).generic_string()] = Sha256File(e.path());
  return out;
}

int Run(int argc, char** argv) {
  CLI::App app{"Acceptance run"};
  std::string work_dir = "acceptance_work";
  std::string config_path;
  int seeds = 5;
  int jobs = 1;
  app.add_option("--work-dir", work_dir, "scratch directory, wiped at start");
  app.add_option("--config", config_path, "base config (default: built-in defaults)");
  app.add_option("--seeds", seeds, "number of seeds for the pipeline criteria")->check(CLI::Range(1, 100));
  app.add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  std::vector<std::pair<int, Outcome>> results;
  auto report = [&](int id, Outcome o) {
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail
              << std::endl;
    results.emplace_back(id, std::move(o));
  };
  auto guarded = [&](int id, const std::function<Outcome()>& f) {
    try {
      report(id, f());
    } catch (const std::exception& e) {
      report(id, {false, std::string("error: ") + e.what()});
    }
  };

  guarded(1, CodecOracle);
  guarded(2, FloorVariantAgreement);
  guarded(3, StgtRoundTrip);
  guarded(4, GradientChecks);
  guarded(5, Acoustics);

  pipeline::ExperimentConfig base;
  if (!config_path.empty()) base = pipeline::LoadConfig(config_path);
  base.jobs = jobs;
  const fs::path root = fs::absolute(work_dir);
  fs::remove_all(root);

  std::vector<SeedResult> runs;
  for (int s = 1; s <= seeds; ++s) {
    SeedResult r;
    r.seed = static_cast<std::uint64_t>(s);
    try {
      pipeline::Experiment exp(SeedConfig(base, r.seed, root / ("seed-" + std::to_string(s))));
      const auto t0 = Clock::now();
      r.table = exp.RunTable();
      r.student_t2_k20 = exp.Evaluate(exp.Student(2.0, 20)).noisy_ter;
      r.student_t5_k5 = exp.Evaluate(exp.Student(5.0, 5)).noisy_ter;
      r.table_seconds = Seconds(t0);
      r.grid = exp.SweepTk();
      r.size = exp.SweepSize();
      pipeline::EmitTable(exp.config().output_dir, r.table);
      pipeline::EmitGrid(exp.config().output_dir, r.grid, exp.config().corpus.n_classes);
      pipeline::EmitSize(exp.config().output_dir, r.size);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
    std::cout << "  seed " << s << ": "
              << (r.error.empty() ? "done, table phase " + Fixed(r.table_seconds, 1) + " s"
                                  : "error: " + r.error)
              << std::endl;
    runs.push_back(std::move(r));
  }
  const int need = seeds == 5 ? 4 : (4 * seeds + 4) / 5;
  const int need_size = seeds == 5 ? 3 : (3 * seeds + 4) / 5;

  guarded(6, [&] {
    int a = 0, b = 0, c = 0;
    double secs = 0.0;
    std::ostringstream detail;
    for (const auto& r : runs) {
      if (!r.error.empty()) continue;
      const double student = NoisyTer(r.table, "student-T1-k" + pipeline::KName(base.codec.k));
      const double multi = NoisyTer(r.table, "multi-condition");
      const double teacher = NoisyTer(r.table, "baseline");
      a += student < multi;
      b += multi < teacher;
      c += r.student_t2_k20 <= r.student_t5_k5;
      secs += r.table_seconds;
      detail << " [seed " << r.seed << ": " << Fixed(student, 3) << " < " << Fixed(multi, 3) << " < "
             << Fixed(teacher, 3) << ", " << Fixed(r.student_t2_k20, 3)
             << " <= " << Fixed(r.student_t5_k5, 3) << "]";
    }
    const bool pass = a >= need && b >= need && c >= need && secs < 900.0;
    return Outcome{pass, "student<multi " + std::to_string(a) + "/" + std::to_string(seeds) +
                             ", multi<teacher " + std::to_string(b) + "/" + std::to_string(seeds) +
                             ", T2k20<=T5k5 " + std::to_string(c) + "/" + std::to_string(seeds) +
                             ", " + Fixed(secs, 0) + " s" + detail.str()};
  });

  // Fresh rebuild of seed 1 for determinism of the grid and of every artifact.
  Outcome rebuild{false, "seed 1 unavailable"};
  bool grid_repeat = false;
  if (!runs.empty() && runs[0].error.empty()) {
    try {
      const fs::path again_dir = root / "seed-1-rerun";
      pipeline::Experiment again(SeedConfig(base, 1, again_dir));
      const auto table = again.RunTable();
      const auto grid = again.SweepTk();
      grid_repeat = grid == runs[0].grid;
      pipeline::EmitTable(again_dir, table);
      pipeline::EmitGrid(again_dir, grid, again.config().corpus.n_classes);
      const auto fresh = TreeHashes(again_dir / "cache");
      const auto orig = TreeHashes(root / "seed-1" / "cache");
      std::size_t compared = 0, differing = 0;
      for (const auto& [path, hash] : fresh) {
        ++compared;
        auto it = orig.find(path);
        if (it == orig.end() || it->second != hash) ++differing;
      }
      for (const char* f : {"tables.csv", "run_report.json", "grid.csv", "plot_grid.csv"}) {
        ++compared;
        if (Sha256File(again_dir / f) != Sha256File(root / "seed-1" / f)) ++differing;
      }
      rebuild = {differing == 0 && compared > 0,
                 std::to_string(compared) + " artifacts rebuilt from scratch, " +
                     std::to_string(differing) + " differ"};
    } catch (const std::exception& e) {
      rebuild = {false, std::string("error: ") + e.what()};
    }
  }

  guarded(7, [&] {
    bool ok = grid_repeat;
    std::ostringstream detail;
    detail << "rerun " << (grid_repeat ? "identical" : "differs");
    std::vector<std::vector<double>> t1;  // per seed, T=1 noisy TER per k
    for (const auto& r : runs) {
      if (!r.error.empty()) continue;
      std::ifstream is(root / ("seed-" + std::to_string(r.seed)) / "grid.csv");
      const auto parsed = pipeline::ReadGridCsv(is);
      ok = ok && r.grid.size() == 12 && parsed == r.grid;
      std::vector<double> row;
      for (const auto& g : r.grid)
        if (g.temperature == 1.0) row.push_back(g.noisy_ter);
      t1.push_back(row);
    }
    ok = ok && !t1.empty();
    detail << ", 12-row CSVs parse back for " << t1.size() << " seeds";
    if (t1.size() >= 2 && !t1[0].empty()) {
      double across_k = 0.0, across_seeds = 0.0;
      for (const auto& row : t1)
        across_k += *std::max_element(row.begin(), row.end()) - *std::min_element(row.begin(), row.end());
      across_k /= static_cast<double>(t1.size());
      for (std::size_t j = 0; j < t1[0].size(); ++j) {
        double lo = 1e300, hi = -1e300;
        for (const auto& row : t1) {
          lo = std::min(lo, row[j]);
          hi = std::max(hi, row[j]);
        }
        across_seeds += hi - lo;
      }
      across_seeds /= static_cast<double>(t1[0].size());
      const bool soft = across_k < 2.0 * across_seeds;
      detail << "; soft check T=1 spread across k " << Fixed(across_k, 4) << " vs seed spread "
             << Fixed(across_seeds, 4) << ": " << (soft ? "holds" : "does not hold");
    }
    return Outcome{ok, detail.str()};
  });

  guarded(8, [&] {
    int better = 0, parsed_ok = 0, done = 0;
    std::ostringstream detail;
    for (const auto& r : runs) {
      if (!r.error.empty()) continue;
      ++done;
      std::ifstream is(root / ("seed-" + std::to_string(r.seed)) / "size.csv");
      parsed_ok += pipeline::ReadSizeCsv(is) == r.size;
      double one = 0.0, best = std::numeric_limits<double>::infinity();
      int best_m = 0;
      for (const auto& row : r.size) {
        if (row.multiplier == 1) one = row.noisy_ter;
        else if (row.noisy_ter < best) {
          best = row.noisy_ter;
          best_m = row.multiplier;
        }
      }
      better += best <= one;
      detail << " [seed " << r.seed << ": 1x " << Fixed(one, 3) << ", best " << best_m << "x "
             << Fixed(best, 3) << "]";
    }
    return Outcome{done == seeds && parsed_ok == done && better >= need_size,
                   "best > 1x no worse than 1x in " + std::to_string(better) + "/" +
                       std::to_string(seeds) + " seeds, CSV parse-back " + std::to_string(parsed_ok) +
                       "/" + std::to_string(done) + detail.str()};
  });

  report(9, rebuild);

  bool all = results.size() == 9;
  for (const auto& [id, o] : results) all = all && o.pass;
  std::cout << (all ? "all criteria passed" : "some criteria failed") << std::endl;
  return all ? 0 : 1;
}

}  // namespace
}  // namespace tsda

int main(int argc, char** argv) {
  try {
    return tsda::Run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "acceptance: " << e.what() << std::endl;
    return 3;
  }
}
