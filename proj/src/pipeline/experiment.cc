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

#include "tsda/pipeline/experiment.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tsda/codec/stgt.h"
#include "tsda/common/hash.h"
#include "tsda/common/parallel.h"
#include "tsda/common/rng.h"
#include "tsda/features/lfbe.h"
#include "tsda/net/model_io.h"
#include "tsda/net/train.h"
#include "tsda/signal/corpus.h"
#include "tsda/signal/wav.h"

namespace tsda::pipeline {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

const char* SplitName(Split s) { return s == Split::kTrain ? "train" : "test"; }

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  os << text;
  os.close();
  if (!os) throw IoError("cannot write " + path.string());
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

Json ReadJson(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(is);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

// Token references are the run-length collapse of the frame labels;
// consecutive tokens always differ by construction of the corpus.
std::vector<std::uint16_t> CollapseRuns(const std::vector<std::uint16_t>& labels) {
  std::vector<std::uint16_t> out;
  for (std::uint16_t c : labels)
    if (out.empty() || out.back() != c) out.push_back(c);
  return out;
}

void WriteModelWithSidecar(const fs::path& dir, const net::NetParams& params, Json sidecar) {
  net::WriteModel(dir / "model.dnet", params);
  WriteText(dir / "model.json", sidecar.dump(2) + "\n");
}

Json EvalJson(const net::EvalReport& r) {
  net::EditCounts total;
  std::size_t ref_tokens = 0;
  for (const auto& u : r.utterances) {
    total.substitutions += u.counts.substitutions;
    total.deletions += u.counts.deletions;
    total.insertions += u.counts.insertions;
    ref_tokens += u.ref_tokens;
  }
  return Json{{"ter", r.token_error_rate},
              {"frame_accuracy", r.frame_accuracy},
              {"substitutions", total.substitutions},
              {"deletions", total.deletions},
              {"insertions", total.insertions},
              {"ref_tokens", ref_tokens}};
}

}  // namespace

Experiment::Experiment(ExperimentConfig cfg)
    : cfg_(std::move(cfg)), cache_(cfg_.output_dir / "cache") {
  Validate(cfg_);
}

std::string Experiment::ConfigHash() const {
  ExperimentConfig c = cfg_;
  c.output_dir = "-";
  c.jobs = 1;
  return Sha256Hex(DumpConfig(c));
}

int Experiment::NumTranscribed() const {
  const double n = cfg_.corpus.transcribed_fraction * cfg_.corpus.n_utts;
  return std::clamp(static_cast<int>(std::llround(n)), 1, cfg_.corpus.n_utts);
}

void Experiment::RecordTiming(const std::string& stage, double seconds, bool built) {
  if (!built) return;
  std::lock_guard<std::mutex> lock(mu_);
  timings_[stage] += seconds;
}

std::map<std::string, double> Experiment::Timings() const {
  std::lock_guard<std::mutex> lock(mu_);
  return timings_;
}

int Experiment::LabelReads(const std::string& stage) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = label_reads_.find(stage);
  return it == label_reads_.end() ? 0 : it->second;
}

StageRef Experiment::Corpus(const CorpusId& id) {
  signal::CorpusSpec spec;
  spec.sim = cfg_.corpus.sim;
  spec.sim.seed = DeriveSeed(cfg_.seed, std::string(SplitName(id.split)) + "-corpus");
  if (id.noise_bank_size > 0) spec.sim.noise_bank_size = id.noise_bank_size;
  spec.n_utts = id.split == Split::kTrain ? cfg_.corpus.n_utts : cfg_.corpus.test_utts;
  spec.n_classes = cfg_.corpus.n_classes;
  spec.frames = features::LayoutFor(cfg_.features, spec.sim.sample_rate);
  spec.tokens_per_utt = cfg_.corpus.tokens_per_utt;
  spec.segment_frames = cfg_.corpus.segment_frames;
  spec.id_prefix = SplitName(id.split);
  spec.copy_index = id.copy;
  spec.jobs = cfg_.jobs;
  // Only the base corpus carries clean audio and labels; copies exist to
  // widen the noisy side of student training.
  signal::CorpusWriteOptions write;
  write.clean_audio = id.base();
  write.labels = id.base();

  Json desc;
  desc["sim"] = ToJson(spec.sim);
  desc["n_utts"] = spec.n_utts;
  desc["n_classes"] = spec.n_classes;
  desc["frame_length"] = spec.frames.frame_length;
  desc["frame_shift"] = spec.frames.frame_shift;
  desc["tokens_per_utt"] = {spec.tokens_per_utt.first, spec.tokens_per_utt.second};
  desc["segment_frames"] = {spec.segment_frames.first, spec.segment_frames.second};
  desc["id_prefix"] = spec.id_prefix;
  desc["copy_index"] = spec.copy_index;
  desc["write"] = {{"clean_audio", write.clean_audio}, {"noisy_audio", write.noisy_audio},
                   {"labels", write.labels}};
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure("corpus", desc, [&](const fs::path& dir) {
    signal::WriteCorpus(dir, signal::GenerateCorpus(spec), write);
  }, &built);
  RecordTiming("corpus", std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

StageRef Experiment::Features(const CorpusId& id) {
  const StageRef corpus = Corpus(id);
  const features::FrontEndConfig fe = cfg_.features;
  const int jobs = cfg_.jobs;
  Json desc;
  desc["corpus"] = corpus.key;
  desc["front_end"] = ToJson(fe);
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure("features", desc, [&](const fs::path& dir) {
    const auto entries = signal::ReadManifest(corpus.dir / "manifest.jsonl");
    const int fs_hz = cfg_.corpus.sim.sample_rate;
    const features::MelBank bank =
        features::MakeMelBank(fs_hz, fe.n_fft, fe.n_mels, fe.fmin, fe.fmax);
    fs::create_directories(dir / "feats");
    ParallelFor(entries.size(), jobs, [&](std::size_t i) {
      const signal::ManifestEntry& e = entries[i];
      for (auto [side, rel] : {std::pair<const char*, const std::string*>{"clean", &e.clean_path},
                               {"noisy", &e.noisy_path}}) {
        if (rel->empty()) continue;
        const signal::AudioBuffer audio = signal::ReadWav(corpus.dir / *rel);
        if (audio.sample_rate != fs_hz)
          throw InvalidArgument("features: " + *rel + " has sample rate " +
                                std::to_string(audio.sample_rate));
        features::WriteFeatures(dir / "feats" / (e.id + "." + side + ".lfbe"),
                                features::Lfbe(audio, bank, fe.win_s, fe.hop_s, fe.n_fft));
      }
    });
    std::ostringstream ids;
    for (const auto& e : entries)
      ids << e.id << '\t' << (e.clean_path.empty() ? "-" : "clean") << '\t'
          << (e.noisy_path.empty() ? "-" : "noisy") << '\n';
    WriteText(dir / "ids.txt", ids.str());
  }, &built);
  RecordTiming("features", std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

std::shared_ptr<const Experiment::FeatureSet> Experiment::LoadFeatures(const StageRef& feats) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = feature_sets_.find(feats.key);
    if (it != feature_sets_.end()) return it->second;
  }
  auto set = std::make_shared<FeatureSet>();
  std::vector<std::pair<bool, bool>> sides;
  for (const std::string& line : ReadLines(feats.dir / "ids.txt")) {
    std::istringstream ls(line);
    std::string id, clean, noisy;
    if (!(ls >> id >> clean >> noisy)) throw IoError("malformed ids.txt in " + feats.dir.string());
    set->ids.push_back(id);
    sides.emplace_back(clean == "clean", noisy == "noisy");
  }
  const std::size_t n = set->ids.size();
  const bool has_clean = n > 0 && sides[0].first;
  if (has_clean) set->clean.resize(n);
  set->noisy.resize(n);
  ParallelFor(n, cfg_.jobs, [&](std::size_t i) {
    const fs::path base = feats.dir / "feats" / set->ids[i];
    if (has_clean) set->clean[i] = features::ReadFeatures(fs::path(base) += ".clean.lfbe").values;
    set->noisy[i] = features::ReadFeatures(fs::path(base) += ".noisy.lfbe").values;
  });
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = feature_sets_.emplace(feats.key, std::move(set));
  return it->second;
}

Experiment::LabelSet Experiment::LoadLabels(const StageRef& corpus, std::size_t count,
                                            const std::string& stage) {
  const auto entries = signal::ReadManifest(corpus.dir / "manifest.jsonl");
  if (count > entries.size()) throw InvalidArgument("labels: corpus has too few utterances");
  LabelSet out;
  for (std::size_t i = 0; i < count; ++i) {
    if (entries[i].label_path.empty())
      throw InvalidArgument("labels: utterance " + entries[i].id + " carries no labels");
    out.frame_labels.push_back(signal::ReadLabels(corpus.dir / entries[i].label_path));
    out.token_refs.push_back(CollapseRuns(out.frame_labels.back()));
  }
  std::lock_guard<std::mutex> lock(mu_);
  label_reads_[stage] += static_cast<int>(count);
  return out;
}

StageRef Experiment::TrainHard(const std::string& stage, bool noisy) {
  const CorpusId base{Split::kTrain, 0, 0};
  const StageRef corpus = Corpus(base);
  const StageRef feats = Features(base);
  const int n_tr = NumTranscribed();
  const net::ArchitectureSpec arch = Architecture(cfg_);
  const std::uint64_t init_seed = DeriveSeed(cfg_.seed, "init");
  const net::TrainConfig tc =
      ToTrainConfig(noisy ? cfg_.multicond : cfg_.teacher, DeriveSeed(cfg_.seed, stage + "-train"),
                    net::LossKind::kHard);
  Json data{{"corpus", corpus.key}, {"features", feats.key}, {"side", noisy ? "noisy" : "clean"},
            {"n_transcribed", n_tr}};
  Json desc;
  desc["data"] = data;
  desc["architecture"] = ToJson(arch);
  desc["init_seed"] = init_seed;
  desc["train"] = ToJson(tc);
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure(stage, desc, [&](const fs::path& dir) {
    const auto set = LoadFeatures(feats);
    const LabelSet labels = LoadLabels(corpus, static_cast<std::size_t>(n_tr), stage);
    const auto& x = noisy ? set->noisy : set->clean;
    std::vector<net::TrainExample> examples;
    for (int i = 0; i < n_tr; ++i) examples.push_back({&x[i], &labels.frame_labels[i], nullptr});
    const net::TrainResult r = net::Train(net::InitNet(arch, init_seed), examples, tc);
    Json side;
    side["kind"] = stage;
    side["architecture"] = ToJson(arch);
    side["init_seed"] = init_seed;
    side["train"] = ToJson(tc);
    side["seed"] = cfg_.seed;
    side["data_hash"] = ContentKey(data);
    side["epoch_loss"] = r.epoch_loss;
    WriteModelWithSidecar(dir, r.params, side);
  }, &built);
  RecordTiming(stage, std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

StageRef Experiment::Teacher() { return TrainHard("teacher", false); }

StageRef Experiment::MultiCondition() { return TrainHard("multicond", true); }

StageRef Experiment::TeacherLogits() {
  const StageRef teacher = Teacher();
  const StageRef feats = Features({Split::kTrain, 0, 0});
  Json desc{{"teacher", teacher.key}, {"features", feats.key}};
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure("logits", desc, [&](const fs::path& dir) {
    const net::NetParams params = net::ReadModel(teacher.dir / "model.dnet");
    const auto set = LoadFeatures(feats);
    std::vector<codec::DenseUtterance> dense(set->ids.size());
    ParallelFor(dense.size(), cfg_.jobs, [&](std::size_t i) {
      dense[i].id = set->ids[i];
      dense[i].logits = net::Forward(params, set->clean[i]);
    });
    codec::CodecParams cp;
    cp.k = params.output_dim();
    cp.temperature = 1.0;
    std::ofstream os(dir / "logits.stgt", std::ios::binary);
    codec::EncodeStream(dense, cp, os);
    os.close();
    if (!os) throw IoError("cannot write " + (dir / "logits.stgt").string());
  }, &built);
  RecordTiming("logits", std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

StageRef Experiment::SoftTargets(int k, double temperature) {
  const StageRef logits = TeacherLogits();
  const int n = cfg_.corpus.n_classes;
  const int kk = k == kMaxK ? n : k;
  Json desc{{"logits", logits.key}, {"k", kk}, {"temperature", temperature}};
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure("targets", desc, [&](const fs::path& dir) {
    std::ifstream is(logits.dir / "logits.stgt", std::ios::binary);
    if (!is) throw IoError("cannot open " + (logits.dir / "logits.stgt").string());
    codec::StgtReader reader(is);
    codec::StgtHeader header = reader.header();
    header.k = static_cast<std::uint16_t>(kk);
    header.temperature = static_cast<float>(temperature);
    std::ofstream os(dir / "targets.stgt", std::ios::binary);
    codec::StgtWriter writer(os, header);
    codec::SoftTargetUtterance utt;
    std::vector<double> z(header.num_classes);
    while (reader.Next(utt)) {
      codec::SoftTargetUtterance out{utt.id, {}};
      out.frames.reserve(utt.frames.size());
      for (const codec::SparseFrame& f : utt.frames) {
        for (const codec::SparseEntry& e : f.entries) z[e.index] = e.logit;
        out.frames.push_back(codec::MakeSparseFrame(z, kk));
      }
      writer.Write(out);
    }
    writer.Finish();
    os.close();
    if (!os) throw IoError("cannot write " + (dir / "targets.stgt").string());
  }, &built);
  RecordTiming("targets", std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

std::shared_ptr<const std::vector<std::vector<codec::SparseFrame>>> Experiment::LoadTargets(
    const StageRef& targets, const std::vector<std::string>& ids) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = target_sets_.find(targets.key);
    if (it != target_sets_.end()) return it->second;
  }
  std::ifstream is(targets.dir / "targets.stgt", std::ios::binary);
  if (!is) throw IoError("cannot open " + (targets.dir / "targets.stgt").string());
  codec::StgtReader reader(is);
  auto out = std::make_shared<std::vector<std::vector<codec::SparseFrame>>>();
  codec::SoftTargetUtterance utt;
  std::size_t i = 0;
  while (reader.Next(utt)) {
    if (i >= ids.size() || utt.id != ids[i])
      throw InvalidArgument("soft targets: utterance order differs from the feature set at " +
                            utt.id);
    out->push_back(std::move(utt.frames));
    ++i;
  }
  if (i != ids.size()) throw InvalidArgument("soft targets: missing utterances");
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = target_sets_.emplace(targets.key, std::move(out));
  return it->second;
}

StageRef Experiment::Student(double temperature, int k, int multiplier, int noise_bank_size) {
  if (multiplier < 1) throw InvalidArgument("student: multiplier must be >= 1");
  const StageRef teacher = Teacher();
  const StageRef targets = SoftTargets(k, temperature);
  const CorpusId base{Split::kTrain, 0, 0};
  const StageRef base_feats = Features(base);
  std::vector<StageRef> copies;
  for (int c = 0; c < multiplier; ++c)
    copies.push_back(Features({Split::kTrain, c, noise_bank_size}));
  const net::TrainConfig tc =
      ToTrainConfig(cfg_.student.train, DeriveSeed(cfg_.seed, "student-train"),
                    net::LossKind::kSoft, temperature);
  const int finetune = cfg_.student.finetune_epochs;
  const int n_tr = NumTranscribed();

  Json desc;
  desc["teacher"] = teacher.key;
  desc["targets"] = targets.key;
  Json copy_keys = Json::array();
  for (const auto& c : copies) copy_keys.push_back(c.key);
  desc["features"] = copy_keys;
  desc["train"] = ToJson(tc);
  std::optional<StageRef> corpus;
  net::TrainConfig ft;
  if (finetune > 0) {
    corpus = Corpus(base);
    TrainSection s = cfg_.student.train;
    s.epochs = finetune;
    s.learning_rate = cfg_.student.finetune_learning_rate;
    ft = ToTrainConfig(s, DeriveSeed(cfg_.seed, "student-finetune"), net::LossKind::kHard);
    desc["finetune"] = {{"corpus", corpus->key}, {"features", base_feats.key},
                        {"n_transcribed", n_tr}, {"train", ToJson(ft)}};
  }
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure("student", desc, [&](const fs::path& dir) {
    net::NetParams init = net::ReadModel(teacher.dir / "model.dnet");
    const auto base_set = LoadFeatures(base_feats);
    const auto soft = LoadTargets(targets, base_set->ids);
    std::vector<std::shared_ptr<const FeatureSet>> sets;
    std::vector<net::TrainExample> examples;
    for (const StageRef& c : copies) {
      sets.push_back(LoadFeatures(c));
      const FeatureSet& s = *sets.back();
      if (s.ids != base_set->ids)
        throw InvalidArgument("student: copy " + c.key.substr(0, 16) +
                              " does not share the base utterance ids");
      for (std::size_t i = 0; i < s.ids.size(); ++i)
        examples.push_back({&s.noisy[i], nullptr, &(*soft)[i]});
    }
    net::TrainResult r = net::Train(std::move(init), examples, tc);
    Json side;
    side["kind"] = "student";
    side["teacher"] = teacher.key;
    side["train"] = ToJson(tc);
    side["seed"] = cfg_.seed;
    side["data_hash"] = ContentKey(Json{{"targets", targets.key}, {"features", copy_keys}});
    side["epoch_loss"] = r.epoch_loss;
    if (finetune > 0) {
      // Stand-in for sequence training: hard-label CE on the transcribed
      // noisy subset.
      const LabelSet labels =
          LoadLabels(*corpus, static_cast<std::size_t>(n_tr), "student-finetune");
      std::vector<net::TrainExample> hard;
      for (int i = 0; i < n_tr; ++i)
        hard.push_back({&base_set->noisy[i], &labels.frame_labels[i], nullptr});
      net::TrainResult f = net::Train(std::move(r.params), hard, ft);
      r.params = std::move(f.params);
      side["finetune"] = {{"train", ToJson(ft)}, {"epoch_loss", f.epoch_loss}};
    }
    WriteModelWithSidecar(dir, r.params, side);
  }, &built);
  RecordTiming("student", std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

StageRef Experiment::Evaluation(const StageRef& model) {
  const CorpusId test{Split::kTest, 0, 0};
  const StageRef corpus = Corpus(test);
  const StageRef feats = Features(test);
  Json desc{{"model", model.key}, {"corpus", corpus.key}, {"features", feats.key}};
  bool built = false;
  const auto t0 = Clock::now();
  StageRef ref = cache_.Ensure("eval", desc, [&](const fs::path& dir) {
    const net::NetParams params = net::ReadModel(model.dir / "model.dnet");
    const auto set = LoadFeatures(feats);
    const LabelSet labels = LoadLabels(corpus, set->ids.size(), "eval");
    Json out;
    for (auto [name, x] : {std::pair<const char*, const std::vector<FrameMatrix>*>{"clean", &set->clean},
                           {"noisy", &set->noisy}}) {
      std::vector<net::EvalExample> ex;
      for (std::size_t i = 0; i < x->size(); ++i)
        ex.push_back({&(*x)[i], &labels.frame_labels[i], &labels.token_refs[i]});
      out[name] = EvalJson(net::Evaluate(params, ex, cfg_.jobs));
    }
    WriteText(dir / "eval.json", out.dump(2) + "\n");
  }, &built);
  RecordTiming("eval", std::chrono::duration<double>(Clock::now() - t0).count(), built);
  return ref;
}

EvalSummary Experiment::ReadEvaluation(const StageRef& eval) const {
  const Json j = ReadJson(eval.dir / "eval.json");
  EvalSummary s;
  s.clean_ter = j.at("clean").at("ter").get<double>();
  s.clean_frame_accuracy = j.at("clean").at("frame_accuracy").get<double>();
  s.noisy_ter = j.at("noisy").at("ter").get<double>();
  s.noisy_frame_accuracy = j.at("noisy").at("frame_accuracy").get<double>();
  return s;
}

EvalSummary Experiment::Evaluate(const StageRef& model) {
  return ReadEvaluation(Evaluation(model));
}

SystemRow Experiment::Row(const std::string& name, const EvalSummary& e,
                          const EvalSummary& baseline) const {
  return {name, e.clean_ter, e.noisy_ter, Werr(baseline.clean_ter, e.clean_ter),
          Werr(baseline.noisy_ter, e.noisy_ter)};
}

RunReport Experiment::RunTable() {
  RunReport report;
  report.seed = cfg_.seed;
  report.config_hash = ConfigHash();
  const EvalSummary baseline = Evaluate(Teacher());
  const EvalSummary multi = Evaluate(MultiCondition());
  report.systems.push_back(Row("baseline", baseline, baseline));
  report.systems.push_back(Row("multi-condition", multi, baseline));
  const auto& temps = cfg_.student.temperatures;
  std::vector<EvalSummary> students(temps.size());
  ParallelFor(temps.size(), cfg_.jobs, [&](std::size_t i) {
    students[i] = Evaluate(Student(temps[i], cfg_.codec.k));
  });
  for (std::size_t i = 0; i < temps.size(); ++i)
    report.systems.push_back(Row("student-T" + FormatDouble(temps[i]) + "-k" + KName(cfg_.codec.k),
                                 students[i], baseline));
  return report;
}

std::vector<GridRow> Experiment::SweepTk() {
  const EvalSummary baseline = Evaluate(Teacher());
  TeacherLogits();
  std::vector<std::pair<double, int>> cells;
  for (double t : cfg_.sweep.temperatures)
    for (int k : cfg_.sweep.ks) cells.emplace_back(t, k);
  std::vector<EvalSummary> evals(cells.size());
  ParallelFor(cells.size(), cfg_.jobs, [&](std::size_t i) {
    evals[i] = Evaluate(Student(cells[i].first, cells[i].second));
  });
  std::vector<GridRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const SystemRow r = Row("", evals[i], baseline);
    rows.push_back({cells[i].first, cells[i].second, r.clean_ter, r.noisy_ter, r.clean_werr,
                    r.noisy_werr});
  }
  return rows;
}

std::vector<SizeRow> Experiment::SweepSize() {
  const EvalSummary baseline = Evaluate(Teacher());
  TeacherLogits();
  const auto& mults = cfg_.sweep.size_multipliers;
  const int bank = cfg_.sweep.size_noise_bank_size;
  // Corpus copies are shared between multipliers, so build them up front.
  int max_m = 0;
  for (int m : mults) max_m = std::max(max_m, m);
  std::vector<int> copies(static_cast<std::size_t>(max_m));
  for (int c = 0; c < max_m; ++c) copies[c] = c;
  ParallelFor(copies.size(), cfg_.jobs, [&](std::size_t c) {
    Features({Split::kTrain, copies[c], bank});
  });
  std::vector<EvalSummary> evals(mults.size());
  ParallelFor(mults.size(), cfg_.jobs, [&](std::size_t i) {
    evals[i] = Evaluate(Student(cfg_.sweep.size_temperature, cfg_.sweep.size_k, mults[i], bank));
  });
  std::vector<SizeRow> rows;
  for (std::size_t i = 0; i < mults.size(); ++i) {
    const SystemRow r = Row("", evals[i], baseline);
    rows.push_back({mults[i], r.clean_ter, r.noisy_ter, r.clean_werr, r.noisy_werr});
  }
  return rows;
}

}  // namespace tsda::pipeline
