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

#ifndef TSDA_PIPELINE_EXPERIMENT_H_
#define TSDA_PIPELINE_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tsda/codec/posterior.h"
#include "tsda/common/frame_matrix.h"
#include "tsda/net/network.h"
#include "tsda/pipeline/cache.h"
#include "tsda/pipeline/config.h"
#include "tsda/pipeline/report.h"

namespace tsda::pipeline {

enum class Split { kTrain, kTest };

/// Identifies one simulated corpus. Copy 0 with the configured bank is the
/// base corpus; other copies re-draw rooms, noises and SNRs over the same
/// clean utterances and carry no supervision.
struct CorpusId {
  Split split = Split::kTrain;
  int copy = 0;
  int noise_bank_size = 0;  // 0: as configured
  bool base() const { return copy == 0 && noise_bank_size == 0; }
};

struct EvalSummary {
  double clean_ter = 0.0;
  double clean_frame_accuracy = 0.0;
  double noisy_ter = 0.0;
  double noisy_frame_accuracy = 0.0;
};

/// Stage graph of one experiment. Every stage is a cached directory whose
/// key hashes the configuration fields it reads and the keys of its inputs,
/// so requesting a stage builds exactly what is missing upstream.
///
/// Seeds: every draw descends from the global seed through a stage tag
/// (DeriveSeed(seed, tag)), then from item indices inside the stage.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig cfg);

  const ExperimentConfig& config() const { return cfg_; }
  StageCache& cache() { return cache_; }

  /// Hash of the canonical config with the output directory and job count
  /// removed; neither affects results.
  std::string ConfigHash() const;

  StageRef Corpus(const CorpusId& id);
  StageRef Features(const CorpusId& id);
  StageRef Teacher();
  StageRef MultiCondition();
  /// Teacher logits over the clean training audio, stored as k = N STGT.
  StageRef TeacherLogits();
  StageRef SoftTargets(int k, double temperature);
  StageRef Student(double temperature, int k, int multiplier = 1, int noise_bank_size = 0);
  StageRef Evaluation(const StageRef& model);
  EvalSummary Evaluate(const StageRef& model);

  int NumTranscribed() const;

  RunReport RunTable();
  std::vector<GridRow> SweepTk();
  std::vector<SizeRow> SweepSize();

  /// Wall-clock seconds per stage built by this object. Kept apart from the
  /// reports, which must be byte-identical across reruns.
  std::map<std::string, double> Timings() const;

  /// Number of label files opened while building stages of the given kind.
  /// The student stages must never open any.
  int LabelReads(const std::string& stage) const;

 private:
  struct FeatureSet {
    std::vector<std::string> ids;
    std::vector<FrameMatrix> clean;  // empty for copies
    std::vector<FrameMatrix> noisy;
  };
  struct LabelSet {
    std::vector<std::vector<std::uint16_t>> frame_labels;
    std::vector<std::vector<std::uint16_t>> token_refs;
  };

  std::shared_ptr<const FeatureSet> LoadFeatures(const StageRef& feats);
  LabelSet LoadLabels(const StageRef& corpus, std::size_t count, const std::string& stage);
  std::shared_ptr<const std::vector<std::vector<codec::SparseFrame>>> LoadTargets(
      const StageRef& targets, const std::vector<std::string>& ids);
  StageRef TrainHard(const std::string& stage, bool noisy);
  EvalSummary ReadEvaluation(const StageRef& eval) const;
  SystemRow Row(const std::string& name, const EvalSummary& e, const EvalSummary& baseline) const;
  void RecordTiming(const std::string& stage, double seconds, bool built);

  ExperimentConfig cfg_;
  StageCache cache_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<const FeatureSet>> feature_sets_;
  std::map<std::string, std::shared_ptr<const std::vector<std::vector<codec::SparseFrame>>>>
      target_sets_;
  std::map<std::string, double> timings_;
  std::map<std::string, int> label_reads_;
};

}  // namespace tsda::pipeline

#endif  // TSDA_PIPELINE_EXPERIMENT_H_
