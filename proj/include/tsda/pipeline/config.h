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

#ifndef TSDA_PIPELINE_CONFIG_H_
#define TSDA_PIPELINE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tsda/features/lfbe.h"
#include "tsda/net/network.h"
#include "tsda/net/train.h"
#include "tsda/signal/corpus.h"

namespace tsda::pipeline {

/// k value meaning "keep every logit".
inline constexpr int kMaxK = 0;

struct CorpusSection {
  signal::SimConfig sim;  // sim.seed is derived from the global seed
  int n_utts = 2000;
  int n_classes = 40;
  double transcribed_fraction = 0.1;
  int test_utts = 200;
  std::pair<int, int> tokens_per_utt{3, 6};
  std::pair<int, int> segment_frames{8, 16};
};

struct TrainSection {
  double learning_rate = 0.01;
  double momentum = 0.9;
  int epochs = 8;
  int batch_size = 8;
  double max_grad_norm = 5.0;
};

struct StudentSection {
  TrainSection train;
  /// Temperatures of the student rows in the main table.
  std::vector<double> temperatures = {1.0, 2.0, 5.0};
  /// Optional hard-label fine-tuning on the transcribed noisy subset.
  int finetune_epochs = 0;
  double finetune_learning_rate = 0.005;
};

struct CodecSection {
  int k = kMaxK;
  double temperature = 2.0;  // advisory default stored in STGT headers
  std::optional<double> floor_constant;  // unset: min selected - 50 T
};

struct SweepSection {
  std::vector<double> temperatures = {1.0, 2.0, 5.0};
  std::vector<int> ks = {5, 20, 40, kMaxK};
  std::vector<int> size_multipliers = {1, 2, 4, 6, 8, 10};
  double size_temperature = 2.0;
  int size_k = 20;
  /// Overrides the noise bank size of the size sweep corpora (0: unchanged).
  int size_noise_bank_size = 0;
};

struct ExperimentConfig {
  std::uint64_t seed = 1;
  int jobs = 1;
  CorpusSection corpus;
  features::FrontEndConfig features;
  net::ArchitectureSpec model{.init_scale = 0.3};  // feat_dim and num_classes follow the other sections
  TrainSection teacher{.epochs = 30};
  TrainSection multicond{.epochs = 30};
  StudentSection student;
  CodecSection codec;
  SweepSection sweep;
  std::filesystem::path output_dir = "runs/default";
};

/// Throws ConfigError naming the offending field.
void Validate(const ExperimentConfig& cfg);

/// Parses TOML text. Absent keys keep their defaults; unknown keys are
/// rejected so typos do not pass silently.
ExperimentConfig ParseConfig(const std::string& toml_text, const std::string& origin = "<string>");
ExperimentConfig LoadConfig(const std::filesystem::path& path);

/// Canonical TOML rendering; ParseConfig(DumpConfig(c)) reproduces c.
std::string DumpConfig(const ExperimentConfig& cfg);

/// "max" for kMaxK, else the decimal value.
std::string KName(int k);

/// The architecture with feat_dim and num_classes filled in.
net::ArchitectureSpec Architecture(const ExperimentConfig& cfg);

net::TrainConfig ToTrainConfig(const TrainSection& s, std::uint64_t seed, net::LossKind loss,
                               double temperature = 1.0);

/// JSON views used in cache keys and sidecars.
nlohmann::ordered_json ToJson(const signal::SimConfig& sim);
nlohmann::ordered_json ToJson(const features::FrontEndConfig& fe);
nlohmann::ordered_json ToJson(const net::ArchitectureSpec& arch);
nlohmann::ordered_json ToJson(const net::TrainConfig& tc);

}  // namespace tsda::pipeline

#endif  // TSDA_PIPELINE_CONFIG_H_
