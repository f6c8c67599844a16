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

#ifndef TSDA_NET_TRAIN_H_
#define TSDA_NET_TRAIN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tsda/codec/posterior.h"
#include "tsda/common/error.h"
#include "tsda/common/frame_matrix.h"
#include "tsda/net/decode.h"
#include "tsda/net/network.h"

namespace tsda::net {

enum class LossKind { kHard, kSoft };

struct TrainConfig {
  double learning_rate = 0.02;
  double momentum = 0.9;
  int epochs = 10;
  int batch_size = 8;  // utterances per update
  std::uint64_t seed = 0;
  LossKind loss = LossKind::kHard;
  double temperature = 1.0;  // soft loss only
  /// Rescales the batch gradient to this global L2 norm when exceeded; 0 disables.
  double max_grad_norm = 0.0;
};

/// One training utterance. Hard training reads `labels`, soft training reads
/// `targets`; the other may be null.
struct TrainExample {
  const FrameMatrix* features = nullptr;
  const std::vector<std::uint16_t>* labels = nullptr;
  const std::vector<codec::SparseFrame>* targets = nullptr;
};

struct TrainResult {
  NetParams params;
  std::vector<double> epoch_loss;  // frame-weighted mean training loss per epoch
};

class DivergedTraining : public Error {
 public:
  using Error::Error;
};

/// SGD with momentum over utterances shuffled per epoch from cfg.seed. A
/// batch's objective is the frame-weighted mean of its utterance losses.
/// Throws DivergedTraining on a non-finite loss.
TrainResult Train(NetParams init, std::span<const TrainExample> data, const TrainConfig& cfg);

/// Loss and gradient of one batch at fixed parameters (no update).
double BatchLossAndGradient(const NetParams& params, std::span<const TrainExample> batch,
                            const TrainConfig& cfg, Gradient* grad);

struct EvalExample {
  const FrameMatrix* features = nullptr;
  const std::vector<std::uint16_t>* labels = nullptr;
  const std::vector<std::uint16_t>* token_refs = nullptr;
};

struct UtteranceScore {
  EditCounts counts;
  std::size_t ref_tokens = 0;
  std::size_t correct_frames = 0;
  std::size_t scored_frames = 0;
};

struct EvalReport {
  double frame_accuracy = 0.0;
  double token_error_rate = 0.0;  // total edits / total reference tokens
  std::vector<UtteranceScore> utterances;
};

/// Frame accuracy honours the label delay; token errors use DecodeTokens on
/// the standard (T = 1) output.
EvalReport Evaluate(const NetParams& params, std::span<const EvalExample> data, int jobs = 1);

}  // namespace tsda::net

#endif  // TSDA_NET_TRAIN_H_
