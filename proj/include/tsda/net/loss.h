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

#ifndef TSDA_NET_LOSS_H_
#define TSDA_NET_LOSS_H_

#include <cstdint>
#include <span>

#include "tsda/codec/posterior.h"
#include "tsda/common/frame_matrix.h"

namespace tsda::net {

struct LossResult {
  double loss = 0.0;
  FrameMatrix grad;  // d loss / d logits, same shape as the logits
  std::size_t frames = 0;  // frames the mean is taken over
};

/// Mean cross-entropy against hard labels. Output frame t is scored against
/// labels[t - label_delay]; the first label_delay frames carry no loss.
LossResult HardCeLoss(const FrameMatrix& logits, std::span<const std::uint16_t> labels,
                      int label_delay);

/// Mean over frames of -sum_{i in K} q'_i log p_i, where q' is the top-k
/// teacher posterior at temperature T and p = softmax(student / T).
/// Gradient per frame: (p - q') / T, q' zero off K.
LossResult SoftCeLoss(const FrameMatrix& logits, std::span<const codec::SparseFrame> targets,
                      double temperature);

}  // namespace tsda::net

#endif  // TSDA_NET_LOSS_H_
