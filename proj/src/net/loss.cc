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

#include "tsda/net/loss.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsda/common/error.h"

namespace tsda::net {
namespace {

// log-softmax of one row at temperature T, written into `out`.
void LogSoftmax(std::span<const double> z, double temperature, std::span<double> out) {
  const double m = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double v : z) sum += std::exp((v - m) / temperature);
  const double log_norm = std::log(sum);
  for (std::size_t i = 0; i < z.size(); ++i) out[i] = (z[i] - m) / temperature - log_norm;
}

}  // namespace

LossResult HardCeLoss(const FrameMatrix& logits, std::span<const std::uint16_t> labels,
                      int label_delay) {
  if (label_delay < 0) throw InvalidArgument("hard loss: negative label delay");
  const std::size_t frames = logits.rows;
  const auto delay = static_cast<std::size_t>(label_delay);
  if (frames < delay) throw InvalidArgument("hard loss: fewer frames than the label delay");
  if (labels.size() < frames - delay)
    throw InvalidArgument("hard loss: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(frames) + " frames");
  LossResult r;
  r.grad = FrameMatrix(frames, logits.cols);
  r.frames = frames - delay;
  if (r.frames == 0) return r;
  std::vector<double> logp(logits.cols);
  const double inv = 1.0 / static_cast<double>(r.frames);
  for (std::size_t t = delay; t < frames; ++t) {
    const std::uint16_t label = labels[t - delay];
    if (label >= logits.cols)
      throw InvalidArgument("hard loss: label " + std::to_string(label) + " >= N=" +
                            std::to_string(logits.cols));
    LogSoftmax(logits.row(t), 1.0, logp);
    r.loss -= logp[label] * inv;
    auto g = r.grad.row(t);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(logp[i]) * inv;
    g[label] -= inv;
  }
  return r;
}

LossResult SoftCeLoss(const FrameMatrix& logits, std::span<const codec::SparseFrame> targets,
                      double temperature) {
  if (!(temperature > 0.0)) throw InvalidArgument("soft loss: temperature must be positive");
  if (targets.size() != logits.rows)
    throw InvalidArgument("soft loss: " + std::to_string(targets.size()) +
                          " target frames for " + std::to_string(logits.rows) + " student frames");
  LossResult r;
  r.grad = FrameMatrix(logits.rows, logits.cols);
  r.frames = logits.rows;
  if (r.frames == 0) return r;
  std::vector<double> logp(logits.cols);
  const double inv = 1.0 / static_cast<double>(r.frames);
  for (std::size_t t = 0; t < logits.rows; ++t) {
    const codec::SparseFrame& target = targets[t];
    if (target.entries.empty()) throw InvalidArgument("soft loss: empty target selection");
    const std::vector<double> q = codec::SparsePosterior(target, temperature);
    LogSoftmax(logits.row(t), temperature, logp);
    auto g = r.grad.row(t);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = std::exp(logp[i]) * inv / temperature;
    for (std::size_t e = 0; e < q.size(); ++e) {
      const std::size_t i = target.entries[e].index;
      if (i >= logits.cols) throw InvalidArgument("soft loss: target class out of range");
      r.loss -= q[e] * logp[i] * inv;
      g[i] -= q[e] * inv / temperature;
    }
  }
  return r;
}

}  // namespace tsda::net
