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

#include "tsda/net/train.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tsda/common/parallel.h"
#include "tsda/common/rng.h"
#include "tsda/net/loss.h"

namespace tsda::net {

double BatchLossAndGradient(const NetParams& params, std::span<const TrainExample> batch,
                            const TrainConfig& cfg, Gradient* grad) {
  // Stack the batch so every layer is one matrix product; recurrent layers
  // restart at each utterance boundary.
  std::vector<std::size_t> starts;
  Eigen::Index rows = 0;
  for (const TrainExample& ex : batch) {
    starts.push_back(static_cast<std::size_t>(rows));
    rows += static_cast<Eigen::Index>(ex.features->rows);
  }
  RowMatrix input(rows, params.input_dim());
  for (std::size_t u = 0; u < batch.size(); ++u) {
    const FrameMatrix& f = *batch[u].features;
    if (static_cast<int>(f.cols) != params.feat_dim && f.rows > 0)
      throw InvalidArgument("train: feature dimension does not match the network");
    if (f.rows > 0)
      input.middleRows(static_cast<Eigen::Index>(starts[u]), static_cast<Eigen::Index>(f.rows)) =
          ExpandContext(f, params.context);
  }
  ForwardCache cache;
  ForwardBatch(params, std::move(input), starts, cache);
  const RowMatrix& out = cache.outputs.back();

  std::vector<LossResult> losses(batch.size());
  std::size_t total_frames = 0;
  for (std::size_t u = 0; u < batch.size(); ++u) {
    const FrameMatrix& f = *batch[u].features;
    FrameMatrix logits(f.rows, static_cast<std::size_t>(out.cols()));
    if (f.rows > 0) {
      const auto block = out.middleRows(static_cast<Eigen::Index>(starts[u]),
                                        static_cast<Eigen::Index>(f.rows));
      std::copy(block.data(), block.data() + block.size(), logits.data.begin());
    }
    if (cfg.loss == LossKind::kHard) {
      if (batch[u].labels == nullptr) throw InvalidArgument("train: hard loss needs labels");
      losses[u] = HardCeLoss(logits, *batch[u].labels, params.label_delay);
    } else {
      if (batch[u].targets == nullptr) throw InvalidArgument("train: soft loss needs targets");
      losses[u] = SoftCeLoss(logits, *batch[u].targets, cfg.temperature);
    }
    total_frames += losses[u].frames;
  }
  if (total_frames == 0) return 0.0;

  double loss = 0.0;
  RowMatrix logit_grad(rows, out.cols());
  for (std::size_t u = 0; u < batch.size(); ++u) {
    const double w = static_cast<double>(losses[u].frames) / static_cast<double>(total_frames);
    loss += w * losses[u].loss;
    const FrameMatrix& g = losses[u].grad;
    for (std::size_t t = 0; t < g.rows; ++t)
      for (std::size_t c = 0; c < g.cols; ++c)
        logit_grad(static_cast<Eigen::Index>(starts[u] + t), static_cast<Eigen::Index>(c)) =
            w * g(t, c);
  }
  if (grad != nullptr) Backward(params, cache, logit_grad, *grad);
  return loss;
}

TrainResult Train(NetParams init, std::span<const TrainExample> data, const TrainConfig& cfg) {
  Validate(init);
  if (cfg.learning_rate < 0.0) throw InvalidArgument("train: negative learning rate");
  if (cfg.epochs < 1) throw InvalidArgument("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw InvalidArgument("train: batch size must be >= 1");
  if (cfg.loss == LossKind::kSoft && !(cfg.temperature > 0.0))
    throw InvalidArgument("train: temperature must be positive");

  TrainResult result;
  result.params = std::move(init);
  std::vector<double> theta = Flatten(result.params);
  std::vector<double> velocity(theta.size(), 0.0);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(DeriveSeed(cfg.seed, "shuffle", static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng.UniformInt(0, static_cast<std::int64_t>(i) - 1))]);

    double epoch_loss = 0.0;
    std::size_t epoch_frames = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
      std::vector<TrainExample> batch;
      std::size_t frames = 0;
      for (std::size_t i = begin; i < end; ++i) {
        batch.push_back(data[order[i]]);
        frames += data[order[i]].features->rows;
      }
      Gradient grad = ZeroGradient(result.params);
      const double loss = BatchLossAndGradient(result.params, batch, cfg, &grad);
      if (!std::isfinite(loss))
        throw DivergedTraining("train: loss became non-finite in epoch " + std::to_string(epoch));
      epoch_loss += loss * static_cast<double>(frames);
      epoch_frames += frames;

      std::vector<double> g = Flatten(result.params, grad);
      double scale = 1.0;
      if (cfg.max_grad_norm > 0.0) {
        double norm2 = 0.0;
        for (double v : g) norm2 += v * v;
        const double norm = std::sqrt(norm2);
        if (norm > cfg.max_grad_norm) scale = cfg.max_grad_norm / norm;
      }
      for (std::size_t k = 0; k < theta.size(); ++k) {
        velocity[k] = cfg.momentum * velocity[k] - cfg.learning_rate * scale * g[k];
        theta[k] += velocity[k];
      }
      Unflatten(theta, result.params);
    }
    result.epoch_loss.push_back(epoch_frames ? epoch_loss / static_cast<double>(epoch_frames) : 0.0);
  }
  return result;
}

EvalReport Evaluate(const NetParams& params, std::span<const EvalExample> data, int jobs) {
  EvalReport report;
  report.utterances.resize(data.size());
  ParallelFor(data.size(), jobs, [&](std::size_t u) {
    const EvalExample& ex = data[u];
    const FrameMatrix logits = Forward(params, *ex.features);
    UtteranceScore& s = report.utterances[u];
    if (ex.labels != nullptr) {
      const auto delay = static_cast<std::size_t>(params.label_delay);
      for (std::size_t t = delay; t < logits.rows && t - delay < ex.labels->size(); ++t) {
        const auto row = logits.row(t);
        const auto best = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
        s.correct_frames += best == (*ex.labels)[t - delay];
        ++s.scored_frames;
      }
    }
    if (ex.token_refs != nullptr) {
      const TokenErrorRate ter = ComputeTokenErrorRate(DecodeTokens(logits), *ex.token_refs);
      s.counts = ter.counts;
      s.ref_tokens = ex.token_refs->size();
    }
  });
  std::size_t correct = 0, scored = 0, errors = 0, refs = 0;
  for (const UtteranceScore& s : report.utterances) {
    correct += s.correct_frames;
    scored += s.scored_frames;
    errors += s.counts.errors();
    refs += s.ref_tokens;
  }
  report.frame_accuracy = scored ? static_cast<double>(correct) / static_cast<double>(scored) : 0.0;
  report.token_error_rate = refs ? static_cast<double>(errors) / static_cast<double>(refs) : 0.0;
  return report;
}

}  // namespace tsda::net
