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

#ifndef TSDA_NET_NETWORK_H_
#define TSDA_NET_NETWORK_H_

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

#include "tsda/common/frame_matrix.h"

namespace tsda::net {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
/// Frame-major activations: one row per frame.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation : std::uint8_t { kIdentity = 0, kTanh = 1 };

/// One dense layer, optionally with a recurrent (Elman) connection:
///   a_t = W x_t + U h_{t-1} + b,  h_t = act(a_t),  h_{-1} = 0.
struct Layer {
  Matrix weight;            // out x in
  Vector bias;              // out
  Activation activation = Activation::kTanh;
  bool recurrent = false;
  Matrix recurrent_weight;  // out x out when recurrent

  int in_dim() const { return static_cast<int>(weight.cols()); }
  int out_dim() const { return static_cast<int>(weight.rows()); }
};

/// Frame classifier. Input frame t is the concatenation of feature frames
/// t-context .. t+context (edges replicated). The output at frame t is
/// trained against the label of frame t - label_delay.
struct NetParams {
  int feat_dim = 64;
  int context = 0;
  int label_delay = 3;
  std::vector<Layer> layers;

  int input_dim() const { return feat_dim * (2 * context + 1); }
  int output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
  std::size_t num_parameters() const;
};

struct ArchitectureSpec {
  int feat_dim = 64;
  int context = 5;
  std::vector<int> hidden = {64, 64};
  bool recurrent = false;
  int num_classes = 40;
  int label_delay = 3;
  /// Multiplies the Glorot-uniform initialization range.
  double init_scale = 1.0;
};

NetParams InitNet(const ArchitectureSpec& arch, std::uint64_t seed);

/// Throws InvalidArgument unless layer dimensions chain, parameters are
/// finite and label_delay >= 0.
void Validate(const NetParams& params);

/// Context-window expansion of a feature matrix (frames x feat_dim) into
/// network input rows (frames x input_dim).
RowMatrix ExpandContext(const FrameMatrix& feats, int context);

/// Layer outputs retained for backpropagation.
struct ForwardCache {
  RowMatrix input;
  std::vector<RowMatrix> outputs;  // one per layer, frames x out
  /// Row offsets of independent sequences; recurrent state resets at each.
  std::vector<std::size_t> segment_starts;
};

/// Forward pass over stacked sequences. `segment_starts` must begin with 0.
void ForwardBatch(const NetParams& params, RowMatrix input,
                  std::vector<std::size_t> segment_starts, ForwardCache& cache);

/// Logits (frames x N) of one utterance.
FrameMatrix Forward(const NetParams& params, const FrameMatrix& feats);

/// Same shapes as NetParams::layers; unused recurrent blocks stay empty.
struct Gradient {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
  std::vector<Matrix> recurrent_weight;
};

Gradient ZeroGradient(const NetParams& params);

/// Backpropagates d(loss)/d(logits), rows aligned with cache.outputs.back(),
/// and accumulates into `grad`.
void Backward(const NetParams& params, const ForwardCache& cache,
              const RowMatrix& logit_grad, Gradient& grad);

/// Flat views used by the optimizer and the gradient checker. The order is
/// the declaration order: per layer W (row-major), b, then U if recurrent.
std::vector<double> Flatten(const NetParams& params);
std::vector<double> Flatten(const NetParams& params, const Gradient& grad);
void Unflatten(std::span<const double> flat, NetParams& params);

}  // namespace tsda::net

#endif  // TSDA_NET_NETWORK_H_
