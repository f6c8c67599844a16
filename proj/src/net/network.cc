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

#include "tsda/net/network.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "tsda/common/error.h"
#include "tsda/common/rng.h"

namespace tsda::net {
namespace {

void ApplyActivation(Activation act, Eigen::Ref<RowMatrix> m) {
  if (act == Activation::kTanh) m = m.array().tanh();
}

bool AllFinite(const Matrix& m) { return m.allFinite(); }

}  // namespace

std::size_t NetParams::num_parameters() const {
  std::size_t n = 0;
  for (const Layer& l : layers)
    n += static_cast<std::size_t>(l.weight.size() + l.bias.size() +
                                  (l.recurrent ? l.recurrent_weight.size() : 0));
  return n;
}

NetParams InitNet(const ArchitectureSpec& arch, std::uint64_t seed) {
  if (arch.feat_dim < 1 || arch.context < 0 || arch.num_classes < 1 || arch.label_delay < 0)
    throw InvalidArgument("init: invalid architecture");
  NetParams p;
  p.feat_dim = arch.feat_dim;
  p.context = arch.context;
  p.label_delay = arch.label_delay;
  Rng rng(DeriveSeed(seed, "net-init"));
  int in = p.input_dim();
  std::vector<int> dims = arch.hidden;
  dims.push_back(arch.num_classes);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const bool output = i + 1 == dims.size();
    Layer l;
    l.activation = output ? Activation::kIdentity : Activation::kTanh;
    l.recurrent = !output && arch.recurrent;
    const int out = dims[i];
    if (out < 1) throw InvalidArgument("init: layer width must be positive");
    const double range = arch.init_scale * std::sqrt(6.0 / (in + out));
    l.weight.resize(out, in);
    for (int r = 0; r < out; ++r)
      for (int c = 0; c < in; ++c) l.weight(r, c) = rng.Uniform(-range, range);
    l.bias = Vector::Zero(out);
    if (l.recurrent) {
      const double rrange = arch.init_scale * std::sqrt(3.0 / out);
      l.recurrent_weight.resize(out, out);
      for (int r = 0; r < out; ++r)
        for (int c = 0; c < out; ++c) l.recurrent_weight(r, c) = rng.Uniform(-rrange, rrange);
    }
    p.layers.push_back(std::move(l));
    in = out;
  }
  return p;
}

void Validate(const NetParams& params) {
  if (params.layers.empty()) throw InvalidArgument("net: no layers");
  if (params.label_delay < 0) throw InvalidArgument("net: negative label delay");
  if (params.feat_dim < 1 || params.context < 0) throw InvalidArgument("net: invalid input shape");
  int in = params.input_dim();
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const Layer& l = params.layers[i];
    const std::string where = "net: layer " + std::to_string(i);
    if (l.in_dim() != in) throw InvalidArgument(where + " input dimension does not chain");
    if (l.bias.size() != l.weight.rows()) throw InvalidArgument(where + " bias size mismatch");
    if (l.recurrent && (l.recurrent_weight.rows() != l.out_dim() ||
                        l.recurrent_weight.cols() != l.out_dim()))
      throw InvalidArgument(where + " recurrent weight must be square");
    if (!AllFinite(l.weight) || !l.bias.allFinite() ||
        (l.recurrent && !AllFinite(l.recurrent_weight)))
      throw InvalidArgument(where + " has non-finite parameters");
    in = l.out_dim();
  }
}

RowMatrix ExpandContext(const FrameMatrix& feats, int context) {
  const auto frames = static_cast<std::ptrdiff_t>(feats.rows);
  const auto dim = static_cast<std::ptrdiff_t>(feats.cols);
  RowMatrix x(frames, dim * (2 * context + 1));
  for (std::ptrdiff_t t = 0; t < frames; ++t) {
    for (int j = -context; j <= context; ++j) {
      const std::ptrdiff_t src = std::clamp<std::ptrdiff_t>(t + j, 0, frames - 1);
      const double* from = feats.data.data() + src * dim;
      std::copy(from, from + dim, x.row(t).data() + (j + context) * dim);
    }
  }
  return x;
}

void ForwardBatch(const NetParams& params, RowMatrix input,
                  std::vector<std::size_t> segment_starts, ForwardCache& cache) {
  if (input.cols() != params.input_dim())
    throw InvalidArgument("forward: input has " + std::to_string(input.cols()) +
                          " columns, network expects " + std::to_string(params.input_dim()));
  if (segment_starts.empty() || segment_starts.front() != 0)
    throw InvalidArgument("forward: segment offsets must start at 0");
  cache.input = std::move(input);
  cache.segment_starts = std::move(segment_starts);
  cache.outputs.resize(params.layers.size());
  const auto rows = cache.input.rows();
  const RowMatrix* x = &cache.input;
  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const Layer& l = params.layers[li];
    RowMatrix& h = cache.outputs[li];
    h.noalias() = *x * l.weight.transpose();
    h.rowwise() += l.bias.transpose();
    if (!l.recurrent) {
      ApplyActivation(l.activation, h);
    } else {
      std::size_t seg = 0;
      for (Eigen::Index t = 0; t < rows; ++t) {
        const bool start = seg < cache.segment_starts.size() &&
                           static_cast<std::size_t>(t) == cache.segment_starts[seg];
        if (start) ++seg;
        if (!start) h.row(t) += h.row(t - 1) * l.recurrent_weight.transpose();
        if (l.activation == Activation::kTanh) h.row(t) = h.row(t).array().tanh();
      }
    }
    x = &h;
  }
}

FrameMatrix Forward(const NetParams& params, const FrameMatrix& feats) {
  if (static_cast<int>(feats.cols) != params.feat_dim && feats.rows > 0)
    throw InvalidArgument("forward: feature dimension " + std::to_string(feats.cols) +
                          " does not match network input " + std::to_string(params.feat_dim));
  FrameMatrix logits(feats.rows, static_cast<std::size_t>(params.output_dim()));
  if (feats.rows == 0) return logits;
  ForwardCache cache;
  ForwardBatch(params, ExpandContext(feats, params.context), {0}, cache);
  const RowMatrix& out = cache.outputs.back();
  std::copy(out.data(), out.data() + out.size(), logits.data.begin());
  return logits;
}

Gradient ZeroGradient(const NetParams& params) {
  Gradient g;
  for (const Layer& l : params.layers) {
    g.weight.push_back(Matrix::Zero(l.weight.rows(), l.weight.cols()));
    g.bias.push_back(Vector::Zero(l.bias.size()));
    g.recurrent_weight.push_back(l.recurrent ? Matrix::Zero(l.out_dim(), l.out_dim()) : Matrix());
  }
  return g;
}

void Backward(const NetParams& params, const ForwardCache& cache,
              const RowMatrix& logit_grad, Gradient& grad) {
  RowMatrix delta = logit_grad;  // d loss / d layer output
  const auto rows = delta.rows();
  for (std::size_t li = params.layers.size(); li-- > 0;) {
    const Layer& l = params.layers[li];
    const RowMatrix& h = cache.outputs[li];
    const RowMatrix& x = li == 0 ? cache.input : cache.outputs[li - 1];
    // delta becomes d loss / d pre-activation.
    if (!l.recurrent) {
      if (l.activation == Activation::kTanh)
        delta.array() *= 1.0 - h.array().square();
    } else {
      // Walk each segment backwards, carrying the recurrent term.
      std::vector<std::size_t> bounds = cache.segment_starts;
      bounds.push_back(static_cast<std::size_t>(rows));
      for (std::size_t s = bounds.size() - 1; s-- > 0;) {
        const auto begin = static_cast<Eigen::Index>(bounds[s]);
        const auto end = static_cast<Eigen::Index>(bounds[s + 1]);
        for (Eigen::Index t = end - 1; t >= begin; --t) {
          if (t + 1 < end) delta.row(t) += delta.row(t + 1) * l.recurrent_weight;
          if (l.activation == Activation::kTanh)
            delta.row(t).array() *= 1.0 - h.row(t).array().square();
          if (t > begin)
            grad.recurrent_weight[li].noalias() += delta.row(t).transpose() * h.row(t - 1);
        }
      }
    }
    grad.weight[li].noalias() += delta.transpose() * x;
    grad.bias[li] += delta.colwise().sum().transpose();
    if (li > 0) delta = delta * l.weight;
  }
}

std::vector<double> Flatten(const NetParams& params) {
  std::vector<double> flat;
  flat.reserve(params.num_parameters());
  for (const Layer& l : params.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) flat.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) flat.push_back(l.bias(r));
    if (l.recurrent)
      for (Eigen::Index r = 0; r < l.recurrent_weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.recurrent_weight.cols(); ++c)
          flat.push_back(l.recurrent_weight(r, c));
  }
  return flat;
}

std::vector<double> Flatten(const NetParams& params, const Gradient& grad) {
  std::vector<double> flat;
  flat.reserve(params.num_parameters());
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const Matrix& w = grad.weight[i];
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    for (Eigen::Index r = 0; r < grad.bias[i].size(); ++r) flat.push_back(grad.bias[i](r));
    if (params.layers[i].recurrent) {
      const Matrix& u = grad.recurrent_weight[i];
      for (Eigen::Index r = 0; r < u.rows(); ++r)
        for (Eigen::Index c = 0; c < u.cols(); ++c) flat.push_back(u(r, c));
    }
  }
  return flat;
}

void Unflatten(std::span<const double> flat, NetParams& params) {
  if (flat.size() != params.num_parameters())
    throw InvalidArgument("unflatten: parameter count mismatch");
  std::size_t k = 0;
  for (Layer& l : params.layers) {
    for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weight.cols(); ++c) l.weight(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) l.bias(r) = flat[k++];
    if (l.recurrent)
      for (Eigen::Index r = 0; r < l.recurrent_weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.recurrent_weight.cols(); ++c)
          l.recurrent_weight(r, c) = flat[k++];
  }
}

}  // namespace tsda::net
