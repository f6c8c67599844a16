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

#ifndef TSDA_CODEC_POSTERIOR_H_
#define TSDA_CODEC_POSTERIOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <vector>

namespace tsda::codec {

// Temperature softmax and top-k logits selection.
//
// With logits z over N classes and temperature T:
//   q_i  = exp(z_i/T) / sum_j exp(z_j/T)
//   q'_i = exp(z_i/T) / sum_{j in K} exp(z_j/T) = A q_i   for i in K, else 0
//   A    = sum_j exp(z_j/T) / sum_{j in K} exp(z_j/T)
// and the floor-constant variant replaces every logit outside K by C.
// All exponentials are evaluated relative to max(z).

struct CodecParams {
  int k = 20;
  double temperature = 2.0;
  /// Floor constant for the suppressed logits. Unset means the default
  /// policy: (min selected logit) - 50 T.
  std::optional<double> floor_constant;
};

struct SparseEntry {
  std::uint16_t index = 0;
  float logit = 0.0f;
  bool operator==(const SparseEntry&) const = default;
};

/// Top-k (class, logit) pairs of one frame, ordered by descending logit and
/// ascending index among equal logits.
struct SparseFrame {
  std::vector<SparseEntry> entries;
  bool operator==(const SparseFrame&) const = default;
};

std::vector<double> SoftmaxT(std::span<const double> z, double temperature);

/// Indices of the k largest logits, ordered by descending logit with ties
/// broken by ascending index.
std::vector<int> SelectTopK(std::span<const double> z, int k);

struct TopKResult {
  std::vector<double> probs;  // q', dense over N, zero off K
  double emphasis = 1.0;      // A
  std::vector<int> selected;  // K, in SelectTopK order
};

TopKResult TopKPosterior(std::span<const double> z, int k, double temperature);

/// (min selected logit) - 50 T.
double DefaultFloorConstant(std::span<const double> z, std::span<const int> selected,
                            double temperature);

/// Floor-constant posterior. Throws InvalidArgument if C exceeds a selected
/// logit. Without `floor_constant` the default policy applies.
std::vector<double> TopKPosteriorC(std::span<const double> z, int k, double temperature,
                                   std::optional<double> floor_constant = std::nullopt);

/// Emphasis factor of the floor-constant variant.
double EmphasisFactorC(std::span<const double> z, int k, double temperature,
                       double floor_constant);

/// Rounds logits to f32 first, then selects, so the stored order is
/// consistent with the stored values.
SparseFrame MakeSparseFrame(std::span<const double> z, int k);

/// q' over the frame's entries (same order) at the given temperature. This
/// is what a student is trained against.
std::vector<double> SparsePosterior(const SparseFrame& frame, double temperature);

/// Returns an empty string if the frame is valid for `num_classes`,
/// otherwise a description of the first violation.
std::string CheckSparseFrame(const SparseFrame& frame, std::uint32_t num_classes);

}  // namespace tsda::codec

#endif  // TSDA_CODEC_POSTERIOR_H_
