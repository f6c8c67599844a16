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

#ifndef TSDA_NET_DECODE_H_
#define TSDA_NET_DECODE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "tsda/common/frame_matrix.h"

namespace tsda::net {

/// Per-frame argmax (lower index wins ties) with consecutive repeats
/// collapsed.
std::vector<std::uint16_t> DecodeTokens(const FrameMatrix& logits);

struct EditCounts {
  std::size_t substitutions = 0;
  std::size_t deletions = 0;
  std::size_t insertions = 0;
  std::size_t errors() const { return substitutions + deletions + insertions; }
};

struct TokenErrorRate {
  double ter = 0.0;
  EditCounts counts;
};

/// Levenshtein alignment of hypothesis against reference. Throws on an empty
/// reference. Among minimal alignments, substitutions are preferred, then
/// deletions.
TokenErrorRate ComputeTokenErrorRate(std::span<const std::uint16_t> hyp,
                                     std::span<const std::uint16_t> ref);

}  // namespace tsda::net

#endif  // TSDA_NET_DECODE_H_
