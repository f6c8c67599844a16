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

#include "tsda/net/decode.h"

#include <algorithm>

#include "tsda/common/error.h"

namespace tsda::net {

std::vector<std::uint16_t> DecodeTokens(const FrameMatrix& logits) {
  std::vector<std::uint16_t> tokens;
  for (std::size_t t = 0; t < logits.rows; ++t) {
    const auto row = logits.row(t);
    const auto best = static_cast<std::uint16_t>(std::max_element(row.begin(), row.end()) - row.begin());
    if (tokens.empty() || tokens.back() != best) tokens.push_back(best);
  }
  return tokens;
}

TokenErrorRate ComputeTokenErrorRate(std::span<const std::uint16_t> hyp,
                                     std::span<const std::uint16_t> ref) {
  if (ref.empty()) throw InvalidArgument("ter: empty reference");
  const std::size_t n = ref.size(), m = hyp.size();
  // dist[i][j]: edits aligning ref[0..i) with hyp[0..j).
  std::vector<std::size_t> dist((n + 1) * (m + 1));
  auto at = [&](std::size_t i, std::size_t j) -> std::size_t& { return dist[i * (m + 1) + j]; };
  for (std::size_t i = 0; i <= n; ++i) at(i, 0) = i;
  for (std::size_t j = 0; j <= m; ++j) at(0, j) = j;
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1]), at(i - 1, j) + 1,
                           at(i, j - 1) + 1});
  TokenErrorRate r;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + (ref[i - 1] != hyp[j - 1])) {
      r.counts.substitutions += ref[i - 1] != hyp[j - 1];
      --i;
      --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++r.counts.deletions;
      --i;
    } else {
      ++r.counts.insertions;
      --j;
    }
  }
  r.ter = static_cast<double>(r.counts.errors()) / static_cast<double>(n);
  return r;
}

}  // namespace tsda::net
