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

#include "tsda/codec/posterior.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tsda/common/error.h"

namespace tsda::codec {
namespace {

void CheckInputs(std::span<const double> z, double temperature) {
  if (z.empty()) throw InvalidArgument("softmax: empty logit vector");
  if (!(temperature > 0.0) || !std::isfinite(temperature))
    throw InvalidArgument("softmax: temperature must be positive and finite");
  for (double v : z)
    if (!std::isfinite(v)) throw InvalidArgument("softmax: non-finite logit");
}

void CheckK(std::size_t n, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > n)
    throw InvalidArgument("top-k: k=" + std::to_string(k) + " outside [1, " +
                          std::to_string(n) + "]");
}

double MaxOf(std::span<const double> z) { return *std::max_element(z.begin(), z.end()); }

}  // namespace

std::vector<double> SoftmaxT(std::span<const double> z, double temperature) {
  CheckInputs(z, temperature);
  const double m = MaxOf(z);
  std::vector<double> q(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    q[i] = std::exp((z[i] - m) / temperature);
    sum += q[i];
  }
  for (double& v : q) v /= sum;
  return q;
}

std::vector<int> SelectTopK(std::span<const double> z, int k) {
  CheckK(z.size(), k);
  std::vector<int> idx(z.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto before = [&](int a, int b) { return z[a] > z[b] || (z[a] == z[b] && a < b); };
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(), before);
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

TopKResult TopKPosterior(std::span<const double> z, int k, double temperature) {
  CheckInputs(z, temperature);
  TopKResult r;
  r.selected = SelectTopK(z, k);
  const double m = MaxOf(z);
  std::vector<bool> in_k(z.size(), false);
  for (int i : r.selected) in_k[i] = true;
  double kept = 0.0, suppressed = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i)
    (in_k[i] ? kept : suppressed) += std::exp((z[i] - m) / temperature);
  r.probs.assign(z.size(), 0.0);
  for (int i : r.selected) r.probs[i] = std::exp((z[i] - m) / temperature) / kept;
  // Written as 1 + suppressed / kept so that A >= 1 holds exactly.
  r.emphasis = 1.0 + suppressed / kept;
  return r;
}

double DefaultFloorConstant(std::span<const double> z, std::span<const int> selected,
                            double temperature) {
  if (selected.empty()) throw InvalidArgument("floor constant: empty selection");
  double lo = z[selected.front()];
  for (int i : selected) lo = std::min(lo, z[i]);
  return lo - 50.0 * temperature;
}

std::vector<double> TopKPosteriorC(std::span<const double> z, int k, double temperature,
                                   std::optional<double> floor_constant) {
  CheckInputs(z, temperature);
  const std::vector<int> selected = SelectTopK(z, k);
  const double c = floor_constant.value_or(DefaultFloorConstant(z, selected, temperature));
  if (!std::isfinite(c)) throw InvalidArgument("floor constant must be finite");
  for (int i : selected)
    if (c > z[i])
      throw InvalidArgument("floor constant exceeds a preserved logit; it must be "
                            "sufficiently negative");
  const double m = MaxOf(z);
  const double floor_term = std::exp((c - m) / temperature);
  double denom = static_cast<double>(z.size() - selected.size()) * floor_term;
  for (int i : selected) denom += std::exp((z[i] - m) / temperature);
  std::vector<double> q(z.size(), floor_term / denom);
  for (int i : selected) q[i] = std::exp((z[i] - m) / temperature) / denom;
  return q;
}

double EmphasisFactorC(std::span<const double> z, int k, double temperature,
                       double floor_constant) {
  CheckInputs(z, temperature);
  const std::vector<int> selected = SelectTopK(z, k);
  const double m = MaxOf(z);
  double total = 0.0;
  for (double v : z) total += std::exp((v - m) / temperature);
  double denom = static_cast<double>(z.size() - selected.size()) *
                 std::exp((floor_constant - m) / temperature);
  for (int i : selected) denom += std::exp((z[i] - m) / temperature);
  return total / denom;
}

SparseFrame MakeSparseFrame(std::span<const double> z, int k) {
  if (z.size() > 65535) throw InvalidArgument("sparse frame: more than 65535 classes");
  std::vector<double> rounded(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) throw InvalidArgument("sparse frame: non-finite logit");
    rounded[i] = static_cast<float>(z[i]);
  }
  SparseFrame frame;
  for (int i : SelectTopK(rounded, k))
    frame.entries.push_back({static_cast<std::uint16_t>(i), static_cast<float>(rounded[i])});
  return frame;
}

std::vector<double> SparsePosterior(const SparseFrame& frame, double temperature) {
  if (frame.entries.empty()) throw InvalidArgument("sparse posterior: empty selection");
  std::vector<double> z(frame.entries.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = frame.entries[i].logit;
  // Restricted to K, the renormalized posterior is the plain softmax over the kept logits.
  return SoftmaxT(z, temperature);
}

std::string CheckSparseFrame(const SparseFrame& frame, std::uint32_t num_classes) {
  if (frame.entries.empty()) return "empty frame";
  std::vector<std::uint16_t> seen;
  seen.reserve(frame.entries.size());
  for (std::size_t i = 0; i < frame.entries.size(); ++i) {
    const SparseEntry& e = frame.entries[i];
    if (e.index >= num_classes) return "class index out of range";
    if (!std::isfinite(e.logit)) return "non-finite logit";
    if (i > 0) {
      const SparseEntry& p = frame.entries[i - 1];
      if (p.logit < e.logit || (p.logit == e.logit && p.index > e.index))
        return "entries not sorted";
    }
    seen.push_back(e.index);
  }
  std::sort(seen.begin(), seen.end());
  if (std::adjacent_find(seen.begin(), seen.end()) != seen.end()) return "duplicate index";
  return {};
}

}  // namespace tsda::codec
