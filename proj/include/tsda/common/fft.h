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

#ifndef TSDA_COMMON_FFT_H_
#define TSDA_COMMON_FFT_H_

#include <complex>
#include <span>

namespace tsda {

/// Real-input FFT of a fixed size backed by FFTW. Each instance owns its
/// plan and buffers, so distinct instances may be used from distinct threads.
class RealFft {
 public:
  explicit RealFft(int size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return size_; }
  int num_bins() const { return size_ / 2 + 1; }

  /// `in` may be shorter than size(); it is zero-padded. `out` must hold
  /// num_bins() values.
  void Forward(std::span<const double> in, std::span<std::complex<double>> out);
  /// Unnormalized inverse: Inverse(Forward(x)) == size() * x.
  void Inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  int size_;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace tsda

#endif  // TSDA_COMMON_FFT_H_
