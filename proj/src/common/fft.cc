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

#include "tsda/common/fft.h"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "tsda/common/error.h"

namespace tsda {
namespace {
// FFTW's planner is not thread-safe; execution on distinct plans is.
std::mutex planner_mutex;
}  // namespace

RealFft::RealFft(int size) : size_(size) {
  if (size < 1) throw InvalidArgument("fft size must be positive");
  real_ = fftw_alloc_real(static_cast<std::size_t>(size));
  auto* spec = fftw_alloc_complex(static_cast<std::size_t>(num_bins()));
  spectrum_ = spec;
  std::lock_guard<std::mutex> lock(planner_mutex);
  forward_plan_ = fftw_plan_dft_r2c_1d(size, real_, spec, FFTW_ESTIMATE);
  inverse_plan_ = fftw_plan_dft_c2r_1d(size, spec, real_, FFTW_ESTIMATE);
}

RealFft::~RealFft() {
  {
    std::lock_guard<std::mutex> lock(planner_mutex);
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
  }
  fftw_free(real_);
  fftw_free(spectrum_);
}

void RealFft::Forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  if (static_cast<int>(in.size()) > size_ ||
      static_cast<int>(out.size()) < num_bins())
    throw InvalidArgument("fft forward: buffer size mismatch");
  std::copy(in.begin(), in.end(), real_);
  std::fill(real_ + in.size(), real_ + size_, 0.0);
  fftw_execute(static_cast<fftw_plan>(forward_plan_));
  const auto* spec = static_cast<const fftw_complex*>(spectrum_);
  for (int i = 0; i < num_bins(); ++i) out[i] = {spec[i][0], spec[i][1]};
}

void RealFft::Inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  if (static_cast<int>(in.size()) < num_bins() ||
      static_cast<int>(out.size()) < size_)
    throw InvalidArgument("fft inverse: buffer size mismatch");
  auto* spec = static_cast<fftw_complex*>(spectrum_);
  for (int i = 0; i < num_bins(); ++i) {
    spec[i][0] = in[i].real();
    spec[i][1] = in[i].imag();
  }
  // c2r destroys its input; the spectrum buffer is scratch here.
  fftw_execute(static_cast<fftw_plan>(inverse_plan_));
  std::copy(real_, real_ + size_, out.begin());
}

}  // namespace tsda
