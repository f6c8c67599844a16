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

#include "tsda/signal/room.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <limits>
#include <string>

namespace tsda::signal {
namespace {

double Distance(const Vec3& a, const Vec3& b) {
  const double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

// Image coordinate along one axis for lattice index n. Even n translates the
// source by n*L; odd n mirrors it first. |n| is the reflection count.
double ImageCoordinate(int n, double pos, double len) {
  if (n % 2 == 0) return pos + n * len;
  return -pos + (n + 1) * len;
}

}  // namespace

void Validate(const RoomSpec& room) {
  using Kind = GeometryError::Kind;
  for (int a = 0; a < 3; ++a) {
    if (!(room.dims[a] > 0.0) || !std::isfinite(room.dims[a]))
      throw GeometryError(Kind::kInvalidGeometry,
                          "room: every dimension must be positive");
    for (const Vec3* p : {&room.source_pos, &room.mic_pos}) {
      if (!((*p)[a] > 0.0 && (*p)[a] < room.dims[a]))
        throw GeometryError(Kind::kInvalidGeometry,
                            "room: source and mic must lie strictly inside");
    }
  }
  if (!(room.t60 > 0.0))
    throw GeometryError(Kind::kInvalidGeometry, "room: t60 must be positive");
  if (!(room.speed_of_sound > 0.0))
    throw GeometryError(Kind::kInvalidGeometry,
                        "room: speed of sound must be positive");
  if (room.max_reflection_order < 0)
    throw GeometryError(Kind::kInvalidGeometry,
                        "room: negative max reflection order");
}

double DeriveReflectionCoeff(const RoomSpec& room) {
  const auto& d = room.dims;
  if (d[0] <= 0.0 || d[1] <= 0.0 || d[2] <= 0.0)
    throw GeometryError(GeometryError::Kind::kInvalidGeometry,
                        "room: every dimension must be positive");
  if (!(room.t60 > 0.0))
    throw GeometryError(GeometryError::Kind::kInvalidGeometry,
                        "room: t60 must be positive");
  const double volume = d[0] * d[1] * d[2];
  const double surface = 2.0 * (d[0] * d[1] + d[0] * d[2] + d[1] * d[2]);
  const double alpha = 1.0 - std::exp(-0.161 * volume / (surface * room.t60));
  return std::sqrt(1.0 - alpha);
}

int DefaultMaxOrder(const RoomSpec& room, int cap) {
  const double min_dim = *std::min_element(room.dims.begin(), room.dims.end());
  const double order = std::ceil(room.t60 * room.speed_of_sound / min_dim);
  return static_cast<int>(std::min<double>(order, cap));
}

std::vector<ImageSource> EnumerateImageSources(const RoomSpec& room,
                                               int max_order) {
  Validate(room);
  std::vector<ImageSource> images;
  for (int order = 0; order <= max_order; ++order) {
    for (int nx = -order; nx <= order; ++nx) {
      const int rest = order - std::abs(nx);
      for (int ny = -rest; ny <= rest; ++ny) {
        const int nz_abs = rest - std::abs(ny);
        for (int nz : {-nz_abs, nz_abs}) {
          const Vec3 pos{ImageCoordinate(nx, room.source_pos[0], room.dims[0]),
                         ImageCoordinate(ny, room.source_pos[1], room.dims[1]),
                         ImageCoordinate(nz, room.source_pos[2], room.dims[2])};
          images.push_back({pos, order, Distance(pos, room.mic_pos)});
          if (nz_abs == 0) break;
        }
      }
    }
  }
  return images;
}

namespace {

// Calls fn(order, distance) for every image source with order <= max_order
// and distance^2 <= max_dist2. Per-axis squared offsets are tabulated so the
// inner loop is a sum.
template <typename Fn>
void ForEachImage(const RoomSpec& room, int max_order, double max_dist2, Fn&& fn) {
  const int span = 2 * max_order + 1;
  std::array<std::vector<double>, 3> sq;
  for (int a = 0; a < 3; ++a) {
    sq[a].resize(static_cast<std::size_t>(span));
    for (int n = -max_order; n <= max_order; ++n) {
      const double d = ImageCoordinate(n, room.source_pos[a], room.dims[a]) - room.mic_pos[a];
      sq[a][n + max_order] = d * d;
    }
  }
  for (int nx = -max_order; nx <= max_order; ++nx) {
    const int rx = std::abs(nx);
    const double dx = sq[0][nx + max_order];
    if (dx > max_dist2) continue;
    for (int ny = -(max_order - rx); ny <= max_order - rx; ++ny) {
      const int rxy = rx + std::abs(ny);
      const double dxy = dx + sq[1][ny + max_order];
      if (dxy > max_dist2) continue;
      const int rest = max_order - rxy;
      for (int nz = -rest; nz <= rest; ++nz) {
        const double d2 = dxy + sq[2][nz + max_order];
        if (d2 <= max_dist2) fn(rxy + std::abs(nz), std::sqrt(d2));
      }
    }
  }
}

void CheckRirInputs(const RoomSpec& room, int sample_rate) {
  Validate(room);
  if (sample_rate <= 0) throw InvalidArgument("rir: sample rate must be positive");
  if (Distance(room.source_pos, room.mic_pos) == 0.0)
    throw GeometryError(GeometryError::Kind::kSingularGeometry,
                        "rir: source and microphone coincide");
}

// Least-squares T60 from a decay curve given in dB at uniformly spaced
// times, restricted to [lo_db, hi_db]. Returns 0 if the window is not
// covered by at least two points.
double FitT60(const std::vector<double>& edc_db, double dt, double hi_db, double lo_db) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < edc_db.size(); ++i) {
    if (edc_db[i] > hi_db) continue;
    if (edc_db[i] < lo_db) break;
    const double t = static_cast<double>(i) * dt;
    sx += t;
    sy += edc_db[i];
    sxx += t * t;
    sxy += t * edc_db[i];
    ++n;
  }
  if (n < 2) return 0.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return slope < 0.0 ? -60.0 / slope : std::numeric_limits<double>::infinity();
}

}  // namespace

ImpulseResponse SimulateRir(const RoomSpec& room, double beta, int sample_rate) {
  return SimulateRir(room, beta, sample_rate, std::numeric_limits<std::size_t>::max());
}

ImpulseResponse SimulateRir(const RoomSpec& room, double beta, int sample_rate,
                            std::size_t max_taps) {
  CheckRirInputs(room, sample_rate);
  if (!(beta >= 0.0 && beta <= 1.0))
    throw InvalidArgument("rir: reflection coefficient outside [0, 1]");
  if (max_taps == 0) throw InvalidArgument("rir: max_taps must be positive");

  const int max_order = room.max_reflection_order;
  std::vector<double> gain(static_cast<std::size_t>(max_order) + 1);
  for (int r = 0; r <= max_order; ++r)
    gain[r] = std::pow(beta, r) / (4.0 * std::numbers::pi);
  const double samples_per_metre = sample_rate / room.speed_of_sound;

  ImpulseResponse ir;
  ir.sample_rate = sample_rate;
  ir.taps.assign(1, 0.0);
  // Taps at index >= max_taps lie beyond (max_taps - 0.5) samples of travel.
  const double max_dist = (static_cast<double>(max_taps) - 0.5) / samples_per_metre;
  const double max_dist2 = max_taps == std::numeric_limits<std::size_t>::max()
                               ? std::numeric_limits<double>::infinity()
                               : max_dist * max_dist;
  ForEachImage(room, max_order, max_dist2, [&](int order, double d) {
    const auto idx = static_cast<std::size_t>(std::lround(d * samples_per_metre));
    if (idx >= max_taps) return;
    if (idx >= ir.taps.size()) ir.taps.resize(idx + 1, 0.0);
    ir.taps[idx] += gain[order] / d;
  });
  return ir;
}

double CalibrateReflectionCoeff(const RoomSpec& room, int sample_rate, double hi_db,
                                double lo_db) {
  CheckRirInputs(room, sample_rate);
  // Amplitude per (reflection order, tap) with beta factored out. Taps of a
  // response for any beta are a weighted sum of these rows, so the image set
  // is enumerated once. Taps add coherently, which matters: the density of
  // coincident arrivals grows with time and lengthens the measured decay.
  const int max_order = room.max_reflection_order;
  const double samples_per_metre = sample_rate / room.speed_of_sound;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(max_order) + 1);
  std::size_t num_taps = 1;
  ForEachImage(room, max_order, std::numeric_limits<double>::infinity(),
               [&](int order, double d) {
    const auto idx = static_cast<std::size_t>(std::lround(d * samples_per_metre));
    auto& row = rows[order];
    if (idx >= row.size()) row.resize(idx + 1, 0.0);
    row[idx] += 1.0 / (4.0 * std::numbers::pi * d);
    num_taps = std::max(num_taps, idx + 1);
  });

  std::vector<double> taps(num_taps), edc(num_taps);
  auto measured_t60 = [&](double beta) {
    std::fill(taps.begin(), taps.end(), 0.0);
    double w = 1.0;
    for (int r = 0; r <= max_order; ++r, w *= beta) {
      const auto& row = rows[r];
      for (std::size_t t = 0; t < row.size(); ++t) taps[t] += w * row[t];
    }
    double acc = 0.0;
    for (std::size_t t = num_taps; t-- > 0;) {
      acc += taps[t] * taps[t];
      edc[t] = acc;
    }
    const double hi = acc * std::pow(10.0, hi_db / 10.0);
    const double lo = acc * std::pow(10.0, lo_db / 10.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t t = 0; t < num_taps; ++t) {
      if (edc[t] > hi) continue;
      if (edc[t] < lo) break;
      const double x = static_cast<double>(t) / sample_rate;
      const double y = 10.0 * std::log10(edc[t] / acc);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    if (n < 2) return 0.0;
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return slope < 0.0 ? -60.0 / slope : std::numeric_limits<double>::infinity();
  };

  // Decay time is close to a power law in -log(beta), so secant steps in
  // (log(-log beta), log t60) converge in a few evaluations. Every evaluation
  // also narrows a bracket that bisection falls back on.
  const double target = std::log(room.t60);
  double lo = 0.0, hi = 1.0;
  double x_prev = 0.0, y_prev = 0.0;
  bool have_prev = false;
  double beta = DeriveReflectionCoeff(room);
  for (int it = 0; it < 8; ++it) {
    const double t60 = measured_t60(beta);
    if (t60 < room.t60) lo = std::max(lo, beta);
    else hi = std::min(hi, beta);
    if (std::abs(t60 - room.t60) <= 1e-3 * room.t60) return beta;
    if (!(t60 > 0.0) || std::isinf(t60)) break;
    const double x = std::log(-std::log(beta));
    const double y = std::log(t60);
    double slope = have_prev && x != x_prev ? (y - y_prev) / (x - x_prev) : -1.0;
    if (!(slope < -0.1)) slope = -1.0;
    x_prev = x;
    y_prev = y;
    have_prev = true;
    const double next = std::exp(-std::exp(x + (target - y) / slope));
    if (!(next > lo && next < hi)) break;
    beta = next;
  }
  while (hi - lo > 1e-5) {
    const double mid = 0.5 * (lo + hi);
    if (measured_t60(mid) < room.t60) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> SchroederCurveDb(const ImpulseResponse& ir) {
  std::vector<double> edc(ir.taps.size());
  double acc = 0.0;
  for (std::size_t i = ir.taps.size(); i-- > 0;) {
    acc += ir.taps[i] * ir.taps[i];
    edc[i] = acc;
  }
  if (acc <= 0.0) throw InvalidArgument("schroeder: impulse response has no energy");
  for (double& e : edc) e = 10.0 * std::log10(std::max(e / acc, 1e-300));
  return edc;
}

double EstimateT60(const ImpulseResponse& ir, double hi_db, double lo_db) {
  const double t60 = FitT60(SchroederCurveDb(ir), 1.0 / ir.sample_rate, hi_db, lo_db);
  if (t60 == 0.0) throw InvalidArgument("schroeder: decay range not covered by the response");
  if (std::isinf(t60)) throw InvalidArgument("schroeder: energy does not decay");
  return t60;
}

}  // namespace tsda::signal
