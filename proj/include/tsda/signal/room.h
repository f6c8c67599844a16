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

#ifndef TSDA_SIGNAL_ROOM_H_
#define TSDA_SIGNAL_ROOM_H_

#include <array>
#include <cstddef>
#include <vector>

#include "tsda/common/error.h"

namespace tsda::signal {

using Vec3 = std::array<double, 3>;

/// Rectangular ("shoebox") room with a single source and microphone.
struct RoomSpec {
  Vec3 dims{};        // metres
  Vec3 source_pos{};  // metres, strictly inside the room
  Vec3 mic_pos{};
  double t60 = 0.5;   // seconds
  int max_reflection_order = 0;
  double speed_of_sound = 343.0;  // m/s
};

struct ImpulseResponse {
  std::vector<double> taps;
  int sample_rate = 16000;
};

class GeometryError : public InvalidArgument {
 public:
  enum class Kind { kInvalidGeometry, kSingularGeometry };
  GeometryError(Kind kind, const std::string& what)
      : InvalidArgument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Throws GeometryError(kInvalidGeometry) for non-positive dims or t60, or a
/// source/mic not strictly inside the room.
void Validate(const RoomSpec& room);

/// Uniform wall reflection coefficient reproducing the requested T60 via
/// Eyring's formula: alpha = 1 - exp(-0.161 V / (S T60)), beta = sqrt(1 - alpha).
double DeriveReflectionCoeff(const RoomSpec& room);

/// Uniform reflection coefficient for which the image-method response of
/// this room, measured by Schroeder integration over [lo_db, hi_db], decays
/// with the requested t60. Eyring's formula assumes a diffuse field and
/// overestimates the decay rate of a specular shoebox model, most visibly
/// for short t60. Found by bisection over the coherent per-tap response.
double CalibrateReflectionCoeff(const RoomSpec& room, int sample_rate = 16000,
                                double hi_db = -5.0, double lo_db = -25.0);

/// ceil(t60 * c / min_dim), capped at `cap`.
int DefaultMaxOrder(const RoomSpec& room, int cap = 60);

struct ImageSource {
  Vec3 position;
  int order = 0;  // total number of wall reflections
  double distance = 0.0;
};

/// All image sources with reflection order <= max_order, ordered by
/// (order, lattice index) for determinism.
std::vector<ImageSource> EnumerateImageSources(const RoomSpec& room,
                                               int max_order);

/// Image-method RIR: each image of order r at distance d adds
/// beta^r / (4 pi d) at tap round(fs d / c). Taps sharing an index
/// accumulate. Throws GeometryError(kSingularGeometry) if source == mic.
ImpulseResponse SimulateRir(const RoomSpec& room, double beta,
                            int sample_rate = 16000);

/// As above, keeping only taps with index < max_taps. Convolution output is
/// truncated to the input length, so a response cut at the signal length
/// gives the same reverberant signal for less work.
ImpulseResponse SimulateRir(const RoomSpec& room, double beta, int sample_rate,
                            std::size_t max_taps);

/// Schroeder backward-integrated energy decay curve in dB, normalized so
/// the first value is 0 dB.
std::vector<double> SchroederCurveDb(const ImpulseResponse& ir);

/// T60 extrapolated from a least-squares line fit of the Schroeder curve
/// between `hi_db` and `lo_db` (defaults: the T20 window, -5 to -25 dB).
double EstimateT60(const ImpulseResponse& ir, double hi_db = -5.0,
                   double lo_db = -25.0);

}  // namespace tsda::signal

#endif  // TSDA_SIGNAL_ROOM_H_
