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

#ifndef TSDA_NET_MODEL_IO_H_
#define TSDA_NET_MODEL_IO_H_

#include <filesystem>
#include <iosfwd>

#include "tsda/net/network.h"

namespace tsda::net {

// DNET model file, little-endian:
//   "DNET" | u16 version=1 | u32 feat_dim | u32 context | u32 label_delay |
//   u32 layer count | per layer: u32 in, u32 out, u8 activation, u8 recurrent
//   then all parameters as f64 in Flatten() order.

void WriteModel(std::ostream& os, const NetParams& params);
void WriteModel(const std::filesystem::path& path, const NetParams& params);
NetParams ReadModel(std::istream& is);
NetParams ReadModel(const std::filesystem::path& path);

}  // namespace tsda::net

#endif  // TSDA_NET_MODEL_IO_H_
