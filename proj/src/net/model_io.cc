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

#include "tsda/net/model_io.h"

#include <fstream>

#include "tsda/common/binary_io.h"
#include "tsda/common/error.h"

namespace tsda::net {

void WriteModel(std::ostream& os, const NetParams& params) {
  Validate(params);
  BinaryWriter w(os);
  w.Bytes("DNET");
  w.U16(1);
  w.U32(static_cast<std::uint32_t>(params.feat_dim));
  w.U32(static_cast<std::uint32_t>(params.context));
  w.U32(static_cast<std::uint32_t>(params.label_delay));
  w.U32(static_cast<std::uint32_t>(params.layers.size()));
  for (const Layer& l : params.layers) {
    w.U32(static_cast<std::uint32_t>(l.in_dim()));
    w.U32(static_cast<std::uint32_t>(l.out_dim()));
    w.U8(static_cast<std::uint8_t>(l.activation));
    w.U8(l.recurrent ? 1 : 0);
  }
  for (double v : Flatten(params)) w.F64(v);
  if (!w.good()) throw IoError("model: write failed");
}

void WriteModel(const std::filesystem::path& path, const NetParams& params) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("model: cannot open " + path.string());
  WriteModel(os, params);
}

NetParams ReadModel(std::istream& is) {
  BinaryReader r(is);
  std::string magic;
  std::uint16_t version = 0;
  if (!r.Bytes(magic, 4) || magic != "DNET") throw IoError("model: bad magic");
  if (!r.U16(version) || version != 1) throw IoError("model: unsupported version");
  std::uint32_t feat_dim = 0, context = 0, delay = 0, count = 0;
  if (!r.U32(feat_dim) || !r.U32(context) || !r.U32(delay) || !r.U32(count))
    throw IoError("model: truncated header");
  if (count == 0 || count > 1024) throw IoError("model: implausible layer count");
  NetParams p;
  p.feat_dim = static_cast<int>(feat_dim);
  p.context = static_cast<int>(context);
  p.label_delay = static_cast<int>(delay);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::uint32_t in = 0, out = 0;
    std::uint8_t act = 0, rec = 0;
    if (!r.U32(in) || !r.U32(out) || !r.U8(act) || !r.U8(rec))
      throw IoError("model: truncated architecture descriptor");
    if (act > 1 || rec > 1) throw IoError("model: unknown layer tag");
    if (in == 0 || out == 0 || in > (1u << 20) || out > (1u << 20))
      throw IoError("model: implausible layer shape");
    Layer l;
    l.weight = Matrix::Zero(out, in);
    l.bias = Vector::Zero(out);
    l.activation = static_cast<Activation>(act);
    l.recurrent = rec == 1;
    if (l.recurrent) l.recurrent_weight = Matrix::Zero(out, out);
    p.layers.push_back(std::move(l));
  }
  std::vector<double> flat(p.num_parameters());
  for (double& v : flat)
    if (!r.F64(v)) throw IoError("model: truncated parameters");
  if (!r.AtEnd()) throw IoError("model: trailing bytes");
  Unflatten(flat, p);
  try {
    Validate(p);
  } catch (const InvalidArgument& e) {
    throw IoError(std::string("model: ") + e.what());
  }
  return p;
}

NetParams ReadModel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("model: cannot open " + path.string());
  return ReadModel(is);
}

}  // namespace tsda::net
