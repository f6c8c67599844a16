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

#include "tsda/codec/stgt.h"

#include <cmath>
#include <ostream>
#include <istream>

#include "tsda/common/binary_io.h"

namespace tsda::codec {
namespace {

using Kind = FormatError::Kind;

void ValidateHeader(const StgtHeader& h) {
  if (h.num_classes == 0 || h.num_classes > 65535)
    throw FormatError(Kind::kInvalidHeader, "stgt: class count must lie in [1, 65535]");
  if (h.k == 0 || h.k > h.num_classes)
    throw FormatError(Kind::kInvalidHeader, "stgt: k must lie in [1, N]");
  if (!(h.temperature > 0.0f) || !std::isfinite(h.temperature))
    throw FormatError(Kind::kInvalidHeader, "stgt: temperature must be positive");
}

Kind KindOf(const std::string& problem) {
  if (problem == "entries not sorted") return Kind::kUnsorted;
  if (problem == "duplicate index") return Kind::kDuplicateIndex;
  if (problem == "class index out of range") return Kind::kIndexOutOfRange;
  return Kind::kInvalidValue;
}

}  // namespace

StgtWriter::StgtWriter(std::ostream& os, const StgtHeader& header)
    : os_(os), header_(header) {
  ValidateHeader(header_);
  BinaryWriter w(os_);
  w.Bytes("STGT");
  w.U16(kStgtVersion);
  w.U32(header_.num_classes);
  w.U16(header_.k);
  w.F32(header_.temperature);
  w.U32(header_.num_utterances);
  if (!w.good()) throw IoError("stgt: header write failed");
  bytes_ = w.bytes_written();
}

void StgtWriter::Write(const SoftTargetUtterance& utt) {
  if (written_ >= header_.num_utterances)
    throw InvalidArgument("stgt: more utterances than declared in the header");
  if (utt.id.size() > 0xffff) throw InvalidArgument("stgt: utterance id too long");
  BinaryWriter w(os_);
  w.U16(static_cast<std::uint16_t>(utt.id.size()));
  w.Bytes(utt.id);
  w.U32(static_cast<std::uint32_t>(utt.frames.size()));
  for (std::size_t f = 0; f < utt.frames.size(); ++f) {
    const SparseFrame& frame = utt.frames[f];
    if (frame.entries.size() != header_.k)
      throw InvalidArgument("stgt: frame " + std::to_string(f) + " of " + utt.id +
                            " has " + std::to_string(frame.entries.size()) +
                            " entries, header declares k=" + std::to_string(header_.k));
    const std::string problem = CheckSparseFrame(frame, header_.num_classes);
    if (!problem.empty())
      throw InvalidArgument("stgt: frame " + std::to_string(f) + " of " + utt.id + ": " + problem);
    for (const SparseEntry& e : frame.entries) {
      w.U16(e.index);
      w.F32(e.logit);
    }
  }
  if (!w.good()) throw IoError("stgt: write failed");
  bytes_ += w.bytes_written();
  ++written_;
}

void StgtWriter::WriteDense(const std::string& id, const FrameMatrix& logits) {
  if (logits.rows > 0 && logits.cols != header_.num_classes)
    throw InvalidArgument("stgt: logit width " + std::to_string(logits.cols) +
                          " does not match N=" + std::to_string(header_.num_classes));
  SoftTargetUtterance utt;
  utt.id = id;
  utt.frames.reserve(logits.rows);
  for (std::size_t t = 0; t < logits.rows; ++t)
    utt.frames.push_back(MakeSparseFrame(logits.row(t), header_.k));
  Write(utt);
}

std::uint64_t StgtWriter::Finish() {
  if (written_ != header_.num_utterances)
    throw InvalidArgument("stgt: wrote " + std::to_string(written_) + " of " +
                          std::to_string(header_.num_utterances) + " declared utterances");
  os_.flush();
  if (!os_) throw IoError("stgt: flush failed");
  return bytes_;
}

StgtReader::StgtReader(std::istream& is) : is_(is) {
  BinaryReader r(is_);
  std::string magic;
  if (!r.Bytes(magic, 4)) throw FormatError(Kind::kTruncated, "stgt: truncated magic");
  if (magic != "STGT") throw FormatError(Kind::kBadMagic, "stgt: bad magic '" + magic + "'");
  std::uint16_t version = 0;
  if (!r.U16(version)) throw FormatError(Kind::kTruncated, "stgt: truncated header");
  if (version != kStgtVersion)
    throw FormatError(Kind::kVersionMismatch,
                      "stgt: unsupported version " + std::to_string(version));
  if (!r.U32(header_.num_classes) || !r.U16(header_.k) || !r.F32(header_.temperature) ||
      !r.U32(header_.num_utterances))
    throw FormatError(Kind::kTruncated, "stgt: truncated header");
  ValidateHeader(header_);
}

bool StgtReader::Next(SoftTargetUtterance& utt) {
  BinaryReader r(is_);
  if (read_ == header_.num_utterances) {
    if (!r.AtEnd())
      throw FormatError(Kind::kTrailingData, "stgt: data after the last declared utterance");
    return false;
  }
  const std::string ordinal = "utterance #" + std::to_string(read_);
  std::uint16_t id_len = 0;
  if (!r.U16(id_len) || !r.Bytes(utt.id, id_len))
    throw FormatError(Kind::kTruncated, "stgt: truncated id of " + ordinal);
  std::uint32_t frames = 0;
  if (!r.U32(frames))
    throw FormatError(Kind::kTruncated, "stgt: truncated frame count of utterance '" + utt.id + "'");
  utt.frames.assign(frames, {});
  for (std::uint32_t f = 0; f < frames; ++f) {
    SparseFrame& frame = utt.frames[f];
    frame.entries.resize(header_.k);
    for (SparseEntry& e : frame.entries) {
      if (!r.U16(e.index) || !r.F32(e.logit))
        throw FormatError(Kind::kTruncated, "stgt: truncated frame " + std::to_string(f) +
                                                " of utterance '" + utt.id + "'");
    }
    const std::string problem = CheckSparseFrame(frame, header_.num_classes);
    if (!problem.empty())
      throw FormatError(KindOf(problem), "stgt: frame " + std::to_string(f) + " of utterance '" +
                                             utt.id + "': " + problem);
  }
  ++read_;
  return true;
}

std::uint64_t EncodeStream(std::span<const DenseUtterance> utterances,
                           const CodecParams& params, std::ostream& os) {
  std::uint32_t n = 0;
  for (const DenseUtterance& u : utterances) {
    if (u.logits.rows == 0) continue;
    if (n != 0 && u.logits.cols != n)
      throw InvalidArgument("encode: utterances disagree on the class count");
    n = static_cast<std::uint32_t>(u.logits.cols);
  }
  if (n > 65535) throw InvalidArgument("encode: N exceeds 65535");
  if (params.k < 1 || params.k > 65535)
    throw InvalidArgument("encode: k must lie in [1, 65535]");
  StgtHeader header;
  // A stream without frames still needs a valid header; N then defaults to k.
  header.num_classes = n == 0 ? static_cast<std::uint32_t>(params.k) : n;
  header.k = static_cast<std::uint16_t>(params.k);
  header.temperature = static_cast<float>(params.temperature);
  header.num_utterances = static_cast<std::uint32_t>(utterances.size());
  StgtWriter writer(os, header);
  for (const DenseUtterance& u : utterances) writer.WriteDense(u.id, u.logits);
  return writer.Finish();
}

StgtContent DecodeStream(std::istream& is) {
  StgtReader reader(is);
  StgtContent content;
  content.header = reader.header();
  SoftTargetUtterance utt;
  while (reader.Next(utt)) content.utterances.push_back(std::move(utt));
  return content;
}

std::uint64_t StgtStreamBytes(std::span<const std::string> ids,
                              std::span<const std::uint32_t> frame_counts, std::uint16_t k) {
  std::uint64_t bytes = kStgtHeaderBytes;
  for (std::size_t i = 0; i < ids.size(); ++i)
    bytes += 2 + ids[i].size() + 4 + std::uint64_t{frame_counts[i]} * k * kStgtEntryBytes;
  return bytes;
}

}  // namespace tsda::codec
