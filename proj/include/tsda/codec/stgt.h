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

#ifndef TSDA_CODEC_STGT_H_
#define TSDA_CODEC_STGT_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "tsda/codec/posterior.h"
#include "tsda/common/error.h"
#include "tsda/common/frame_matrix.h"

namespace tsda::codec {

// STGT soft-target stream, little-endian:
//   "STGT" | u16 version=1 | u32 N | u16 k | f32 default T | u32 utterances
//   per utterance: u16 id length | id bytes (UTF-8) | u32 frame count
//     per frame: k x (u16 class index | f32 logit)
// Raw logits are stored so a trainer can apply any temperature; the header
// temperature is advisory.

inline constexpr std::uint16_t kStgtVersion = 1;
inline constexpr std::size_t kStgtHeaderBytes = 4 + 2 + 4 + 2 + 4 + 4;
inline constexpr std::size_t kStgtEntryBytes = 2 + 4;

class FormatError : public Error {
 public:
  enum class Kind {
    kBadMagic,
    kVersionMismatch,
    kInvalidHeader,
    kTruncated,
    kUnsorted,
    kDuplicateIndex,
    kIndexOutOfRange,
    kInvalidValue,
    kTrailingData,
  };
  FormatError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct StgtHeader {
  std::uint32_t num_classes = 0;
  std::uint16_t k = 0;
  float temperature = 1.0f;
  std::uint32_t num_utterances = 0;
  bool operator==(const StgtHeader&) const = default;
};

struct SoftTargetUtterance {
  std::string id;
  std::vector<SparseFrame> frames;
  bool operator==(const SoftTargetUtterance&) const = default;
};

/// Streaming writer. The utterance count is fixed by the header; Finish()
/// fails if fewer were written.
class StgtWriter {
 public:
  StgtWriter(std::ostream& os, const StgtHeader& header);

  void Write(const SoftTargetUtterance& utt);
  /// Selects the top-k of every row of `logits` (frames x N) and writes them.
  void WriteDense(const std::string& id, const FrameMatrix& logits);
  std::uint64_t Finish();

 private:
  std::ostream& os_;
  StgtHeader header_;
  std::uint32_t written_ = 0;
  std::uint64_t bytes_ = 0;
};

/// Streaming reader; validates every frame as it is read.
class StgtReader {
 public:
  explicit StgtReader(std::istream& is);

  const StgtHeader& header() const { return header_; }
  /// Reads the next utterance; returns false after the last one.
  bool Next(SoftTargetUtterance& utt);

 private:
  std::istream& is_;
  StgtHeader header_;
  std::uint32_t read_ = 0;
};

struct DenseUtterance {
  std::string id;
  FrameMatrix logits;  // frames x N
};

/// Encodes every utterance with params.k and params.temperature in the
/// header. Returns the number of bytes written.
std::uint64_t EncodeStream(std::span<const DenseUtterance> utterances,
                           const CodecParams& params, std::ostream& os);

struct StgtContent {
  StgtHeader header;
  std::vector<SoftTargetUtterance> utterances;
};

StgtContent DecodeStream(std::istream& is);

/// Size of a stream with the given shape, in bytes.
std::uint64_t StgtStreamBytes(std::span<const std::string> ids,
                              std::span<const std::uint32_t> frame_counts, std::uint16_t k);

}  // namespace tsda::codec

#endif  // TSDA_CODEC_STGT_H_
