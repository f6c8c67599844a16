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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "tsda/common/error.h"
#include "tsda/codec/stgt.h"
#include "tsda/common/binary_io.h"
#include "tsda/common/rng.h"

namespace tsda::codec {
namespace {

using Kind = FormatError::Kind;

struct RawFrame {
  std::vector<std::pair<std::uint16_t, float>> entries;
};

// Hand-built STGT bytes, independent of the writer.
std::string Fixture(const std::string& magic, std::uint16_t version, std::uint32_t n,
                    std::uint16_t k, float t,
                    const std::vector<std::pair<std::string, std::vector<RawFrame>>>& utts,
                    std::int64_t declared = -1) {
  std::ostringstream os;
  BinaryWriter w(os);
  w.Bytes(magic);
  w.U16(version);
  w.U32(n);
  w.U16(k);
  w.F32(t);
  w.U32(static_cast<std::uint32_t>(declared < 0 ? utts.size() : declared));
  for (const auto& [id, frames] : utts) {
    w.U16(static_cast<std::uint16_t>(id.size()));
    w.Bytes(id);
    w.U32(static_cast<std::uint32_t>(frames.size()));
    for (const auto& f : frames)
      for (const auto& [i, v] : f.entries) {
        w.U16(i);
        w.F32(v);
      }
  }
  return os.str();
}

FormatError::Kind DecodeKind(const std::string& bytes, std::string* message = nullptr) {
  std::istringstream is(bytes);
  try {
    DecodeStream(is);
  } catch (const FormatError& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return Kind::kInvalidValue;
}

std::vector<SoftTargetUtterance> RandomCorpus(Rng& rng, int n_classes, int k, int utts) {
  std::vector<SoftTargetUtterance> out;
  for (int u = 0; u < utts; ++u) {
    SoftTargetUtterance utt;
    utt.id = "utt-" + std::to_string(u);
    const int frames = u == 0 ? 0 : u == 1 ? 1 : static_cast<int>(rng.UniformInt(2, 30));
    for (int f = 0; f < frames; ++f) {
      std::vector<double> z(n_classes);
      for (double& v : z) v = 4.0 * rng.Normal();
      utt.frames.push_back(MakeSparseFrame(z, k));
    }
    out.push_back(std::move(utt));
  }
  return out;
}

std::string Encode(const StgtHeader& h, const std::vector<SoftTargetUtterance>& utts) {
  std::ostringstream os;
  StgtWriter w(os, h);
  for (const auto& u : utts) w.Write(u);
  w.Finish();
  return os.str();
}

TEST(StgtTest, HeaderOnlyStream) {
  std::ostringstream os;
  EncodeStream({}, CodecParams{.k = 3, .temperature = 2.0, .floor_constant = {}}, os);
  EXPECT_EQ(os.str().size(), kStgtHeaderBytes);
  std::istringstream is(os.str());
  const StgtContent c = DecodeStream(is);
  EXPECT_TRUE(c.utterances.empty());
  EXPECT_EQ(c.header.num_classes, 3u);
  EXPECT_EQ(c.header.temperature, 2.0f);
}

TEST(StgtTest, RoundTripIsBitExact) {
  Rng rng(1);
  for (int k : {1, 5, 40}) {
    const auto utts = RandomCorpus(rng, 40, k, 6);
    const StgtHeader h{40, static_cast<std::uint16_t>(k), 2.0f, 6};
    const std::string bytes = Encode(h, utts);
    std::istringstream is(bytes);
    const StgtContent c = DecodeStream(is);
    EXPECT_EQ(c.header, h);
    ASSERT_EQ(c.utterances, utts);
    // Re-encoding the decoded content reproduces the bytes.
    EXPECT_EQ(Encode(c.header, c.utterances), bytes);
  }
}

TEST(StgtTest, MatchesHandBuiltFixture) {
  SoftTargetUtterance u{"ab", {SparseFrame{{{2, 1.5f}, {0, -0.25f}}}}};
  const std::string want = Fixture("STGT", 1, 3, 2, 1.0f, {{"ab", {RawFrame{{{2, 1.5f}, {0, -0.25f}}}}}});
  EXPECT_EQ(Encode(StgtHeader{3, 2, 1.0f, 1}, {u}), want);
}

TEST(StgtTest, PayloadIsSixBytesPerEntry) {
  Rng rng(2);
  for (int k : {1, 7, 20}) {
    const auto utts = RandomCorpus(rng, 50, k, 4);
    std::size_t frames = 0, id_bytes = 0;
    for (const auto& u : utts) {
      frames += u.frames.size();
      id_bytes += u.id.size();
    }
    const std::string bytes = Encode(StgtHeader{50, static_cast<std::uint16_t>(k), 1.0f, 4}, utts);
    EXPECT_EQ(bytes.size(), kStgtHeaderBytes + 4 * (2 + 4) + id_bytes + frames * 6 * k);
    std::vector<std::string> ids;
    std::vector<std::uint32_t> counts;
    for (const auto& u : utts) {
      ids.push_back(u.id);
      counts.push_back(static_cast<std::uint32_t>(u.frames.size()));
    }
    EXPECT_EQ(StgtStreamBytes(ids, counts, k), bytes.size());
  }
}

TEST(StgtTest, SparseStorageOfLargeOutputLayer) {
  // 3010 classes with 20 kept logits: 120 bytes per frame against 12040
  // for dense 32-bit storage.
  EXPECT_EQ(20 * kStgtEntryBytes, 120u);
  const std::vector<std::string> ids = {"utt-000001"};
  const std::vector<std::uint32_t> frames = {1000};
  const double sparse = static_cast<double>(StgtStreamBytes(ids, frames, 20));
  const double dense = 1000.0 * 3010 * 4;
  EXPECT_LT(sparse / dense, 0.01);
}

TEST(StgtTest, EncodeStreamSelectsTopK) {
  DenseUtterance u;
  u.id = "x";
  u.logits = FrameMatrix(2, 4);
  u.logits.data = {0.1, 0.9, 0.5, 0.2, 3.0, 1.0, 2.0, 4.0};
  std::stringstream ss;
  EncodeStream(std::vector<DenseUtterance>{u}, CodecParams{.k = 2, .temperature = 1.0, .floor_constant = {}}, ss);
  const StgtContent c = DecodeStream(ss);
  ASSERT_EQ(c.utterances.size(), 1u);
  EXPECT_EQ(c.utterances[0].frames[0], MakeSparseFrame(u.logits.row(0), 2));
  EXPECT_EQ(c.utterances[0].frames[1].entries[0].index, 3);
  EXPECT_EQ(c.utterances[0].frames[1].entries[1].index, 0);
}

TEST(StgtTest, WriterEnforcesDeclaredCount) {
  std::ostringstream os;
  StgtWriter w(os, StgtHeader{4, 1, 1.0f, 2});
  w.Write(SoftTargetUtterance{"a", {}});
  EXPECT_THROW(w.Finish(), Error);
}

TEST(StgtTest, WriterRejectsInvalidFrames) {
  std::ostringstream os;
  StgtWriter w(os, StgtHeader{4, 2, 1.0f, 1});
  EXPECT_THROW(w.Write(SoftTargetUtterance{"a", {SparseFrame{{{1, 0.5f}}}}}), Error);
}

TEST(StgtTest, InvalidHeadersAreRejected) {
  std::ostringstream os;
  EXPECT_THROW(StgtWriter(os, StgtHeader{0, 1, 1.0f, 0}), FormatError);
  EXPECT_THROW(StgtWriter(os, StgtHeader{4, 5, 1.0f, 0}), FormatError);
  EXPECT_THROW(StgtWriter(os, StgtHeader{4, 2, 0.0f, 0}), FormatError);
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 4, 5, 1.0f, {})), Kind::kInvalidHeader);
}

const RawFrame kGood{{{2, 1.5f}, {0, -0.25f}}};

TEST(StgtCorruptionTest, BadMagic) {
  EXPECT_EQ(DecodeKind(Fixture("STGX", 1, 3, 2, 1.0f, {{"a", {kGood}}})), Kind::kBadMagic);
}

TEST(StgtCorruptionTest, VersionMismatch) {
  EXPECT_EQ(DecodeKind(Fixture("STGT", 2, 3, 2, 1.0f, {{"a", {kGood}}})), Kind::kVersionMismatch);
}

TEST(StgtCorruptionTest, TruncatedFinalFrameNamesUtteranceAndFrame) {
  const std::string full = Fixture("STGT", 1, 3, 2, 1.0f, {{"first", {kGood}}, {"second", {kGood, kGood}}});
  std::string message;
  EXPECT_EQ(DecodeKind(full.substr(0, full.size() - 3), &message), Kind::kTruncated);
  EXPECT_NE(message.find("second"), std::string::npos) << message;
  EXPECT_NE(message.find("frame 1"), std::string::npos) << message;
  EXPECT_EQ(DecodeKind(full.substr(0, 10)), Kind::kTruncated);
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {kGood}}}, 2)), Kind::kTruncated);
}

TEST(StgtCorruptionTest, UnsortedEntries) {
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {RawFrame{{{0, -0.25f}, {2, 1.5f}}}}}})),
            Kind::kUnsorted);
  // Equal logits must come in ascending index order.
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {RawFrame{{{2, 1.0f}, {0, 1.0f}}}}}})),
            Kind::kUnsorted);
}

TEST(StgtCorruptionTest, DuplicateIndex) {
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {RawFrame{{{1, 1.5f}, {1, 0.5f}}}}}})),
            Kind::kDuplicateIndex);
}

TEST(StgtCorruptionTest, IndexOutOfRange) {
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {RawFrame{{{3, 1.5f}, {0, 0.5f}}}}}})),
            Kind::kIndexOutOfRange);
}

TEST(StgtCorruptionTest, NonFiniteLogit) {
  const float nan = std::numeric_limits<float>::quiet_NaN();
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {RawFrame{{{1, nan}, {0, 0.5f}}}}}})),
            Kind::kInvalidValue);
}

TEST(StgtCorruptionTest, TrailingData) {
  EXPECT_EQ(DecodeKind(Fixture("STGT", 1, 3, 2, 1.0f, {{"a", {kGood}}}) + "x"), Kind::kTrailingData);
}

TEST(StgtReaderTest, StreamsUtterancesInOrder) {
  Rng rng(3);
  const auto utts = RandomCorpus(rng, 10, 3, 5);
  const std::string bytes = Encode(StgtHeader{10, 3, 1.0f, 5}, utts);
  std::istringstream is(bytes);
  StgtReader reader(is);
  EXPECT_EQ(reader.header().num_utterances, 5u);
  SoftTargetUtterance u;
  std::size_t i = 0;
  while (reader.Next(u)) EXPECT_EQ(u, utts[i++]);
  EXPECT_EQ(i, utts.size());
}

}  // namespace
}  // namespace tsda::codec
