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

#ifndef TSDA_COMMON_BINARY_IO_H_
#define TSDA_COMMON_BINARY_IO_H_

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace tsda {

// Little-endian primitives shared by all on-disk formats (WAV, LBL1, LFBE,
// STGT, DNET). Byte order is composed explicitly, independent of the host.

class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& os) : os_(os) {}

  void U8(std::uint8_t v) { Put(&v, 1); }
  void U16(std::uint16_t v) { PutLe(v, 2); }
  void U32(std::uint32_t v) { PutLe(v, 4); }
  void U64(std::uint64_t v) { PutLe(v, 8); }
  void I16(std::int16_t v) { U16(static_cast<std::uint16_t>(v)); }
  void F32(float v) { U32(std::bit_cast<std::uint32_t>(v)); }
  void F64(double v) { U64(std::bit_cast<std::uint64_t>(v)); }
  void Bytes(std::string_view s) { Put(s.data(), s.size()); }

  std::uint64_t bytes_written() const { return count_; }
  bool good() const { return os_.good(); }

 private:
  void Put(const void* p, std::size_t n) {
    os_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
    count_ += n;
  }
  void PutLe(std::uint64_t v, int n) {
    char buf[8];
    for (int i = 0; i < n; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    Put(buf, n);
  }

  std::ostream& os_;
  std::uint64_t count_ = 0;
};

/// Every read returns false on a short read instead of throwing, so callers
/// can attach format-specific context to the failure.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& is) : is_(is) {}

  bool U8(std::uint8_t& v) { return Get(&v, 1); }
  bool U16(std::uint16_t& v) { return GetLe(v); }
  bool U32(std::uint32_t& v) { return GetLe(v); }
  bool U64(std::uint64_t& v) { return GetLe(v); }
  bool I16(std::int16_t& v) {
    std::uint16_t u;
    if (!U16(u)) return false;
    v = static_cast<std::int16_t>(u);
    return true;
  }
  bool F32(float& v) {
    std::uint32_t u;
    if (!U32(u)) return false;
    v = std::bit_cast<float>(u);
    return true;
  }
  bool F64(double& v) {
    std::uint64_t u;
    if (!U64(u)) return false;
    v = std::bit_cast<double>(u);
    return true;
  }
  bool Bytes(std::string& s, std::size_t n) {
    s.resize(n);
    return n == 0 || Get(s.data(), n);
  }
  /// True when no bytes remain.
  bool AtEnd() { return is_.peek() == std::char_traits<char>::eof(); }

 private:
  bool Get(void* p, std::size_t n) {
    is_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    return static_cast<std::size_t>(is_.gcount()) == n;
  }
  template <typename T>
  bool GetLe(T& v) {
    unsigned char buf[sizeof(T)];
    if (!Get(buf, sizeof(T))) return false;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
      acc |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    v = static_cast<T>(acc);
    return true;
  }

  std::istream& is_;
};

}  // namespace tsda

#endif  // TSDA_COMMON_BINARY_IO_H_
