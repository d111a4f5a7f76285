// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "bss/error.hpp"

namespace bss::detail {

inline void put_u32_le(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff),
                     static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

inline void put_u64_le(std::ostream& os, std::uint64_t v) {
  put_u32_le(os, static_cast<std::uint32_t>(v & 0xffffffffu));
  put_u32_le(os, static_cast<std::uint32_t>(v >> 32));
}

inline void put_f32_le(std::ostream& os, float v) {
  put_u32_le(os, std::bit_cast<std::uint32_t>(v));
}

// Readers throw FormatError carrying the byte offset of the failed read.
class ByteReader {
 public:
  ByteReader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  std::uint64_t offset() const { return offset_; }

  void read(void* dst, std::size_t n) {
    is_.read(static_cast<char*>(dst), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) {
      throw FormatError(what_ + ": truncated at byte offset " +
                        std::to_string(offset_ + is_.gcount()) + " (wanted " +
                        std::to_string(n) + " bytes at offset " +
                        std::to_string(offset_) + ")");
    }
    offset_ += n;
  }

  std::uint32_t u32_le() {
    unsigned char b[4];
    read(b, 4);
    return std::uint32_t{b[0]} | std::uint32_t{b[1]} << 8 | std::uint32_t{b[2]} << 16 |
           std::uint32_t{b[3]} << 24;
  }

  std::uint32_t u32_be() {
    unsigned char b[4];
    read(b, 4);
    return std::uint32_t{b[3]} | std::uint32_t{b[2]} << 8 | std::uint32_t{b[1]} << 16 |
           std::uint32_t{b[0]} << 24;
  }

  std::uint64_t u64_le() {
    const std::uint64_t lo = u32_le();
    const std::uint64_t hi = u32_le();
    return lo | hi << 32;
  }

  float f32_le() { return std::bit_cast<float>(u32_le()); }

  [[noreturn]] void fail(const std::string& msg, std::uint64_t at) const {
    throw FormatError(what_ + ": " + msg + " at byte offset " + std::to_string(at));
  }

 private:
  std::istream& is_;
  std::string what_;
  std::uint64_t offset_ = 0;
};

}  // namespace bss::detail
