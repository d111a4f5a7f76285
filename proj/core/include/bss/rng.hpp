// Copyright (c) 2026 The bss-toolkit Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace bss {

/// SplitMix64 finalizer; used to derive substream keys.
std::uint64_t mix64(std::uint64_t x);

/// Stable 64-bit FNV-1a hash, used to turn names into substream indices.
std::uint64_t fnv1a64(std::string_view s);

/// Deterministic random stream. Every stream has a key; child streams are
/// derived from the key alone (never from consumed state), so a child like
/// `Rng(seed).child(sample).child(iteration).child(k)` is the same no matter
/// which thread asks for it or when.
///
/// Draw conversions are written out here instead of using the standard
/// distributions, whose output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t key);

  static Rng substream(std::uint64_t master, std::initializer_list<std::uint64_t> path);

  std::uint64_t key() const { return key_; }
  Rng child(std::uint64_t index) const;

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi);
  /// Uniform integer in the closed range [lo, hi], unbiased.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
  bool coin() { return (next_u64() >> 63) != 0; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace bss
