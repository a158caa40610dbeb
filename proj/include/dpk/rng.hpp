#pragma once

#include <boost/random/normal_distribution.hpp>

#include <array>
#include <cstdint>
#include <limits>

namespace dpk::rng {

/// Philox4x32-10 counter-based generator. A stream is fixed by (seed, stream id); the
/// block counter advances inside it, so every path owns an independent, reproducible
/// sequence regardless of which thread draws it.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (used_ == 2) {
      buffer_ = bijection(counter_block(block_++), key_);
      used_ = 0;
    }
    const int i = 2 * used_++;
    return static_cast<result_type>(buffer_[i]) | (static_cast<result_type>(buffer_[i + 1]) << 32);
  }

  /// Uniform double in (0, 1).
  double uniform() { return ((*this)() >> 11) * 0x1.0p-53 + 0x1.0p-54; }

  static Block bijection(Block ctr, std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    return ctr;
  }

 private:
  Block counter_block(std::uint64_t block) const {
    return {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
            static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int used_ = 2;
};

/// Standard normal draws (ziggurat) from one Philox stream.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : engine_(seed, stream) {}

  double operator()() { return dist_(engine_); }
  double uniform() { return engine_.uniform(); }
  Philox& engine() { return engine_; }

 private:
  Philox engine_;
  boost::random::normal_distribution<double> dist_;
};

}  // namespace dpk::rng
