#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace wetting {

// Philox4x32-10 (Salmon et al. 2011). Counter-based, so every
// (seed, replica, sweep) triple addresses its own stream.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

class Rng {
 public:
  using result_type = std::uint64_t;

  Rng(std::uint64_t seed, std::uint32_t replica = 0, std::uint64_t block = 0)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        replica_(replica), block_(block) {}

  // Restart at the beginning of block b (e.g. one block per sweep).
  void seek(std::uint64_t b) {
    block_ = b;
    index_ = 0;
    have_ = 0;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (have_ < 2) refill();
    have_ -= 2;
    const int k = 2 - have_;  // 0 or 2
    return (static_cast<std::uint64_t>(buf_[k]) << 32) | buf_[k + 1];
  }

  // Uniform in [0,1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  void refill() {
    buf_ = philox4x32({index_++, static_cast<std::uint32_t>(block_),
                       static_cast<std::uint32_t>(block_ >> 32), replica_},
                      key_);
    have_ = 4;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t replica_;
  std::uint64_t block_;
  std::uint32_t index_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int have_ = 0;
};

}  // namespace wetting
