#pragma once

// Counter-based random numbers (Philox4x32-10). Every draw is a pure function
// of (seed, stream, index), so a sample is reproducible regardless of the
// order in which other samples were taken.

#include <array>
#include <cstdint>

namespace fixpoint {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Uniform in (0, 1) from 53 random bits.
double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Standard normal via Box-Muller on one Philox block.
double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index);

/// Sequential view of one (seed, stream) pair.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  double operator()() { return counter_normal(seed_, stream_, index_++); }

  std::uint64_t position() const { return index_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t index_ = 0;
};

}  // namespace fixpoint
