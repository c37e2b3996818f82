#include "fixpoint/random.hpp"

#include <cmath>
#include <numbers>

namespace fixpoint {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = std::uint64_t(a) * std::uint64_t(b);
  hi = std::uint32_t(product >> 32);
  lo = std::uint32_t(product);
}

inline double to_unit(std::uint32_t high, std::uint32_t low) {
  // 53 bits, offset by half an ulp so that 0 and 1 are never produced.
  const std::uint64_t bits = ((std::uint64_t(high) << 32) | low) >> 11;
  return (double(bits) + 0.5) * 0x1.0p-53;
}

std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t stream,
                                   std::uint64_t index) {
  return philox4x32({std::uint32_t(index), std::uint32_t(index >> 32), std::uint32_t(stream),
                     std::uint32_t(stream >> 32)},
                    {std::uint32_t(seed), std::uint32_t(seed >> 32)});
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, counter[0], hi0, lo0);
    mulhilo(kMul1, counter[2], hi1, lo1);
    counter = {hi1 ^ counter[1] ^ key[0], lo1, hi0 ^ counter[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return counter;
}

double counter_uniform(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const auto words = block(seed, stream, index);
  return to_unit(words[0], words[1]);
}

double counter_normal(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  const auto words = block(seed, stream, index);
  const double u1 = to_unit(words[0], words[1]);
  const double u2 = to_unit(words[2], words[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fixpoint
