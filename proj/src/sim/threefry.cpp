#include "opnav/sim/threefry.hpp"

#include <cmath>
#include <numbers>

namespace opnav::sim {

namespace {

constexpr std::uint64_t kParity = 0x1BD11BDAA9FC1A22ULL;
constexpr int kRotations[8] = {16, 42, 12, 31, 16, 32, 24, 21};

constexpr std::uint64_t rotl(std::uint64_t x, int r) noexcept { return (x << r) | (x >> (64 - r)); }

constexpr double kTwoPow53Inv = 1.0 / 9007199254740992.0;

}  // namespace

std::array<std::uint64_t, 2> threefry2x64_20(std::array<std::uint64_t, 2> counter,
                                             std::array<std::uint64_t, 2> key) noexcept {
  const std::uint64_t ks[3] = {key[0], key[1], kParity ^ key[0] ^ key[1]};
  std::uint64_t x0 = counter[0] + ks[0];
  std::uint64_t x1 = counter[1] + ks[1];
  for (int round = 0; round < 20; ++round) {
    x0 += x1;
    x1 = rotl(x1, kRotations[round % 8]);
    x1 ^= x0;
    if (round % 4 == 3) {
      const std::uint64_t inject = static_cast<std::uint64_t>(round + 1) / 4;
      x0 += ks[inject % 3];
      x1 += ks[(inject + 1) % 3] + inject;
    }
  }
  return {x0, x1};
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

double CounterStream::next_uniform() noexcept {
  auto words = block(counter_++);
  return static_cast<double>(words[0] >> 11) * kTwoPow53Inv;
}

double CounterStream::next_normal() noexcept {
  auto words = block(counter_++);
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = (static_cast<double>(words[0] >> 11) + 1.0) * kTwoPow53Inv;
  const double u2 = static_cast<double>(words[1] >> 11) * kTwoPow53Inv;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace opnav::sim
