#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace opnav::sim {

/// Threefry-2x64 with 20 rounds (Salmon et al., Random123). A keyed bijection
/// on 128-bit counters; identical output on every platform.
std::array<std::uint64_t, 2> threefry2x64_20(std::array<std::uint64_t, 2> counter,
                                             std::array<std::uint64_t, 2> key) noexcept;

inline constexpr std::string_view kRngId = "threefry2x64-20";

/// 64-bit FNV-1a, used to turn stream names into key words.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Counter-mode stream. Key = (seed, stream key); counter = (draw index,
/// substream). Each draw consumes exactly one block, so draw k of a substream
/// never depends on how many other substreams exist.
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream_key, std::uint64_t substream) noexcept
      : key_{seed, stream_key}, substream_(substream) {}

  /// Seeds the stream key from a name, e.g. the cohort group name.
  static CounterStream named(std::uint64_t seed, std::string_view name, std::uint64_t substream) noexcept {
    return CounterStream(seed, fnv1a64(name), substream);
  }

  std::array<std::uint64_t, 2> block(std::uint64_t index) const noexcept {
    return threefry2x64_20({index, substream_}, key_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept;
  /// Standard normal via Box-Muller on the two words of one block.
  double next_normal() noexcept;

  std::uint64_t position() const noexcept { return counter_; }

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t counter_ = 0;
};

}  // namespace opnav::sim
