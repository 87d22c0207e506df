#pragma once

#include <cstdint>

namespace brlstm {

/// Counter-based random stream. Draw k of stream (seed, stream_id) is a pure
/// function of the triple, so substreams can be handed to independent
/// consumers and replayed in any order.
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }
  std::uint64_t position() const noexcept { return counter_; }

  /// Raw 64-bit value at an absolute draw index; does not advance the stream.
  std::uint64_t at(std::uint64_t index) const noexcept;

  std::uint64_t next_u64() noexcept { return at(counter_++); }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept;

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Standard normal draw (Box-Muller, cosine branch; consumes two raw draws).
  double standard_normal() noexcept;

  /// Child stream with a stream id derived from this one; the parent is not advanced.
  RngStream derive(std::uint64_t child) const noexcept;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// One draw from N(mean, stddev^2). stddev == 0 returns mean exactly.
/// Throws ArgumentError for negative or non-finite stddev.
double gaussian(RngStream& stream, double mean, double stddev);

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace brlstm
