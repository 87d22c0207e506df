#include "brlstm/rng.hpp"

#include <cmath>
#include <numbers>

#include "brlstm/error.hpp"

namespace brlstm {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), key_(mix64(seed ^ mix64(stream_id + kGolden))) {}

std::uint64_t RngStream::at(std::uint64_t index) const noexcept {
  return mix64(key_ + (index + 1) * kGolden);
}

double RngStream::uniform() noexcept {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::standard_normal() noexcept {
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RngStream RngStream::derive(std::uint64_t child) const noexcept {
  return RngStream(seed_, mix64(stream_id_ ^ mix64(child ^ 0xD1B54A32D192ED03ULL)));
}

double gaussian(RngStream& stream, double mean, double stddev) {
  if (!std::isfinite(stddev) || stddev < 0.0) {
    throw ArgumentError("gaussian: standard deviation must be finite and >= 0, got " +
                        std::to_string(stddev));
  }
  if (stddev == 0.0) return mean;
  return mean + stddev * stream.standard_normal();
}

}  // namespace brlstm
