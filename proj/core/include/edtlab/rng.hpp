#pragma once

#include <array>
#include <cstdint>

namespace edtlab {

/// Philox4x32-10 block function: 128-bit counter, 64-bit key.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// Independent random streams addressed by (seed, stream id, purpose).
///
/// Draw i of a stream is a pure function of the address and i, so any
/// partition of work across threads reproduces the same numbers.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t purpose) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on (0, 1].
  double uniform() noexcept;
  /// Exponential with the given mean, by inversion.
  double exponential(double mean) noexcept;

  std::uint64_t draws() const noexcept { return index_; }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint32_t purpose_;
  std::uint64_t index_ = 0;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace edtlab
