#pragma once

#include <array>
#include <cstdint>

namespace osbm {

/// Identifies one reproducible random stream: the same pair always yields
/// the same draw sequence, independent of which thread consumes it.
struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Philox-4x32 with ten rounds (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Stateless block function: counter + key -> 128 bits.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

/// Sequential view over a counter-based stream. The key is derived from the
/// master seed and a lane tag; the upper half of the counter holds the stream
/// index and the lower half counts blocks, so streams never overlap.
class RandomStream {
 public:
  explicit RandomStream(RngSpec spec, std::uint32_t lane = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on the open interval (0, 1).
  double uniform() noexcept;
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() noexcept;

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept;

  Philox4x32::Key key_{};
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int buffered_ = 0;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace osbm
