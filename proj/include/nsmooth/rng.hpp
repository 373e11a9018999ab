#pragma once

#include <array>
#include <cstdint>

#include "nsmooth/types.hpp"

namespace nsmooth {

/// Philox4x32-10 counter-based generator (Salmon et al.). A draw is a pure
/// function of (key, counter), so chains are reproducible on any platform and
/// independent of thread scheduling.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter apply(Counter ctr, Key key) noexcept;
};

/// Stream of variates addressed by (seed, stream id, step). Each step owns an
/// independent block of counters, so the draws at step k do not depend on how
/// many variates earlier steps consumed.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  /// Positions the stream at the start of `step`'s counter block.
  void seek(std::uint64_t step) noexcept;

  double uniform() noexcept;  // [0, 1)
  double normal() noexcept;
  void fill_normal(VecRef out) noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Philox4x32::Key key_{};
  std::uint64_t step_ = 0;
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace nsmooth
