#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cojump {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// A stream is identified by (key, stream id); the 64-bit block counter walks
// through that stream. Streams for distinct (seed, domain, path, draw)
// tuples never share counters, so results do not depend on how work is
// split across threads.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t key, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  // Raw bijection, exposed for known-answer tests.
  static Block encrypt(Block counter, Key key) noexcept;

  std::uint64_t blocks_consumed() const noexcept { return block_; }

 private:
  void refill() noexcept;

  Key key_{};
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int pos_ = 4;
};

using Rng = Philox4x32;

// Stream domains keep grid/path simulation and bootstrap draws disjoint even
// when they share a path index.
enum class StreamDomain : std::uint32_t {
  kSimulation = 1,
  kBootstrap = 2,
  kAuxiliary = 3,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// Stream for (master seed, domain, path, sub-stream). `sub` indexes bootstrap
// draws m within a path; simulation uses sub = 0.
Rng make_stream(std::uint64_t seed, StreamDomain domain, std::uint64_t path,
                std::uint64_t sub = 0) noexcept;

// Identifies the per-path family of bootstrap streams.
struct StreamSeed {
  std::uint64_t seed = 0;
  std::uint64_t path = 0;

  Rng draw_stream(std::uint64_t m) const noexcept {
    return make_stream(seed, StreamDomain::kBootstrap, path, m);
  }
};

}  // namespace cojump
