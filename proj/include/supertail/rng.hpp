#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace supertail {

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace detail

// Counter-based random stream. A stream is identified by (seed, stream
// index); draw i is a pure function of that identity, so parallel consumers
// reading disjoint counter ranges reproduce the exact same values regardless
// of scheduling or thread count.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(detail::mix64(detail::mix64(seed) ^
                           detail::mix64(stream ^ 0xDA442D24691348AAull))) {}

  std::uint64_t bits(std::uint64_t i) const {
    return detail::mix64(key_ + i * 0x9E3779B97F4A7C15ull);
  }

  // Uniform draw in the open interval (0,1).
  double uniform(std::uint64_t i) const {
    return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
  }

  RngStream substream(std::uint64_t idx) const {
    RngStream s(*this);
    s.key_ = detail::mix64(key_ ^ detail::mix64(idx ^ 0xC2B2AE3D27D4EB4Full));
    return s;
  }

 private:
  std::uint64_t key_;
};

// Runs fn(block_index, begin, end) over [0, total) split into fixed-size
// blocks. Block boundaries do not depend on the thread count, so any
// per-block partial results can be reduced in block order deterministically.
template <class Fn>
void for_blocks(std::uint64_t total, std::uint64_t block_size,
                unsigned threads, Fn&& fn) {
  if (total == 0) return;
  if (block_size == 0) block_size = total;
  std::uint64_t n_blocks = (total + block_size - 1) / block_size;
  if (threads <= 1 || n_blocks == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b)
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::uint64_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      fn(b, b * block_size, std::min(total, (b + 1) * block_size));
    }
  };
  unsigned n_workers = std::min<std::uint64_t>(threads, n_blocks);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline constexpr std::uint64_t kDefaultBlockSize = 1ull << 16;

}  // namespace supertail
