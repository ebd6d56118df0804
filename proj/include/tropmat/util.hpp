#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace tropmat {

// Subsets of {0,..,n-1} as bitmasks.
inline std::vector<int> mask_elements(uint32_t mask) {
  std::vector<int> out;
  for (int i = 0; mask; ++i, mask >>= 1)
    if (mask & 1) out.push_back(i);
  return out;
}

inline uint32_t mask_of(const std::vector<int>& elems) {
  uint32_t m = 0;
  for (int e : elems) m |= (1u << e);
  return m;
}

inline int popcount(uint32_t m) { return __builtin_popcount(m); }

// Deterministic 64-bit stream; the only randomness source in the library.
class SeededRng {
 public:
  explicit SeededRng(uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}
  uint64_t next() {
    uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // uniform in [-bound, bound]
  int64_t next_int(int64_t bound) {
    return static_cast<int64_t>(next() % (2 * bound + 1)) - bound;
  }

 private:
  uint64_t state_;
};

inline unsigned worker_count() {
  if (const char* env = std::getenv("TROPMAT_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

// Splits [0, n) across workers; results must be written to preallocated
// slots so the outcome is independent of the thread count.
inline void parallel_for(size_t n, const std::function<void(size_t)>& body) {
  unsigned workers = worker_count();
  if (workers <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (size_t i = w; i < n; i += workers) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace tropmat
