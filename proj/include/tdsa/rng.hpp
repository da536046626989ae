#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace tdsa {

// mt19937_64 with hand-written value mappings. The engine's output stream is
// fixed by the standard; avoiding the distribution classes keeps every draw
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // n must be > 0. Modulo bias is irrelevant at the sizes used here.
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tdsa
