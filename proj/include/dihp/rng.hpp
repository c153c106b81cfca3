#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace dihp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64 output is fixed by the standard; the distributions are not, so
// bounded draws and floats are done by hand to keep runs byte-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}

  // independent stream for trial `index` under a root seed
  static Rng derive(std::uint64_t root, std::uint64_t index) {
    return Rng(splitmix64(root) ^ splitmix64(index * 0x632be59bd9b4e019ULL + 1));
  }

  std::uint64_t next() { return eng_(); }

  std::uint64_t below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
    std::uint64_t x;
    do x = eng_();
    while (x >= limit);
    return x % bound;
  }

  bool coin() { return eng_() >> 63; }

  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace dihp
