#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace tea {

// splitmix64 step; advances x and returns the mixed output.
constexpr std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// FNV-1a over a stream name, used to label independent RNG substreams.
constexpr std::uint64_t stream_tag(std::string_view name) {
  std::uint64_t h = 14695981039346656037ull;
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  return h;
}

// Derives the seed of an independent substream from a base seed, a stream
// name, and an optional index. Different (name, index) pairs give streams
// that never share state with each other or with the base.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view stream,
                                    std::uint64_t index = 0) {
  std::uint64_t x = base;
  splitmix64(x);
  x ^= stream_tag(stream);
  splitmix64(x);
  x ^= index * 0xD1B54A32D192ED03ull + 0x2545F4914F6CDD1Dull;
  return splitmix64(x);
}

// Deterministic RNG: the mt19937_64 engine is fully specified by the C++
// standard, and all value mappings below are hand-rolled, so sequences are
// bit-identical across standard library implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // 53-bit uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + next_unit() * (hi - lo); }

  // Unbiased uniform index in [0, n) via rejection sampling.
  std::size_t uniform_index(std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: n must be positive");
    const std::uint64_t span = n;
    const std::uint64_t rem = (0ull - span) % span;  // 2^64 mod span
    std::uint64_t u = next_u64();
    if (rem != 0) {
      const std::uint64_t bound = 0ull - rem;
      while (u >= bound) u = next_u64();
    }
    return static_cast<std::size_t>(u % span);
  }

  int uniform_action(int n_actions) { return static_cast<int>(uniform_index(n_actions)); }

  // Fisher-Yates.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // First k entries of a partial Fisher-Yates over 0..n-1, without replacement.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
    if (k > n) throw std::invalid_argument("sample_without_replacement: k > n");
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t j = i + uniform_index(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return idx;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tea
