#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagparse {

// Error raised for malformed input data (files, records, graphs).
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Error raised for internal invariant breaks (oracle bugs, shape mismatches).
struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

// Deterministic 64-bit RNG. std::mt19937_64 is portable bit-for-bit, but the
// std distributions are not, so the helpers below do the mapping themselves.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : state_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}

  std::uint64_t next_u64() {
    // splitmix64
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next_u64() % n : 0; }

  int below_int(int n) { return static_cast<int>(below(static_cast<std::uint64_t>(n))); }

  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = below(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // Fork a child stream; deterministic in (parent state, tag).
  Rng fork(std::uint64_t tag) {
    return Rng(next_u64() ^ (tag * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  }

 private:
  std::uint64_t state_;
};

std::vector<std::string> split(const std::string& s, char sep);
std::string join(const std::vector<std::string>& parts, const std::string& sep);
bool starts_with(const std::string& s, const std::string& prefix);

// FNV-1a over a string; used for config fingerprints in checkpoints.
std::uint64_t fnv1a(const std::string& s);

// First / last `count` UTF-8 code points.
std::string utf8_prefix(const std::string& s, int count);
std::string utf8_suffix(const std::string& s, int count);

// Word shape: character classes collapsed, e.g. "Xxxx", "dd", "Xx-d".
// Runs longer than 4 of the same class are truncated to 4, matching the
// usual shape convention.
std::string word_shape(const std::string& word);

}  // namespace dagparse
