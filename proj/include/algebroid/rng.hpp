#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace algebroid {

/// Counter-based deterministic generator. Output k of a stream with seed s is
///   mix(s + (k + 1) * 0x9E3779B97F4A7C15)
/// where mix is the splitmix64 finalizer. The mapping is pure, so identical
/// (seed, counter) pairs give identical values on every platform; seeded runs
/// of the CLI are byte-reproducible. The exact constants are part of the
/// output contract and documented in the README.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t at(std::uint64_t k) const {
    return mix(seed_ + (k + 1) * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t next_u64() { return at(counter_++); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  Eigen::VectorXd uniform_vector(const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi) {
    Eigen::VectorXd x(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) x[i] = uniform(lo[i], hi[i]);
    return x;
  }

  /// Symmetric box [-w, w]^n.
  Eigen::VectorXd uniform_box(Eigen::Index n, double w) {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = uniform(-w, w);
    return x;
  }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Radical-inverse (Halton) value of `index` in the given prime base.
inline double halton(std::uint64_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  // index 0 maps to 0; callers usually start at 1 to avoid the box corner.
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

/// Point `index` of the Halton sequence scaled into the box [lo, hi].
inline Eigen::VectorXd halton_point(std::uint64_t index,
                                    const Eigen::VectorXd& lo,
                                    const Eigen::VectorXd& hi) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  Eigen::VectorXd x(lo.size());
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    const unsigned base = kPrimes[i % 8];
    x[i] = lo[i] + (hi[i] - lo[i]) * halton(index, base);
  }
  return x;
}

}  // namespace algebroid
