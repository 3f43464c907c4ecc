#pragma once

// Shared numeric conventions: 64-bit floats everywhere, one global tolerance,
// +inf as the serialized "inf" sentinel, and a seeded generator that is
// bit-stable across platforms (all randomized suites draw from it).

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace latmet {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline constexpr double kTol = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool nearly_equal(double a, double b, double tol = kTol) {
  return std::abs(a - b) <= tol;
}

// Signed distance of x to the nearest integer, in (-1/2, 1/2].
inline double balanced_frac(double x) {
  double f = x - std::round(x);
  if (f <= -0.5) f += 1.0;
  return f;
}

// Distance of x to the nearest integer.
inline double dist_to_int(double x) { return std::abs(balanced_frac(x)); }

// Fractional part in [0, 1).
inline double frac(double x) {
  double f = x - std::floor(x);
  if (f >= 1.0) f = 0.0;
  return f;
}

// Certified enclosure for quantities we can only bound (covering radii,
// branch-and-bound distances). lower <= upper always; upper may be +inf.
struct RadiusInterval {
  double lower = 0.0;
  double upper = 0.0;

  RadiusInterval() = default;
  RadiusInterval(double lo, double hi) : lower(lo), upper(hi) {
    if (!(lower <= upper)) throw std::invalid_argument("RadiusInterval: lower > upper");
  }
  static RadiusInterval exact(double v) { return RadiusInterval(v, v); }
  static RadiusInterval infinite() { return RadiusInterval(kInf, kInf); }

  double width() const { return upper - lower; }
  bool contains(double v) const { return lower - kTol <= v && v <= upper + kTol; }
  bool is_infinite() const { return std::isinf(lower); }
};

// splitmix64-based generator. std::uniform_real_distribution is
// implementation-defined, so suites that must reproduce across toolchains
// use these explicit draws only.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  // Marsaglia polar method, deterministic given the stream.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = uniform(-1.0, 1.0);
      v = uniform(-1.0, 1.0);
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  Vec gaussian_vec(int d) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = gaussian();
    return v;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Key for exact-coordinate hashing of points that are known to sit on a
// grid/lattice up to kTol (used by window verification and dedup).
struct QuantizedPoint {
  std::vector<std::int64_t> q;
  bool operator==(const QuantizedPoint&) const = default;
};

inline QuantizedPoint quantize(const Vec& p, double unit = 1e-6) {
  QuantizedPoint k;
  k.q.resize(p.size());
  for (int i = 0; i < p.size(); ++i) k.q[i] = static_cast<std::int64_t>(std::llround(p[i] / unit));
  return k;
}

struct QuantizedPointHash {
  std::size_t operator()(const QuantizedPoint& k) const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (auto v : k.q) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace latmet
