#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "qclone/dense.hpp"

namespace qclone {

// Deterministic splitmix64-based generator. Avoids the standard library
// distributions so sampled values are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller.
  double gaussian() {
    if (has_cached_) {
      has_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    cached_ = r * std::sin(a);
    has_cached_ = true;
    return r * std::cos(a);
  }

  // Flat Dirichlet sample (normalized exponentials).
  std::vector<double> dirichlet(std::size_t n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) {
      double u = uniform();
      while (u <= 0.0) u = uniform();
      x = -std::log(u);
      sum += x;
    }
    for (double& x : w) x /= sum;
    return w;
  }

  // Haar-random unit vector.
  std::vector<cplx> haar_state(std::size_t dim) {
    std::vector<cplx> v(dim);
    for (cplx& x : v) x = cplx{gaussian(), gaussian()};
    vec_normalize(v);
    return v;
  }

  // Independent stream derived from this seed and an index.
  Rng fork(std::uint64_t stream) const {
    Rng r(state_ ^ (0xd1342543de82ef95ULL * (stream + 1)));
    r.next_u64();
    return r;
  }

 private:
  std::uint64_t state_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace qclone
