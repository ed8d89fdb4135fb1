#pragma once

#include <complex>

#include "chirpmix/propagate.hpp"
#include "chirpmix/spinops.hpp"
#include "chirpmix/waveform.hpp"

namespace testutil {

inline constexpr double kPi = 3.14159265358979323846;

// Reference chirp: 10 kHz rf swept over +/-30 kHz at a = omega1^2/16.
inline chirpmix::ChirpParams reference_chirp() {
  chirpmix::ChirpParams p;
  p.A = 2.0 * kPi * 30e3;
  p.omega1 = 2.0 * kPi * 10e3;
  p.a = p.omega1 * p.omega1 / 16.0;
  return p;
}

inline chirpmix::SpinSystem reference_pair() {
  return {2.0 * kPi * -5e3, 2.0 * kPi * 20e3, 33.0};
}

// Scaling-and-squaring Taylor exponential: independent oracle for the
// eigendecomposition-based expm.
template <typename Mat>
Mat taylor_expm(Mat A) {
  int squarings = 0;
  while (A.norm() > 0.25) {
    A *= 0.5;
    ++squarings;
  }
  Mat term = Mat::Identity();
  Mat sum = Mat::Identity();
  for (int k = 1; k <= 24; ++k) {
    term = (term * A) / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline chirpmix::Mat4c kron(const chirpmix::Mat2c& a,
                            const chirpmix::Mat2c& b) {
  chirpmix::Mat4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      out.template block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

// Deterministic splitmix64-based uniform doubles in [lo, hi).
struct Rng {
  unsigned long long state;
  explicit Rng(unsigned long long seed) : state(seed) {}
  double uniform(double lo, double hi) {
    state += 0x9e3779b97f4a7c15ULL;
    unsigned long long z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    z = z ^ (z >> 31);
    const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }
};

}  // namespace testutil
