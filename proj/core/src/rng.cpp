// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/rng.hpp"

#include <cmath>

namespace aggcorrect {

std::uint64_t derive_seed(std::uint64_t seed,
                          std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = splitmix64(seed);
  for (const std::uint64_t word : path) {
    h = splitmix64(h ^ word);
  }
  return h;
}

double RngStream::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::uniform_open01() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
  if (has_spare_normal_) {
    has_spare_normal_ = false;
    return spare_normal_;
  }
  double x1, x2, s;
  do {
    x1 = 2.0 * uniform01() - 1.0;
    x2 = 2.0 * uniform01() - 1.0;
    s = x1 * x1 + x2 * x2;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = x2 * f;
  has_spare_normal_ = true;
  return x1 * f;
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) {
    fail(ErrorKind::NonPositiveConcentration, "gamma shape must be > 0");
  }
  if (shape < 1.0) {
    // Exact boost: if G ~ Gamma(shape+1) and U ~ U(0,1) independent, then
    // G * U^(1/shape) ~ Gamma(shape).
    return gamma(shape + 1.0) * std::pow(uniform_open01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open01();
    if (u < 1.0 - 0.0331 * x * x * x * x) {
      return d * v;
    }
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

Vector RngStream::dirichlet(const Vector& concentrations) {
  const Eigen::Index k = concentrations.size();
  Vector draw(k);
  for (;;) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
      draw(i) = gamma(concentrations(i));
      sum += draw(i);
    }
    if (sum > 0.0) {
      draw /= sum;
      return draw;
    }
    // All gammas underflowed to zero; resample.
  }
}

int RngStream::categorical(const Vector& probs) {
  const double u = uniform01();
  double cumulative = 0.0;
  const int k = static_cast<int>(probs.size());
  for (int i = 0; i < k; ++i) {
    cumulative += probs(i);
    if (u < cumulative) {
      return i;
    }
  }
  return k - 1;  // u landed in the rounding slack beyond the last bin
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) {
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = bound * (UINT64_MAX / bound);
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % bound;
}

}  // namespace aggcorrect
