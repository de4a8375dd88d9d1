#include "ramcmc/rng.hpp"

#include <cmath>

namespace ramcmc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

}  // namespace

void RngStream::refill() {
  std::uint32_t x0 = static_cast<std::uint32_t>(counter_);
  std::uint32_t x1 = static_cast<std::uint32_t>(counter_ >> 32);
  std::uint32_t x2 = stream_lo_;
  std::uint32_t x3 = stream_hi_;
  std::uint32_t k0 = key0_;
  std::uint32_t k1 = key1_;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x0;
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x2;
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t y0 = hi1 ^ x1 ^ k0;
    const std::uint32_t y1 = lo1;
    const std::uint32_t y2 = hi0 ^ x3 ^ k1;
    const std::uint32_t y3 = lo0;
    x0 = y0;
    x1 = y1;
    x2 = y2;
    x3 = y3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  buffer_ = {x0, x1, x2, x3};
  index_ = 0;
  ++counter_;
}

double RngStream::normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s <= 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  cached_normal_ = v * f;
  has_cached_normal_ = true;
  return u * f;
}

Eigen::VectorXd RngStream::normal_vector(Eigen::Index dim) {
  Eigen::VectorXd out(dim);
  for (Eigen::Index i = 0; i < dim; ++i) out[i] = normal();
  return out;
}

double RngStream::gamma(double shape) {
  if (shape <= 0.0) return 0.0;
  if (shape < 1.0) {
    // Boost to shape + 1, then scale back by a uniform power.
    const double u = 1.0 - uniform01();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
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
    const double u = uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::cauchy() {
  // Inverse CDF; uniform01 is in [0, 1) so the argument stays inside (-pi/2, pi/2).
  return std::tan(M_PI * (uniform01() - 0.5));
}

}  // namespace ramcmc
