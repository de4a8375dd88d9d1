#pragma once

#include <array>
#include <cstdint>

#include <Eigen/Core>

namespace ramcmc {

/// Counter-based pseudo-random stream (Philox4x32-10).
///
/// A stream is identified by (seed, stream id); equal identifiers produce the
/// same sequence regardless of what other streams exist, so parallel chains
/// and replications draw from disjoint streams without coordination.
/// Single-owner mutable state: never share one instance across threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        stream_lo_(static_cast<std::uint32_t>(stream)),
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {}

  std::uint32_t next_u32() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return lo | (hi << 32);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal (Marsaglia polar, second value cached).
  double normal();

  Eigen::VectorXd normal_vector(Eigen::Index dim);

  /// Gamma(shape, 1) via Marsaglia-Tsang.
  double gamma(double shape);

  double chi_squared(double dof) { return 2.0 * gamma(0.5 * dof); }

  double cauchy();

 private:
  void refill();

  std::uint32_t key0_, key1_;
  std::uint32_t stream_lo_, stream_hi_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int index_ = 4;
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace ramcmc
