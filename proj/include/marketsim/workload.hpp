#pragma once

#include <cstdint>
#include <vector>

#include "marketsim/core.hpp"

namespace marketsim {

/// SplitMix64 finalizer: the 64-bit avalanche mix from Steele et al.'s
/// SplittableRandom, also used to derive per-user stream seeds.
std::uint64_t mix64(std::uint64_t z);

/// Portable counter-based PRNG (SplitMix64): state advances by the golden
/// gamma 0x9E3779B97F4A7C15 and each output is mix64(state). The integer
/// stream is bit-identical on every platform; no platform default RNG is
/// used anywhere. Gaussian variates come from an explicit Box-Muller
/// transform, so the full draw sequence is pinned down by this header.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix64(state_);
  }

  /// Uniform on (0, 1]: ((next() >> 11) + 1) * 2^-53. Never 0, so it is safe
  /// inside log().
  double uniform_oc() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  /// Uniform on [0, 1): (next() >> 11) * 2^-53.
  double uniform_co() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  /// Box-Muller, cosine branch; consumes exactly two outputs per variate.
  double gaussian(double mu, double sigma);

 private:
  std::uint64_t state_;
};

/// Seed of user i's private stream: mix64(seed XOR golden_gamma*(i+1)).
/// Each user owns an independent generator, so one user's task stream is
/// unchanged by adding or removing other users.
std::uint64_t user_stream_seed(std::uint64_t seed, int user);

/// A sampling distribution with a hard floor enforced by resampling (never
/// clamping, which would pile probability mass on the floor).
struct DistributionSpec {
  enum class Kind { GaussianTruncated, Uniform };
  Kind kind = Kind::GaussianTruncated;
  double mu = 0.0;     // Gaussian
  double sigma = 0.0;  // Gaussian
  double lo = 0.0;     // Uniform: sample in (lo, hi]
  double hi = 1.0;
  double floor = 0.0;  // resample until sample > floor

  static DistributionSpec gaussian(double mu, double sigma, double floor);
  static DistributionSpec uniform(double lo, double hi);

  double sample(SplitMix64& rng) const;
};

/// Gaussian(mu, mu/2) resampled until > 0.001 s.
double sample_interarrival(double mu, SplitMix64& rng);

/// Draws one task arriving now: size ~ Gaussian(size_mu, size_sigma) > 0.01,
/// deadline = now + Gaussian(deadline_mu, deadline_sigma) > 0.01, value
/// uniform on (value_lo, value_hi]. Draw order: size, deadline, value.
Task gen_task(int owner, std::uint64_t id, double now, const SimConfig& config,
              SplitMix64& rng);

/// Materializes every user's arrival stream up to (not including) the
/// horizon. Task ids are (user << 32) | per-user sequence number.
std::vector<std::vector<Task>> generate_workload(const SimConfig& config);

}  // namespace marketsim
