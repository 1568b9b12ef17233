#include "marketsim/workload.hpp"

#include <cmath>
#include <numbers>

namespace marketsim {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

double SplitMix64::gaussian(double mu, double sigma) {
  const double u1 = uniform_oc();
  const double u2 = uniform_co();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  return mu + sigma * radius * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t user_stream_seed(std::uint64_t seed, int user) {
  return mix64(seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(user) + 1)));
}

DistributionSpec DistributionSpec::gaussian(double mu, double sigma, double floor) {
  DistributionSpec d;
  d.kind = Kind::GaussianTruncated;
  d.mu = mu;
  d.sigma = sigma;
  d.floor = floor;
  return d;
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  DistributionSpec d;
  d.kind = Kind::Uniform;
  d.lo = lo;
  d.hi = hi;
  d.floor = lo;
  return d;
}

double DistributionSpec::sample(SplitMix64& rng) const {
  if (kind == Kind::Uniform) {
    // (lo, hi]: the uniform_oc draw already excludes 0.
    return lo + rng.uniform_oc() * (hi - lo);
  }
  double v;
  do {
    v = rng.gaussian(mu, sigma);
  } while (!(v > floor));
  return v;
}

double sample_interarrival(double mu, SplitMix64& rng) {
  return DistributionSpec::gaussian(mu, mu / 2.0, 1e-3).sample(rng);
}

Task gen_task(int owner, std::uint64_t id, double now, const SimConfig& config,
              SplitMix64& rng) {
  Task t;
  t.id = id;
  t.owner = owner;
  t.arrival_time = now;
  t.size = DistributionSpec::gaussian(config.size_mu, config.size_sigma, 0.01).sample(rng);
  t.deadline =
      now + DistributionSpec::gaussian(config.deadline_mu, config.deadline_sigma, 0.01).sample(rng);
  t.value = DistributionSpec::uniform(config.value_lo, config.value_hi).sample(rng);
  return t;
}

std::vector<std::vector<Task>> generate_workload(const SimConfig& config) {
  std::vector<std::vector<Task>> arrivals(static_cast<std::size_t>(config.n_users));
  for (int u = 0; u < config.n_users; ++u) {
    SplitMix64 rng(user_stream_seed(config.seed, u));
    double t = 0.0;
    std::uint64_t k = 0;
    while (true) {
      t += sample_interarrival(config.interarrival_mu, rng);
      if (t >= config.horizon) break;
      const std::uint64_t id = (static_cast<std::uint64_t>(u) << 32) | k;
      arrivals[static_cast<std::size_t>(u)].push_back(gen_task(u, id, t, config, rng));
      ++k;
    }
  }
  return arrivals;
}

}  // namespace marketsim
