#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace cscp {

/// Seeded random stream. Streams derived from the same master seed with
/// different ids are statistically independent, so the ground-truth
/// realization is insensitive to how many draws other streams consume.
class RngStream {
 public:
  RngStream() : RngStream(0, 0) {}
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : gen_(mix(master_seed, stream_id)) {}

  double normal() { return normal_(gen_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(gen_);
  }
  int uniform_int(int lo, int hi) {  // inclusive bounds
    return std::uniform_int_distribution<int>(lo, hi)(gen_);
  }

  Eigen::VectorXd normal_vector(Eigen::Index n) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
    return v;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  // splitmix64 finalizer over (seed, id) so nearby seeds diverge.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (id + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// The three streams consumed by one CSCP run: process noise of the true
/// field, measurement noise, and miscellaneous method-internal randomness.
/// Keeping them separate means changing the placement method cannot perturb
/// the world realization under a fixed master seed.
struct RngBundle {
  RngStream truth;
  RngStream measurement;
  RngStream misc;

  explicit RngBundle(std::uint64_t master_seed)
      : truth(master_seed, 0), measurement(master_seed, 1), misc(master_seed, 2) {}
};

}  // namespace cscp
