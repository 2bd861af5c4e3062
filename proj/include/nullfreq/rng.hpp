#pragma once

#include <cstdint>
#include <random>

namespace nullfreq {

/// Counter-based seed derivation: replications get disjoint, order-independent
/// streams from (master, grid index, replication index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t grid_index,
                          std::uint64_t rep_index);

/// mt19937_64 stream with explicit transform sampling (Box-Muller normals,
/// inverse-CDF Laplace) so sequences do not depend on the standard library's
/// distribution implementations.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  double uniform();  // (0, 1)
  double uniform(double lo, double hi);
  double normal();
  double laplace(double mu, double tau);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace nullfreq
