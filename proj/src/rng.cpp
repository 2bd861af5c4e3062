#include "nullfreq/rng.hpp"

#include <cmath>

namespace nullfreq {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t grid_index,
                          std::uint64_t rep_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ (0xA24BAED4963EE407ULL * (grid_index + 1)));
  h = splitmix64(h ^ (0x9FB21C651E98DF25ULL * (rep_index + 1)));
  return h;
}

double RngStream::uniform() {
  // (k + 0.5) / 2^53 stays strictly inside (0, 1).
  return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double RngStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

double RngStream::laplace(double mu, double tau) {
  const double u = uniform();
  if (u < 0.5) return mu + tau * std::log(2.0 * u);
  return mu - tau * std::log(2.0 * (1.0 - u));
}

}  // namespace nullfreq
