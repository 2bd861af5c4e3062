#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace nullfreq {

inline constexpr double kDefaultGamma = 0.2;

enum class errc {
  invalid_input,
  threshold_not_found,
  nonpositive_variance,
  degenerate_modulus,
  unsupported_model,
  numerical_integration,
  divergence,
  level_overflow,
  density_support,
  degenerate_sample,
  construction_failed,
  parse_error,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what),
        code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) {
  throw Error(code, what);
}

/// A vector of test statistics, optionally carrying the ground-truth
/// nonnull indicators (true = nonnull) from a simulation.
struct Sample {
  std::vector<double> values;
  std::optional<std::vector<bool>> truth;

  std::size_t size() const { return values.size(); }
  void validate() const;
};

/// Null mean and standard deviation of the Gaussian empirical null.
struct NullParams {
  double u0 = 0.0;
  double sigma0 = 1.0;

  void validate() const;
};

}  // namespace nullfreq
