#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "nullfreq/simulate.hpp"

namespace nullfreq {

/// Deterministic numeric formatting shared by every CSV/JSON emitter.
std::string format_double(double v);

/// One numeric column of z-scores, optional header "z".  Throws
/// Error(parse_error) with the offending line number.
std::vector<double> read_zscore_csv(std::istream& in);
std::vector<double> read_zscore_file(const std::string& path);

std::uint64_t fnv1a_hash(const std::string& text);
std::string hash_hex(std::uint64_t h);

void write_mse_csv(const MSEReport& report, std::ostream& out,
                   const std::vector<double>* paper_values = nullptr,
                   const std::string& paper_estimator = "");
void write_fdr_csv(const FDRReport& report, std::ostream& out);

/// JSON provenance blob (config hash, seed, version) serialized to text.
std::string provenance_json(const SettingConfig& config, const std::string& command);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace nullfreq
