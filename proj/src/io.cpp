#include "nullfreq/io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace nullfreq {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::vector<double> read_zscore_csv(std::istream& in) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed;
    for (char c : line) {
      if (!std::isspace(static_cast<unsigned char>(c)) && c != '"') trimmed += c;
    }
    if (trimmed.empty()) continue;
    if (lineno == 1 && (trimmed == "z" || trimmed == "Z")) continue;
    char* end = nullptr;
    const double v = std::strtod(trimmed.c_str(), &end);
    if (end == trimmed.c_str() || *end != '\0') {
      fail(errc::parse_error, "line " + std::to_string(lineno) + ": not a number: " + trimmed);
    }
    out.push_back(v);
  }
  if (out.empty()) fail(errc::parse_error, "no z-scores found in input");
  return out;
}

std::vector<double> read_zscore_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::parse_error, "cannot open " + path);
  return read_zscore_csv(in);
}

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_mse_csv(const MSEReport& report, std::ostream& out,
                   const std::vector<double>* paper_values,
                   const std::string& paper_estimator) {
  out << report.config.sweep_name << ",estimator,mse,se,failures";
  if (paper_values) out << ",paper_mse";
  out << "\n";
  for (std::size_t gi = 0; gi < report.rows.size(); ++gi) {
    const auto& row = report.rows[gi];
    for (const auto& st : row.stats) {
      out << format_double(row.grid_value) << ',' << st.estimator << ','
          << format_double(st.mse) << ',' << format_double(st.se) << ',' << st.failures;
      if (paper_values) {
        if (st.estimator == paper_estimator && gi < paper_values->size()) {
          out << ',' << format_double((*paper_values)[gi]);
        } else {
          out << ',';
        }
      }
      out << "\n";
    }
  }
}

void write_fdr_csv(const FDRReport& report, std::ostream& out) {
  out << report.config.sweep_name
      << ",estimator,fdr,fdr_se,mse_fdp,mse_fdp_se,mean_rejections,failures\n";
  for (const auto& row : report.rows) {
    for (const auto& st : row.stats) {
      out << format_double(row.grid_value) << ',' << st.estimator << ','
          << format_double(st.fdr) << ',' << format_double(st.fdr_se) << ','
          << format_double(st.mse_fdp) << ',' << format_double(st.mse_fdp_se) << ','
          << format_double(st.mean_rejections) << ',' << st.failures << "\n";
    }
  }
}

std::string provenance_json(const SettingConfig& config, const std::string& command) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["version"] = kVersion;
  nlohmann::ordered_json c;
  c["setting"] = config.id;
  c["n"] = config.n;
  c["replications"] = config.replications;
  c["gamma"] = config.gamma;
  c["sweep_name"] = config.sweep_name;
  c["sweep"] = config.sweep;
  c["seed"] = config.seed;
  j["config"] = c;
  j["config_hash"] = hash_hex(fnv1a_hash(c.dump()));
  return j.dump(2);
}

}  // namespace nullfreq
