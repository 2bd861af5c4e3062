#include <doctest.h>

#include <sstream>

#include "nullfreq/io.hpp"

using namespace nullfreq;

TEST_CASE("z-score csv parsing") {
  std::istringstream ok("z\n1.5\n-2.25\n0.0\n");
  const auto v = read_zscore_csv(ok);
  REQUIRE(v.size() == 3);
  CHECK(v[0] == 1.5);
  CHECK(v[1] == -2.25);

  std::istringstream no_header("0.5\n0.25\n");
  CHECK(read_zscore_csv(no_header).size() == 2);

  std::istringstream crlf("z\r\n1.0\r\n");
  CHECK(read_zscore_csv(crlf).size() == 1);

  std::istringstream empty("");
  CHECK_THROWS_AS(read_zscore_csv(empty), Error);

  std::istringstream bad("z\n1.0\npotato\n");
  try {
    read_zscore_csv(bad);
    FAIL("expected parse error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::parse_error);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("hashing is stable") {
  CHECK(fnv1a_hash("abc") == fnv1a_hash("abc"));
  CHECK(fnv1a_hash("abc") != fnv1a_hash("abd"));
  CHECK(hash_hex(fnv1a_hash("")) == "cbf29ce484222325");
}

TEST_CASE("csv writers emit one row per grid point and estimator") {
  MSEReport rep;
  rep.config = default_setting_config("3a");
  rep.config.sweep = {0.1, 0.2};
  MseRow row0;
  row0.grid_value = 0.1;
  row0.stats.push_back({"eps_cj", 1e-4, 2e-6, 0.1, 0, 100});
  row0.stats.push_back({"eps_storey", 3e-4, 4e-6, 0.09, 2, 98});
  rep.rows.push_back(row0);
  std::ostringstream out;
  write_mse_csv(rep, out);
  const std::string text = out.str();
  CHECK(text.find("eps,estimator,mse,se,failures\n") == 0);
  CHECK(text.find("0.1,eps_cj,0.0001,2e-06,0") != std::string::npos);
  CHECK(text.find("0.1,eps_storey,0.0003,4e-06,2") != std::string::npos);
}

TEST_CASE("provenance json carries a config hash") {
  const auto cfg = default_setting_config("1");
  const auto j1 = provenance_json(cfg, "simulate");
  const auto j2 = provenance_json(cfg, "simulate");
  CHECK(j1 == j2);
  CHECK(j1.find("config_hash") != std::string::npos);
  auto cfg2 = cfg;
  cfg2.seed += 1;
  CHECK(provenance_json(cfg2, "simulate") != j1);
}
