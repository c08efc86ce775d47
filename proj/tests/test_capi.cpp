// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>

#include "fedban/fedban.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  fedban_config* p = nullptr;
  ~Config() { fedban_config_free(p); }
};

struct Result {
  fedban_result* p = nullptr;
  ~Result() { fedban_result_free(p); }
};

std::string Take(char* s) {
  std::string out = s ? s : "";
  fedban_string_free(s);
  return out;
}

constexpr const char* kSmall =
    R"({"T": 400, "N": 5, "d": 2, "seeds": [0, 1], "workers": 1,
        "mechanisms": ["truth_fedban", "select_all"],
        "micro": {"factors": [2]}, "macro": {"ratios": [0, 1]},
        "oracle": {"trials": 10, "max_clients": 5}})";

}  // namespace

TEST_CASE("version and status names") {
  CHECK(std::strlen(fedban_version()) > 0);
  CHECK(std::string(fedban_status_name(FEDBAN_OK)) == "ok");
  CHECK(std::string(fedban_status_name(FEDBAN_ERR_CONFIG_INVALID)) == "config_invalid");
  CHECK(std::string(fedban_status_name(static_cast<fedban_status>(999))) == "unknown");
}

TEST_CASE("config lifecycle") {
  Config c;
  REQUIRE(fedban_config_default(&c.p) == FEDBAN_OK);
  char* json = nullptr;
  REQUIRE(fedban_config_to_json(c.p, &json) == FEDBAN_OK);
  const std::string text = Take(json);
  CHECK(text.find("\"T\": 6250") != std::string::npos);

  CHECK(fedban_config_set(c.p, "T", "1000") == FEDBAN_OK);
  CHECK(fedban_config_set(c.p, "oracle.trials", "7") == FEDBAN_OK);
  REQUIRE(fedban_config_to_json(c.p, &json) == FEDBAN_OK);
  const std::string changed = Take(json);
  CHECK(changed.find("\"T\": 1000") != std::string::npos);
  CHECK(changed.find("\"trials\": 7") != std::string::npos);

  // A rejected update leaves the handle unchanged.
  CHECK(fedban_config_set(c.p, "beta", "3") == FEDBAN_ERR_CONFIG_INVALID);
  CHECK(std::string(fedban_last_error()).find("beta") != std::string::npos);
  CHECK(fedban_config_set(c.p, "nonsense", "1") == FEDBAN_ERR_CONFIG_INVALID);
  CHECK(fedban_config_set(c.p, "T", "not json") == FEDBAN_ERR_CONFIG_INVALID);
  REQUIRE(fedban_config_to_json(c.p, &json) == FEDBAN_OK);
  CHECK(Take(json) == changed);

  CHECK(fedban_config_set(nullptr, "T", "1") == FEDBAN_ERR_INVALID_ARGUMENT);
  CHECK(fedban_config_to_json(c.p, nullptr) == FEDBAN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("config errors") {
  Config c;
  CHECK(fedban_config_from_json(R"({"N": 0})", &c.p) == FEDBAN_ERR_CONFIG_INVALID);
  CHECK(c.p == nullptr);
  CHECK(std::string(fedban_last_error()).find("N") != std::string::npos);
  CHECK(fedban_config_load("/nonexistent/fedban.json", &c.p) == FEDBAN_ERR_IO);
  CHECK(std::string(fedban_last_error()).find("/nonexistent/fedban.json") !=
        std::string::npos);
  CHECK(fedban_config_from_json(nullptr, &c.p) == FEDBAN_ERR_INVALID_ARGUMENT);
}

TEST_CASE("simulate and inspect a result") {
  Config c;
  REQUIRE(fedban_config_from_json(kSmall, &c.p) == FEDBAN_OK);
  Result r;
  REQUIRE(fedban_simulate(c.p, 3, &r.p) == FEDBAN_OK);
  CHECK(fedban_result_steps(r.p) == 400);
  CHECK(fedban_result_clients(r.p) == 5);
  const std::size_t rounds = fedban_result_rounds(r.p);
  CHECK(rounds > 0);

  const double* data = nullptr;
  std::size_t len = 0;
  REQUIRE(fedban_result_series(r.p, "communication", &data, &len) == FEDBAN_OK);
  CHECK(len == 400);
  CHECK(data[len - 1] > 0.0);
  CHECK(fedban_result_series(r.p, "latency", &data, &len) == FEDBAN_ERR_INVALID_ARGUMENT);

  double u = NAN;
  CHECK(fedban_result_client_utility(r.p, 0, &u) == FEDBAN_OK);
  CHECK(std::isfinite(u));
  CHECK(fedban_result_client_utility(r.p, 5, &u) == FEDBAN_ERR_UNKNOWN_CLIENT_ID);

  char* log = nullptr;
  REQUIRE(fedban_result_round_log(r.p, &log) == FEDBAN_OK);
  const std::string lines = Take(log);
  std::size_t n = 0;
  for (char ch : lines) n += ch == '\n';
  CHECK(n == rounds);
}

TEST_CASE("experiments write their trees") {
  Config c;
  REQUIRE(fedban_config_from_json(kSmall, &c.p) == FEDBAN_OK);
  const fs::path root = fs::temp_directory_path() / "fedban_test_capi";
  fs::remove_all(root);
  CHECK(fedban_run(c.p, (root / "run").c_str()) == FEDBAN_OK);
  CHECK(fs::exists(root / "run" / "aggregate.csv"));
  CHECK(fedban_compare(c.p, (root / "compare").c_str()) == FEDBAN_OK);
  CHECK(fs::exists(root / "compare" / "runs" / "select_all_seed1.csv"));
  CHECK(fedban_micro(c.p, (root / "micro").c_str()) == FEDBAN_OK);
  CHECK(fs::exists(root / "micro" / "micro.csv"));
  CHECK(fedban_macro(c.p, (root / "macro").c_str()) == FEDBAN_OK);
  CHECK(fs::exists(root / "macro" / "macro_summary.csv"));

  int passed = 0;
  char* report = nullptr;
  REQUIRE(fedban_oracle(c.p, (root / "oracle").c_str(), &passed, &report) == FEDBAN_OK);
  const std::string json = Take(report);
  CHECK(json.find("\"submodularity\"") != std::string::npos);
  CHECK(fs::exists(root / "oracle" / "oracle_report.json"));
  CHECK(fedban_oracle(c.p, nullptr, &passed, nullptr) == FEDBAN_OK);
  CHECK(fedban_run(c.p, nullptr) == FEDBAN_ERR_INVALID_ARGUMENT);
  fs::remove_all(root);
}

TEST_CASE("closed forms") {
  double dc = 0.0;
  REQUIRE(fedban_default_dc(6250, 25, 5, 1.0, 0.5, &dc) == FEDBAN_OK);
  CHECK(dc == doctest::Approx(2.99045).epsilon(1e-5));
  CHECK(fedban_default_dc(2, 25, 5, 1.0, 0.5, &dc) == FEDBAN_ERR_CONFIG_INVALID);
  double bound = 0.0;
  REQUIRE(fedban_beta_bound(5, 1, 1, 5, &bound) == FEDBAN_OK);
  CHECK(bound == doctest::Approx(1.0 / 32.0));
  CHECK(fedban_beta_bound(5, 1, 1, 5, nullptr) == FEDBAN_ERR_INVALID_ARGUMENT);
}
