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

#include "fedban/fedban.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <utility>

#include "fedban/config.hpp"
#include "fedban/error.hpp"
#include "fedban/experiments.hpp"
#include "fedban/oracle_suite.hpp"
#include "fedban/payments.hpp"
#include "fedban/protocol.hpp"
#include "fedban/report.hpp"
#include "json.hpp"

struct fedban_config {
  fedban::ExperimentConfig value;
};

struct fedban_result {
  fedban::SimulationResult value;
};

namespace {

thread_local std::string g_last_error;

fedban_status StatusOf(fedban::ErrorCode code) {
  using fedban::ErrorCode;
  switch (code) {
    case ErrorCode::kDimensionMismatch: return FEDBAN_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kNotPositiveDefinite: return FEDBAN_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::kArmNotInSet: return FEDBAN_ERR_ARM_NOT_IN_SET;
    case ErrorCode::kEmptyArmSet: return FEDBAN_ERR_EMPTY_ARM_SET;
    case ErrorCode::kUnknownClientId: return FEDBAN_ERR_UNKNOWN_CLIENT_ID;
    case ErrorCode::kAlreadySelected: return FEDBAN_ERR_ALREADY_SELECTED;
    case ErrorCode::kNotSelected: return FEDBAN_ERR_NOT_SELECTED;
    case ErrorCode::kInfeasible: return FEDBAN_ERR_INFEASIBLE;
    case ErrorCode::kTooManyClients: return FEDBAN_ERR_TOO_MANY_CLIENTS;
    case ErrorCode::kNonMonotoneDetected: return FEDBAN_ERR_NON_MONOTONE_DETECTED;
    case ErrorCode::kComplexityBoundExceeded:
      return FEDBAN_ERR_COMPLEXITY_BOUND_EXCEEDED;
    case ErrorCode::kNonPositiveReport: return FEDBAN_ERR_NON_POSITIVE_REPORT;
    case ErrorCode::kConfigInvalid: return FEDBAN_ERR_CONFIG_INVALID;
    case ErrorCode::kIo: return FEDBAN_ERR_IO;
  }
  return FEDBAN_ERR_INTERNAL;
}

fedban_status InvalidArgument(const char* what) {
  g_last_error = std::string("invalid argument: ") + what;
  return FEDBAN_ERR_INVALID_ARGUMENT;
}

template <typename Fn>
fedban_status Guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return FEDBAN_OK;
  } catch (const fedban::Error& e) {
    g_last_error = e.what();
    return StatusOf(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return FEDBAN_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return FEDBAN_ERR_INTERNAL;
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* fedban_version(void) { return FEDBAN_VERSION_STRING; }

const char* fedban_status_name(fedban_status status) {
  switch (status) {
    case FEDBAN_OK: return "ok";
    case FEDBAN_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case FEDBAN_ERR_NOT_POSITIVE_DEFINITE: return "not_positive_definite";
    case FEDBAN_ERR_ARM_NOT_IN_SET: return "arm_not_in_set";
    case FEDBAN_ERR_EMPTY_ARM_SET: return "empty_arm_set";
    case FEDBAN_ERR_UNKNOWN_CLIENT_ID: return "unknown_client_id";
    case FEDBAN_ERR_ALREADY_SELECTED: return "already_selected";
    case FEDBAN_ERR_NOT_SELECTED: return "not_selected";
    case FEDBAN_ERR_INFEASIBLE: return "infeasible";
    case FEDBAN_ERR_TOO_MANY_CLIENTS: return "too_many_clients";
    case FEDBAN_ERR_NON_MONOTONE_DETECTED: return "non_monotone_detected";
    case FEDBAN_ERR_COMPLEXITY_BOUND_EXCEEDED:
      return "complexity_bound_exceeded";
    case FEDBAN_ERR_NON_POSITIVE_REPORT: return "non_positive_report";
    case FEDBAN_ERR_CONFIG_INVALID: return "config_invalid";
    case FEDBAN_ERR_IO: return "io";
    case FEDBAN_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case FEDBAN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* fedban_last_error(void) { return g_last_error.c_str(); }

void fedban_string_free(char* s) { std::free(s); }

fedban_status fedban_config_default(fedban_config** out) {
  if (!out) return InvalidArgument("out is NULL");
  return Guard([&] { *out = new fedban_config{}; });
}

fedban_status fedban_config_from_json(const char* json, fedban_config** out) {
  if (!json || !out) return InvalidArgument("json and out must be non-NULL");
  return Guard([&] {
    *out = new fedban_config{fedban::ParseConfig(json)};
  });
}

fedban_status fedban_config_load(const char* path, fedban_config** out) {
  if (!path || !out) return InvalidArgument("path and out must be non-NULL");
  return Guard([&] {
    *out = new fedban_config{fedban::LoadConfigFile(path)};
  });
}

fedban_status fedban_config_set(fedban_config* config, const char* key,
                                const char* json_value) {
  if (!config || !key || !json_value) {
    return InvalidArgument("config, key and json_value must be non-NULL");
  }
  return Guard([&] {
    nlohmann::ordered_json doc =
        nlohmann::ordered_json::parse(fedban::ConfigToJson(config->value));
    nlohmann::ordered_json value;
    try {
      value = nlohmann::ordered_json::parse(json_value);
    } catch (const nlohmann::json::parse_error&) {
      fedban::Fail(fedban::ErrorCode::kConfigInvalid,
                   std::string(key) + ": value is not valid JSON");
    }
    // Dotted keys address nested sections, e.g. "oracle.trials".
    nlohmann::ordered_json* slot = &doc;
    std::string path(key);
    for (std::size_t dot; (dot = path.find('.')) != std::string::npos;) {
      const std::string head = path.substr(0, dot);
      if (!slot->contains(head) || !(*slot)[head].is_object()) {
        fedban::Fail(fedban::ErrorCode::kConfigInvalid,
                     std::string(key) + ": no such section");
      }
      slot = &(*slot)[head];
      path.erase(0, dot + 1);
    }
    (*slot)[path] = std::move(value);
    config->value = fedban::ParseConfig(doc.dump());
  });
}

fedban_status fedban_config_to_json(const fedban_config* config, char** out) {
  if (!config || !out) return InvalidArgument("config and out must be non-NULL");
  return Guard([&] { *out = CopyString(fedban::ConfigToJson(config->value)); });
}

void fedban_config_free(fedban_config* config) { delete config; }

fedban_status fedban_run(const fedban_config* config, const char* out_dir) {
  if (!config || !out_dir) return InvalidArgument("config and out_dir must be non-NULL");
  return Guard([&] {
    fedban::WriteRunOutputs(out_dir, config->value,
                            {fedban::RunSingle(config->value)});
  });
}

fedban_status fedban_compare(const fedban_config* config, const char* out_dir) {
  if (!config || !out_dir) return InvalidArgument("config and out_dir must be non-NULL");
  return Guard([&] {
    fedban::WriteRunOutputs(out_dir, config->value,
                            fedban::RunComparison(config->value));
  });
}

fedban_status fedban_micro(const fedban_config* config, const char* out_dir) {
  if (!config || !out_dir) return InvalidArgument("config and out_dir must be non-NULL");
  return Guard([&] {
    fedban::WriteMicroOutputs(out_dir, config->value,
                              fedban::RunMicroStudy(config->value));
  });
}

fedban_status fedban_macro(const fedban_config* config, const char* out_dir) {
  if (!config || !out_dir) return InvalidArgument("config and out_dir must be non-NULL");
  return Guard([&] {
    fedban::WriteMacroOutputs(out_dir, config->value,
                              fedban::RunMacroStudy(config->value));
  });
}

fedban_status fedban_oracle(const fedban_config* config, const char* out_dir,
                            int* passed, char** report_json) {
  if (!config || !passed) return InvalidArgument("config and passed must be non-NULL");
  return Guard([&] {
    const fedban::OracleReport report =
        fedban::RunOracleSuite(config->value.oracle);
    const std::string json = report.ToJson();
    if (out_dir) {
      const std::filesystem::path dir(out_dir);
      fedban::WriteTextFile(dir / "config.json",
                            fedban::ConfigToJson(config->value));
      fedban::WriteTextFile(dir / "oracle_report.json", json);
    }
    if (report_json) *report_json = CopyString(json);
    *passed = report.ok() ? 1 : 0;
  });
}

fedban_status fedban_simulate(const fedban_config* config, uint64_t seed,
                              fedban_result** out) {
  if (!config || !out) return InvalidArgument("config and out must be non-NULL");
  return Guard([&] {
    fedban::SimulationConfig sim =
        config->value.ForRun(config->value.sim.mechanism.kind, seed);
    sim.keep_round_log = true;
    *out = new fedban_result{fedban::RunSimulation(sim)};
  });
}

size_t fedban_result_steps(const fedban_result* result) {
  return result ? result->value.metrics.regret.size() : 0;
}

size_t fedban_result_rounds(const fedban_result* result) {
  return result ? result->value.metrics.rounds : 0;
}

size_t fedban_result_clients(const fedban_result* result) {
  return result ? result->value.metrics.client_utility.size() : 0;
}

fedban_status fedban_result_series(const fedban_result* result,
                                   const char* metric, const double** data,
                                   size_t* length) {
  if (!result || !metric || !data || !length) {
    return InvalidArgument("result, metric, data and length must be non-NULL");
  }
  for (std::size_t k = 0; k < fedban::kNumMetrics; ++k) {
    if (fedban::kMetricNames[k] == metric) {
      const auto& s = fedban::MetricSeries(result->value.metrics, k);
      *data = s.data();
      *length = s.size();
      g_last_error.clear();
      return FEDBAN_OK;
    }
  }
  return InvalidArgument("unknown metric");
}

fedban_status fedban_result_client_utility(const fedban_result* result,
                                           size_t client, double* out) {
  if (!result || !out) return InvalidArgument("result and out must be non-NULL");
  const auto& u = result->value.metrics.client_utility;
  if (client >= u.size()) {
    g_last_error = "client " + std::to_string(client) + " out of range";
    return FEDBAN_ERR_UNKNOWN_CLIENT_ID;
  }
  *out = u[client];
  g_last_error.clear();
  return FEDBAN_OK;
}

fedban_status fedban_result_round_log(const fedban_result* result, char** out) {
  if (!result || !out) return InvalidArgument("result and out must be non-NULL");
  return Guard([&] {
    std::string text;
    for (const fedban::RoundRecord& r : result->value.rounds) {
      text += fedban::RoundRecordToJson(r);
      text += '\n';
    }
    *out = CopyString(text);
  });
}

void fedban_result_free(fedban_result* result) { delete result; }

fedban_status fedban_default_dc(size_t horizon, size_t num_clients, size_t dim,
                                double ridge, double beta, double* out) {
  if (!out) return InvalidArgument("out is NULL");
  return Guard([&] {
    if (num_clients < 1 || dim < 1 || !(ridge > 0.0) || !(beta > 0.0 && beta <= 1.0)) {
      fedban::Fail(fedban::ErrorCode::kConfigInvalid,
                   "need N >= 1, d >= 1, lambda > 0, beta in (0, 1]");
    }
    *out = fedban::DefaultCommThreshold(horizon, num_clients, dim, ridge, beta);
  });
}

fedban_status fedban_beta_bound(double t, double arm_norm_bound, double ridge,
                                size_t dim, double* out) {
  if (!out) return InvalidArgument("out is NULL");
  return Guard([&] {
    if (!(t >= 0.0) || !(arm_norm_bound > 0.0) || !(ridge > 0.0) || dim < 1) {
      fedban::Fail(fedban::ErrorCode::kConfigInvalid,
                   "need t >= 0, L > 0, lambda > 0, d >= 1");
    }
    *out = fedban::MonopolyFreeBetaBound(t, arm_norm_bound, ridge, dim);
  });
}

}  // extern "C"
