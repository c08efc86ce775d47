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

// fedban: command-line front end over the C API.
//
// Exit status: 0 success, 1 configuration or I/O error, 2 property-suite
// failure (oracle only).

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>

#include "CLI11.hpp"
#include "fedban/fedban.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPropertyFailure = 2;
constexpr const char* kOutDirEnv = "FEDBAN_OUT_DIR";

struct Options {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> horizon;
  std::optional<std::size_t> clients;
  std::optional<std::string> mechanism;
  std::optional<std::size_t> workers;
  std::optional<std::size_t> trials;
  std::optional<std::size_t> max_clients;
  bool force = false;
  int verbose = 0;
};

struct DcOptions {
  std::size_t horizon = 6250, clients = 25, dim = 5;
  double ridge = 1.0, beta = 0.5;
};

struct BetaOptions {
  double t = 6250, arm_norm = 1.0, ridge = 1.0;
  std::size_t dim = 5;
};

class CliError {
 public:
  CliError(int code, std::string message)
      : code_(code), message_(std::move(message)) {}
  int code() const { return code_; }
  const std::string& message() const { return message_; }

 private:
  int code_;
  std::string message_;
};

void Check(fedban_status status) {
  if (status != FEDBAN_OK) {
    throw CliError(kExitConfig, std::string(fedban_status_name(status)) +
                                    ": " + fedban_last_error());
  }
}

std::string Number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void Set(fedban_config* c, const char* key, const std::string& json) {
  Check(fedban_config_set(c, key, json.c_str()));
}

fedban_config* LoadConfig(const Options& o) {
  fedban_config* c = nullptr;
  if (o.config_path.empty()) {
    Check(fedban_config_default(&c));
  } else {
    if (!std::filesystem::exists(o.config_path)) {
      throw CliError(kExitConfig, "config file not found: " + o.config_path);
    }
    Check(fedban_config_load(o.config_path.c_str(), &c));
  }
  try {
    // Flags take precedence over the file.
    if (o.seed) Set(c, "seeds", "[" + std::to_string(*o.seed) + "]");
    if (o.horizon) Set(c, "T", std::to_string(*o.horizon));
    if (o.clients) Set(c, "N", std::to_string(*o.clients));
    if (o.mechanism) {
      Set(c, "mechanism", "\"" + *o.mechanism + "\"");
    }
    if (o.workers) Set(c, "workers", std::to_string(*o.workers));
    if (o.trials) Set(c, "oracle.trials", std::to_string(*o.trials));
    if (o.max_clients) {
      Set(c, "oracle.max_clients", std::to_string(*o.max_clients));
    }
  } catch (...) {
    fedban_config_free(c);
    throw;
  }
  return c;
}

std::string ResolveOutDir(const Options& o, const std::string& command) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) {
    return (std::filesystem::path(env) / command).string();
  }
  return (std::filesystem::path("fedban_out") / command).string();
}

void PrepareOutDir(const std::string& dir, bool force) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::exists(dir, ec)) {
    if (!fs::is_directory(dir, ec)) {
      throw CliError(kExitConfig, "output path is not a directory: " + dir);
    }
    if (!fs::is_empty(dir, ec)) {
      if (!force) {
        throw CliError(kExitConfig, "output directory " + dir +
                                        " is not empty; pass --force to "
                                        "overwrite");
      }
      fs::remove_all(dir, ec);
      if (ec) throw CliError(kExitConfig, "cannot clear " + dir + ": " + ec.message());
    }
  }
  fs::create_directories(dir, ec);
  if (ec) throw CliError(kExitConfig, "cannot create " + dir + ": " + ec.message());
}

void AddCommonFlags(CLI::App* cmd, Options& o, bool simulation_flags) {
  cmd->add_option("-c,--config", o.config_path, "Experiment config (JSON)");
  cmd->add_option("-o,--out", o.out_dir,
                  std::string("Output directory (default: $") + kOutDirEnv +
                      "/<command> or fedban_out/<command>)");
  cmd->add_flag("-f,--force", o.force, "Replace an existing output directory");
  cmd->add_flag("-v,--verbose", o.verbose, "Print progress to stderr");
  cmd->add_option("--workers", o.workers, "Worker threads (0: all cores)");
  if (simulation_flags) {
    cmd->add_option("--seed", o.seed, "Run this single seed instead of the list");
    cmd->add_option("--T", o.horizon, "Horizon override");
    cmd->add_option("--N", o.clients, "Client count override");
    cmd->add_option("--mechanism", o.mechanism,
                    "truth_fedban, vanilla_greedy, ordered_budget, select_all "
                    "or none");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated linear bandit simulator with truthful incentives"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fedban_version());

  Options o;
  DcOptions dc;
  BetaOptions bb;

  auto* run = app.add_subcommand("run", "Simulate the configured mechanism over all seeds");
  AddCommonFlags(run, o, true);
  auto* compare = app.add_subcommand("compare", "Compare the configured mechanisms");
  AddCommonFlags(compare, o, true);
  auto* micro = app.add_subcommand("micro", "Single misreporting client study");
  AddCommonFlags(micro, o, true);
  auto* macro = app.add_subcommand("macro", "Misreporting population study");
  AddCommonFlags(macro, o, true);
  auto* oracle = app.add_subcommand("oracle", "Property checks on random small instances");
  AddCommonFlags(oracle, o, false);
  oracle->add_option("--trials", o.trials, "Number of random instances");
  oracle->add_option("--max-clients", o.max_clients, "Largest instance size");

  auto* dc_cmd = app.add_subcommand("dc", "Print the default communication threshold");
  dc_cmd->add_option("--T", dc.horizon, "Horizon")->capture_default_str();
  dc_cmd->add_option("--N", dc.clients, "Clients")->capture_default_str();
  dc_cmd->add_option("--d", dc.dim, "Dimension")->capture_default_str();
  dc_cmd->add_option("--lambda", dc.ridge, "Ridge")->capture_default_str();
  dc_cmd->add_option("--beta", dc.beta, "Coverage parameter")->capture_default_str();

  auto* bb_cmd = app.add_subcommand("beta-bound", "Print the monopoly-free beta bound");
  bb_cmd->add_option("--t", bb.t, "Step")->capture_default_str();
  bb_cmd->add_option("--L", bb.arm_norm, "Arm norm bound")->capture_default_str();
  bb_cmd->add_option("--lambda", bb.ridge, "Ridge")->capture_default_str();
  bb_cmd->add_option("--d", bb.dim, "Dimension")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  fedban_config* config = nullptr;
  try {
    if (dc_cmd->parsed()) {
      double value = 0.0;
      Check(fedban_default_dc(dc.horizon, dc.clients, dc.dim, dc.ridge, dc.beta,
                              &value));
      std::cout << Number(value) << "\n";
      return kExitOk;
    }
    if (bb_cmd->parsed()) {
      double value = 0.0;
      Check(fedban_beta_bound(bb.t, bb.arm_norm, bb.ridge, bb.dim, &value));
      std::cout << Number(value) << "\n";
      return kExitOk;
    }

    config = LoadConfig(o);
    CLI::App* cmd = app.get_subcommands().front();
    const std::string dir = ResolveOutDir(o, cmd->get_name());
    PrepareOutDir(dir, o.force);
    if (o.verbose) std::cerr << cmd->get_name() << ": writing " << dir << "\n";

    int status = kExitOk;
    if (cmd == run) {
      Check(fedban_run(config, dir.c_str()));
    } else if (cmd == compare) {
      Check(fedban_compare(config, dir.c_str()));
    } else if (cmd == micro) {
      Check(fedban_micro(config, dir.c_str()));
    } else if (cmd == macro) {
      Check(fedban_macro(config, dir.c_str()));
    } else if (cmd == oracle) {
      int passed = 0;
      char* report = nullptr;
      Check(fedban_oracle(config, dir.c_str(), &passed, &report));
      if (o.verbose) std::cerr << report;
      fedban_string_free(report);
      std::cout << (passed ? "all properties hold" : "property failures; see "
                                                     "oracle_report.json")
                << "\n";
      if (!passed) status = kExitPropertyFailure;
    }
    if (o.verbose) std::cerr << cmd->get_name() << ": done\n";
    fedban_config_free(config);
    return status;
  } catch (const CliError& e) {
    fedban_config_free(config);
    std::cerr << "fedban: " << e.message() << "\n";
    return e.code();
  }
}
