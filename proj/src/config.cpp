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

#include "fedban/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <utility>

#include "fedban/error.hpp"
#include "json.hpp"

namespace fedban {
namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

[[noreturn]] void Bad(const std::string& key, const std::string& why) {
  Fail(ErrorCode::kConfigInvalid, key + ": " + why);
}

// Reads the members of one JSON object and rejects whatever is left over.
class ObjectReader {
 public:
  ObjectReader(const Json& object, std::string path)
      : object_(object), path_(std::move(path)) {
    if (!object_.is_object()) Bad(Where(""), "expected an object");
  }

  bool Has(const char* key) const { return object_.contains(key); }

  const Json* Take(const char* key) {
    seen_.insert(key);
    auto it = object_.find(key);
    return it == object_.end() ? nullptr : &*it;
  }

  void Number(const char* key, double& out) {
    if (const Json* v = Take(key)) {
      if (!v->is_number()) Bad(Where(key), "expected a number");
      out = v->get<double>();
    }
  }

  void Count(const char* key, std::size_t& out) {
    if (const Json* v = Take(key)) out = AsCount(*v, Where(key));
  }

  void Seed(const char* key, std::uint64_t& out) {
    if (const Json* v = Take(key)) out = AsSeed(*v, Where(key));
  }

  void Bool(const char* key, bool& out) {
    if (const Json* v = Take(key)) {
      if (!v->is_boolean()) Bad(Where(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void Finish() const {
    for (auto it = object_.begin(); it != object_.end(); ++it) {
      if (!seen_.count(it.key())) Bad(Where(it.key()), "unknown key");
    }
  }

  std::string Where(const std::string& key) const {
    if (key.empty()) return path_.empty() ? "config" : path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  static std::size_t AsCount(const Json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      Bad(where, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  static std::uint64_t AsSeed(const Json& v, const std::string& where) {
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
      Bad(where, "expected an unsigned 64-bit integer");
    }
    return v.get<std::uint64_t>();
  }

 private:
  const Json& object_;
  std::string path_;
  std::set<std::string> seen_;
};

MechanismKind AsMechanism(const Json& v, const std::string& where) {
  if (!v.is_string()) Bad(where, "expected a mechanism name");
  try {
    return ParseMechanism(v.get<std::string>());
  } catch (const Error&) {
    Bad(where, "unknown mechanism \"" + v.get<std::string>() + "\"");
  }
}

std::vector<MechanismKind> AsMechanismList(const Json& v,
                                           const std::string& where) {
  if (!v.is_array() || v.empty()) Bad(where, "expected a non-empty array");
  std::vector<MechanismKind> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    out.push_back(AsMechanism(v[k], where + "[" + std::to_string(k) + "]"));
  }
  return out;
}

std::vector<double> AsNumberList(const Json& v, const std::string& where) {
  if (!v.is_array()) Bad(where, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (!v[k].is_number()) {
      Bad(where + "[" + std::to_string(k) + "]", "expected a number");
    }
    out.push_back(v[k].get<double>());
  }
  return out;
}

StrategyEntry AsStrategy(const Json& v, const std::string& where) {
  ObjectReader r(v, where);
  StrategyEntry e;
  const Json* client = r.Take("client");
  if (!client) Bad(r.Where("client"), "required");
  e.client = ObjectReader::AsCount(*client, r.Where("client"));
  std::string kind = "multiplicative";
  if (const Json* k = r.Take("kind")) {
    if (!k->is_string()) Bad(r.Where("kind"), "expected a string");
    kind = k->get<std::string>();
  }
  std::size_t from = 0;
  r.Count("from_step", from);
  if (kind == "truthful") {
    e.strategy = ReportingStrategy::Truthful();
  } else if (kind == "multiplicative") {
    double factor = 1.0;
    if (!r.Has("factor")) Bad(r.Where("factor"), "required");
    r.Number("factor", factor);
    if (!(factor > 0.0)) Bad(r.Where("factor"), "must be > 0");
    e.strategy = ReportingStrategy::Multiplicative(factor, from);
  } else if (kind == "fixed") {
    double value = 0.0;
    if (!r.Has("value")) Bad(r.Where("value"), "required");
    r.Number("value", value);
    if (!(value > 0.0)) Bad(r.Where("value"), "must be > 0");
    e.strategy = ReportingStrategy::Fixed(value, from);
  } else {
    Bad(r.Where("kind"), "expected truthful, multiplicative or fixed");
  }
  r.Finish();
  return e;
}

std::string ArrivalName(Arrival a) {
  return a == Arrival::kUniform ? "uniform" : "round_robin";
}

}  // namespace

void ExperimentConfig::Validate() const {
  SimulationConfig probe = sim;
  probe.strategies.clear();
  probe.Validate();
  if (seeds.empty()) Bad("seeds", "needs at least one seed");
  if (mechanisms.empty()) Bad("mechanisms", "needs at least one mechanism");
  std::set<ClientId> clients;
  for (std::size_t k = 0; k < strategies.size(); ++k) {
    const std::string where = "strategies[" + std::to_string(k) + "].client";
    if (strategies[k].client >= sim.num_clients) {
      Bad(where, "must be < N");
    }
    if (!clients.insert(strategies[k].client).second) {
      Bad(where, "client listed twice");
    }
  }
  if (micro.client >= sim.num_clients) Bad("micro.client", "must be < N");
  for (double f : micro.factors) {
    if (!(f > 0.0)) Bad("micro.factors", "factors must be > 0");
  }
  if (micro.mechanisms.empty()) Bad("micro.mechanisms", "must not be empty");
  for (double r : macro.ratios) {
    if (!(r >= 0.0 && r <= 1.0)) Bad("macro.ratios", "ratios must lie in [0, 1]");
  }
  if (!(macro.under_factor > 0.0 && macro.under_factor < 1.0)) {
    Bad("macro.under_factor", "must lie in (0, 1)");
  }
  if (!(macro.over_factor > 1.0)) Bad("macro.over_factor", "must be > 1");
  if (oracle.max_clients < 1 || oracle.max_clients > kMaxEnumerationClients) {
    Bad("oracle.max_clients",
        "must lie in [1, " + std::to_string(kMaxEnumerationClients) + "]");
  }
  if (oracle.max_dim < 1) Bad("oracle.max_dim", "must be >= 1");
  if (!(oracle.gamma > 0.0)) Bad("oracle.gamma", "must be > 0");
  if (!(oracle.epsilon > 0.0)) Bad("oracle.epsilon", "must be > 0");
}

SimulationConfig ExperimentConfig::ForRun(MechanismKind mechanism,
                                          std::uint64_t seed) const {
  SimulationConfig c = sim;
  c.mechanism.kind = mechanism;
  c.seed = seed;
  c.strategies.clear();
  if (!strategies.empty()) {
    c.strategies.assign(c.num_clients, ReportingStrategy::Truthful());
    for (const StrategyEntry& e : strategies) c.strategies[e.client] = e.strategy;
  }
  return c;
}

ExperimentConfig ParseConfig(std::string_view json_text) {
  Json doc;
  try {
    doc = Json::parse(json_text.begin(), json_text.end());
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorCode::kConfigInvalid, std::string("config: malformed JSON (") +
                                        e.what() + ")");
  }
  ExperimentConfig c;
  SimulationConfig& s = c.sim;
  ObjectReader r(doc, "");
  r.Count("T", s.horizon);
  r.Count("N", s.num_clients);
  r.Count("d", s.dim);
  r.Count("K", s.arms_per_step);
  r.Number("sigma", s.noise_sigma);
  r.Number("lambda", s.ridge);
  r.Number("delta", s.delta);
  r.Number("L", s.arm_norm_bound);
  r.Number("beta", s.mechanism.beta);
  r.Number("epsilon", s.mechanism.epsilon);
  r.Number("gamma", s.gamma);
  r.Number("w", s.cost_weight);
  r.Number("C_min", s.intrinsic_cost_min);
  r.Number("C_max", s.intrinsic_cost_max);
  r.Number("essential_surrogate", s.essential_surrogate);
  if (const Json* dc = r.Take("D_c")) {
    if (dc->is_number()) {
      s.comm_threshold = dc->get<double>();
    } else if (dc->is_string() && dc->get<std::string>() == "auto") {
      s.comm_threshold.reset();
    } else if (dc->is_string() && dc->get<std::string>() == "inf") {
      s.comm_threshold = std::numeric_limits<double>::infinity();
    } else {
      Bad("D_c", "expected a number, \"auto\" or \"inf\"");
    }
  }
  if (const Json* a = r.Take("arrival")) {
    if (*a == "round_robin") {
      s.arrival = Arrival::kRoundRobin;
    } else if (*a == "uniform") {
      s.arrival = Arrival::kUniform;
    } else {
      Bad("arrival", "expected \"round_robin\" or \"uniform\"");
    }
  }
  if (const Json* m = r.Take("mechanism")) {
    s.mechanism.kind = AsMechanism(*m, "mechanism");
  }
  if (const Json* m = r.Take("mechanisms")) {
    c.mechanisms = AsMechanismList(*m, "mechanisms");
  }
  if (const Json* seeds = r.Take("seeds")) {
    if (!seeds->is_array()) Bad("seeds", "expected an array of integers");
    c.seeds.clear();
    for (std::size_t k = 0; k < seeds->size(); ++k) {
      c.seeds.push_back(ObjectReader::AsSeed(
          (*seeds)[k], "seeds[" + std::to_string(k) + "]"));
    }
  }
  if (const Json* list = r.Take("strategies")) {
    if (!list->is_array()) Bad("strategies", "expected an array");
    for (std::size_t k = 0; k < list->size(); ++k) {
      c.strategies.push_back(
          AsStrategy((*list)[k], "strategies[" + std::to_string(k) + "]"));
    }
  }
  if (const Json* m = r.Take("micro")) {
    ObjectReader mr(*m, "micro");
    mr.Count("client", c.micro.client);
    if (const Json* f = mr.Take("factors")) {
      c.micro.factors = AsNumberList(*f, "micro.factors");
    }
    if (const Json* k = mr.Take("mechanisms")) {
      c.micro.mechanisms = AsMechanismList(*k, "micro.mechanisms");
    }
    mr.Finish();
  }
  if (const Json* m = r.Take("macro")) {
    ObjectReader mr(*m, "macro");
    if (const Json* f = mr.Take("ratios")) {
      c.macro.ratios = AsNumberList(*f, "macro.ratios");
    }
    if (const Json* dirs = mr.Take("directions")) {
      if (!dirs->is_array()) Bad("macro.directions", "expected an array");
      c.macro.directions.clear();
      for (std::size_t k = 0; k < dirs->size(); ++k) {
        const std::string where = "macro.directions[" + std::to_string(k) + "]";
        if (!(*dirs)[k].is_string()) Bad(where, "expected \"under\" or \"over\"");
        try {
          c.macro.directions.push_back(
              ParseDirection((*dirs)[k].get<std::string>()));
        } catch (const Error&) {
          Bad(where, "expected \"under\" or \"over\"");
        }
      }
    }
    mr.Number("under_factor", c.macro.under_factor);
    mr.Number("over_factor", c.macro.over_factor);
    mr.Finish();
  }
  if (const Json* m = r.Take("oracle")) {
    ObjectReader orr(*m, "oracle");
    orr.Count("trials", c.oracle.trials);
    orr.Count("max_clients", c.oracle.max_clients);
    orr.Count("max_dim", c.oracle.max_dim);
    orr.Number("gamma", c.oracle.gamma);
    orr.Number("epsilon", c.oracle.epsilon);
    orr.Seed("seed", c.oracle.seed);
    orr.Finish();
  }
  r.Count("workers", c.workers);
  r.Bool("round_log", c.round_log);
  r.Finish();
  c.Validate();
  return c;
}

ExperimentConfig LoadConfigFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return ParseConfig(text.str());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kConfigInvalid) throw;
    Fail(ErrorCode::kConfigInvalid, path + ": " + e.what());
  }
}

std::string ConfigToJson(const ExperimentConfig& c) {
  const SimulationConfig& s = c.sim;
  OrderedJson j;
  j["T"] = s.horizon;
  j["N"] = s.num_clients;
  j["d"] = s.dim;
  j["K"] = s.arms_per_step;
  j["sigma"] = s.noise_sigma;
  j["lambda"] = s.ridge;
  j["delta"] = s.delta;
  j["L"] = s.arm_norm_bound;
  j["beta"] = s.mechanism.beta;
  j["epsilon"] = s.mechanism.epsilon;
  j["gamma"] = s.gamma;
  j["w"] = s.cost_weight;
  j["C_min"] = s.intrinsic_cost_min;
  j["C_max"] = s.intrinsic_cost_max;
  j["essential_surrogate"] = s.essential_surrogate;
  if (!s.comm_threshold) {
    j["D_c"] = "auto";
  } else if (std::isinf(*s.comm_threshold)) {
    j["D_c"] = "inf";
  } else {
    j["D_c"] = *s.comm_threshold;
  }
  j["arrival"] = ArrivalName(s.arrival);
  j["mechanism"] = MechanismName(s.mechanism.kind);
  auto names = [](const std::vector<MechanismKind>& kinds) {
    OrderedJson out = OrderedJson::array();
    for (MechanismKind k : kinds) out.push_back(MechanismName(k));
    return out;
  };
  j["mechanisms"] = names(c.mechanisms);
  j["seeds"] = c.seeds;
  OrderedJson strategies = OrderedJson::array();
  for (const StrategyEntry& e : c.strategies) {
    OrderedJson o;
    o["client"] = e.client;
    switch (e.strategy.kind) {
      case StrategyKind::kTruthful:
        o["kind"] = "truthful";
        break;
      case StrategyKind::kMultiplicative:
        o["kind"] = "multiplicative";
        o["factor"] = e.strategy.factor;
        break;
      case StrategyKind::kFixed:
        o["kind"] = "fixed";
        o["value"] = e.strategy.fixed_value;
        break;
    }
    o["from_step"] = e.strategy.applies_from_step;
    strategies.push_back(std::move(o));
  }
  j["strategies"] = std::move(strategies);
  j["micro"] = {{"client", c.micro.client},
                {"factors", c.micro.factors},
                {"mechanisms", names(c.micro.mechanisms)}};
  OrderedJson dirs = OrderedJson::array();
  for (MisreportDirection d : c.macro.directions) dirs.push_back(DirectionName(d));
  j["macro"] = {{"ratios", c.macro.ratios},
                {"directions", std::move(dirs)},
                {"under_factor", c.macro.under_factor},
                {"over_factor", c.macro.over_factor}};
  j["oracle"] = {{"trials", c.oracle.trials},
                 {"max_clients", c.oracle.max_clients},
                 {"max_dim", c.oracle.max_dim},
                 {"gamma", c.oracle.gamma},
                 {"epsilon", c.oracle.epsilon},
                 {"seed", c.oracle.seed}};
  j["workers"] = c.workers;
  j["round_log"] = c.round_log;
  return j.dump(2) + "\n";
}

}  // namespace fedban
