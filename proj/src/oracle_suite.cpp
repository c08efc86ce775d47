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

#include "fedban/oracle_suite.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fedban/bandit_env.hpp"
#include "fedban/error.hpp"
#include "fedban/payments.hpp"
#include "fedban/rng.hpp"
#include "json.hpp"

namespace fedban {
namespace {

using Json = nlohmann::ordered_json;

constexpr std::size_t kMaxCounterexamples = 3;
constexpr double kMisreportFactors[] = {0.1, 0.5, 2.0, 10.0};

double Uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t UniformInt(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Vector RandomArm(std::mt19937_64& rng, std::size_t dim, double norm) {
  Vector x = SampleUnitSphere(dim, rng);
  x *= norm;
  return x;
}

Json MatrixJson(const SymMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

SymMatrix MatrixFrom(const nlohmann::json& rows) {
  return SymMatrix::FromRows(rows.get<std::vector<std::vector<double>>>());
}

class Recorder {
 public:
  explicit Recorder(std::string name) { r_.name = std::move(name); }

  void Check(bool ok, const CoverageInstance& inst, const Json& detail) {
    ++r_.checked;
    if (ok) {
      ++r_.passed;
      return;
    }
    if (r_.counterexamples.size() >= kMaxCounterexamples) return;
    Json j;
    j["instance"] = Json::parse(InstanceToJson(inst));
    j["detail"] = detail;
    r_.counterexamples.push_back(j.dump());
  }

  PropertyResult Take() { return std::move(r_); }

 private:
  PropertyResult r_;
};

double Utility(const PaymentSchedule& pay, ClientId i, double true_cost) {
  const Payment* p = pay.Find(i);
  return p ? p->amount - true_cost : 0.0;
}

// ceil(log_{1+eps}(sum / min)) over all clients' reports.
std::size_t DoublingBound(std::span<const double> costs, double epsilon) {
  double total = 0.0, low = costs[0];
  for (double c : costs) {
    total += c;
    low = std::min(low, c);
  }
  const double steps = std::log(total / low) / std::log1p(epsilon);
  return static_cast<std::size_t>(std::max(0.0, std::ceil(steps - 1e-9)));
}

}  // namespace

CoverageInstance RandomInstance(std::mt19937_64& rng, std::size_t max_clients,
                                std::size_t max_dim) {
  CoverageInstance inst;
  const std::size_t n = UniformInt(rng, 2, std::max<std::size_t>(2, max_clients));
  const std::size_t d = UniformInt(rng, 1, std::max<std::size_t>(1, max_dim));
  inst.ridge = 1.0;
  inst.v_last = SymMatrix(d);
  for (std::size_t k = UniformInt(rng, 0, 2 * d); k > 0; --k) {
    inst.v_last.AddOuter(RandomArm(rng, d, Uniform(rng, 0.2, 1.0)));
  }
  for (std::size_t i = 0; i < n; ++i) {
    SymMatrix delta(d);
    if (Uniform(rng, 0.0, 1.0) >= 0.1) {
      for (std::size_t k = UniformInt(rng, 1, 2 * d); k > 0; --k) {
        delta.AddOuter(RandomArm(rng, d, Uniform(rng, 0.2, 1.0)));
      }
    }
    inst.deltas.push_back(std::move(delta));
    inst.reported_costs.push_back(Uniform(rng, 1.0, 100.0));
  }
  CoverageOracle oracle(inst.v_last, inst.deltas, inst.ridge);
  const double g0 = oracle.Value(0);
  inst.beta = g0 < -1e-9 ? std::exp(Uniform(rng, 0.15, 0.95) * g0)
                         : Uniform(rng, 0.1, 1.0);
  return inst;
}

CoverageInstance RandomProtocolState(std::mt19937_64& rng,
                                     std::size_t num_clients, std::size_t dim,
                                     std::size_t t, double arm_norm_bound,
                                     double ridge) {
  CoverageInstance inst;
  inst.ridge = ridge;
  inst.v_last = SymMatrix(dim);
  inst.deltas.assign(num_clients, SymMatrix(dim));
  inst.reported_costs.assign(num_clients, 1.0);
  for (std::size_t s = 0; s < t; ++s) {
    const Vector x = RandomArm(rng, dim, arm_norm_bound * Uniform(rng, 0.3, 1.0));
    const std::size_t slot = UniformInt(rng, 0, num_clients);
    if (slot == num_clients) {
      inst.v_last.AddOuter(x);
    } else {
      inst.deltas[slot].AddOuter(x);
    }
  }
  return inst;
}

std::string InstanceToJson(const CoverageInstance& inst) {
  Json j;
  j["ridge"] = inst.ridge;
  j["beta"] = inst.beta;
  j["v_last"] = MatrixJson(inst.v_last);
  Json deltas = Json::array();
  for (const SymMatrix& m : inst.deltas) deltas.push_back(MatrixJson(m));
  j["deltas"] = std::move(deltas);
  j["reported_costs"] = inst.reported_costs;
  return j.dump();
}

CoverageInstance InstanceFromJson(const std::string& json_text) {
  try {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    CoverageInstance inst;
    inst.ridge = j.at("ridge").get<double>();
    inst.beta = j.at("beta").get<double>();
    inst.v_last = MatrixFrom(j.at("v_last"));
    for (const auto& m : j.at("deltas")) inst.deltas.push_back(MatrixFrom(m));
    inst.reported_costs = j.at("reported_costs").get<std::vector<double>>();
    inst.Validate();
    return inst;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kConfigInvalid, std::string("instance: ") + e.what());
  }
}

bool OracleReport::ok() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.ok(); });
}

const PropertyResult* OracleReport::Find(const std::string& name) const {
  for (const PropertyResult& p : properties) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::string OracleReport::ToJson() const {
  Json j;
  j["trials"] = trials;
  j["seed"] = seed;
  j["ok"] = ok();
  Json props = Json::array();
  for (const PropertyResult& p : properties) {
    Json o;
    o["name"] = p.name;
    o["checked"] = p.checked;
    o["passed"] = p.passed;
    o["ok"] = p.ok();
    Json ces = Json::array();
    for (const std::string& c : p.counterexamples) ces.push_back(Json::parse(c));
    o["counterexamples"] = std::move(ces);
    props.push_back(std::move(o));
  }
  j["properties"] = std::move(props);
  return j.dump(2) + "\n";
}

OracleReport RunOracleSuite(const OracleSettings& settings,
                            const GreedyFn& greedy) {
  const GreedyFn run_greedy =
      greedy ? greedy
             : GreedyFn([](CoverageOracle& o, std::span<const double> c,
                           double b, ClientMask m) {
                 return GreedyUnderBudget(o, c, b, m);
               });
  const double eps = settings.epsilon;
  const double gamma = settings.gamma;

  Recorder submodularity("submodularity");
  Recorder budget_monotonicity("budget_monotonicity");
  Recorder budget_respect("budget_respect");
  Recorder selection_monotonicity("selection_monotonicity");
  Recorder bi_criteria("bi_criteria");
  Recorder truthfulness("truthfulness");
  Recorder individual_rationality("individual_rationality");
  Recorder bisection_agreement("bisection_agreement");
  Recorder complexity_bound("complexity_bound");
  Recorder monopoly("monopoly_elimination");

  const MechanismParams truth{MechanismKind::kTruthFedBan, 0.5, eps};
  const MechanismParams vanilla{MechanismKind::kVanillaGreedy, 0.5, eps};

  for (std::size_t trial = 0; trial < settings.trials; ++trial) {
    std::mt19937_64 rng = MakeEngine(settings.seed, Stream::kOracle, trial);
    const CoverageInstance inst =
        RandomInstance(rng, settings.max_clients, settings.max_dim);
    const std::size_t n = inst.num_clients();
    const std::span<const double> costs = inst.reported_costs;
    CoverageOracle oracle(inst);
    MechanismParams tf = truth, vg = vanilla;
    tf.beta = vg.beta = inst.beta;

    // Submodularity on random A subset B, i outside B.
    for (int k = 0; k < 5; ++k) {
      ClientMask b = 0, a = 0;
      for (ClientId j = 0; j < n; ++j) {
        if (Uniform(rng, 0, 1) < 0.5) b |= Bit(j);
      }
      for (ClientId j : IdsOf(b)) {
        if (Uniform(rng, 0, 1) < 0.5) a |= Bit(j);
      }
      const std::vector<ClientId> outside = IdsOf(oracle.all() & ~b);
      if (outside.empty()) continue;
      const ClientId i = outside[UniformInt(rng, 0, outside.size() - 1)];
      const double ga = oracle.MarginalGain(a, i), gb = oracle.MarginalGain(b, i);
      submodularity.Check(ga >= gb - 1e-9, inst,
                          {{"A", IdsOf(a)}, {"B", IdsOf(b)}, {"i", i},
                           {"gain_A", ga}, {"gain_B", gb}});
    }

    double total = 0.0;
    for (double c : costs) total += c;

    // Budgeted greedy: respects the budget and never gets worse with more.
    for (int k = 0; k < 3; ++k) {
      double b1 = Uniform(rng, 0.0, 1.2 * total);
      double b2 = Uniform(rng, 0.0, 1.2 * total);
      if (b1 > b2) std::swap(b1, b2);
      const auto s1 = run_greedy(oracle, costs, b1, oracle.all());
      const auto s2 = run_greedy(oracle, costs, b2, oracle.all());
      for (const auto& [s, b] : {std::pair{&s1, b1}, std::pair{&s2, b2}}) {
        double spent = 0.0;
        for (ClientId j : *s) spent += costs[j];
        budget_respect.Check(spent <= b, inst,
                             {{"budget", b}, {"selected", *s}, {"spent", spent}});
      }
      if (b2 > b1) {
        const double g1 = oracle.Value(MaskOf(s1));
        const double g2 = oracle.Value(MaskOf(s2));
        budget_monotonicity.Check(s1 == s2 || g2 > g1 - 1e-12, inst,
                                  {{"b", b1}, {"b_prime", b2}, {"S_b", s1},
                                   {"S_b_prime", s2}, {"g_b", g1},
                                   {"g_b_prime", g2}});
      }
    }

    const SelectionResult sel_tf =
        TruthfulIncentiveSearch(oracle, costs, inst.beta, eps, oracle.all(),
                                greedy);
    // The payment-side checks below re-run the standard rule, so they must
    // start from its own selection rather than one produced by a custom hook.
    const SelectionResult sel_rule =
        greedy ? RunSelection(tf, oracle, costs, oracle.all()) : sel_tf;
    const SelectionResult sel_vg = RunSelection(vg, oracle, costs, oracle.all());

    // Bi-criteria against the exhaustive optimum.
    if (n <= kMaxEnumerationClients) {
      const OptimalCover opt = BruteForceOpt(inst);
      const double cost = sel_tf.TotalCost(costs);
      const double cover = oracle.Value(sel_tf.mask);
      const bool ok = cost <= (1.0 + eps) * opt.cost * (1.0 + 1e-9) &&
                      cover >= RelaxedThreshold(inst.beta) - 1e-9;
      bi_criteria.Check(ok, inst,
                        {{"selected", sel_tf.selected}, {"cost", cost},
                         {"opt", opt.selected}, {"opt_cost", opt.cost},
                         {"coverage", cover},
                         {"relaxed_threshold", RelaxedThreshold(inst.beta)}});
    }

    const std::size_t bound = DoublingBound(costs, eps);
    complexity_bound.Check(sel_tf.iterations <= bound, inst,
                           {{"iterations", sel_tf.iterations}, {"bound", bound}});

    // Lowering a selected client's report keeps it selected.
    for (const auto& [rule, sel] :
         {std::pair{tf, &sel_rule}, std::pair{vg, &sel_vg}}) {
      for (ClientId i : sel->selected) {
        for (int k = 1; k <= 10; ++k) {
          std::vector<double> probe(costs.begin(), costs.end());
          probe[i] = costs[i] * k / 10.0;
          const SelectionResult r = RunSelection(rule, oracle, probe, oracle.all());
          selection_monotonicity.Check(
              r.Contains(i), inst,
              {{"rule", MechanismName(rule.kind)}, {"client", i},
               {"report", probe[i]}, {"selected", r.selected}});
        }
      }
    }

    // Truthfulness and individual rationality, instance costs taken as true.
    for (const auto& [rule, tol] : {std::pair{tf, gamma}, std::pair{vg, 0.0}}) {
      const SelectionResult sel = RunSelection(rule, oracle, costs, oracle.all());
      const PaymentSchedule pay =
          SettleRound(sel, oracle, costs, rule, gamma, kDefaultEssentialSurrogate);
      for (ClientId i = 0; i < n; ++i) {
        const double u_true = Utility(pay, i, costs[i]);
        const double ir_floor = rule.kind == MechanismKind::kVanillaGreedy
                                    ? 0.0
                                    : -2.0 * gamma;
        individual_rationality.Check(
            u_true >= ir_floor, inst,
            {{"rule", MechanismName(rule.kind)}, {"client", i},
             {"utility", u_true}});
        for (double f : kMisreportFactors) {
          std::vector<double> lie(costs.begin(), costs.end());
          lie[i] = costs[i] * f;
          const SelectionResult s2 = RunSelection(rule, oracle, lie, oracle.all());
          if (rule.kind == MechanismKind::kTruthFedBan) {
            const std::size_t b2 = DoublingBound(lie, eps);
            complexity_bound.Check(s2.iterations <= b2, inst,
                                   {{"iterations", s2.iterations},
                                    {"bound", b2}, {"reports", lie}});
          }
          const PaymentSchedule p2 =
              SettleRound(s2, oracle, lie, rule, gamma, kDefaultEssentialSurrogate);
          const double u_lie = Utility(p2, i, costs[i]);
          truthfulness.Check(
              u_lie <= u_true + 2.0 * tol + 1e-9, inst,
              {{"rule", MechanismName(rule.kind)}, {"client", i},
               {"factor", f}, {"utility_truthful", u_true},
               {"utility_misreport", u_lie}});
        }
      }
    }

    // Bisection against a grid scan of the inclusion threshold, on up to two
    // non-essential participants.
    const double gb = kBisectionCheckGamma;
    const double resolution = gb / 10.0;
    std::size_t scanned = 0;
    for (ClientId i : sel_rule.selected) {
      if (scanned == 2) break;
      const CriticalValue cv = CriticalValueBisection(oracle, costs, tf, i, gb);
      if (cv.essential) continue;
      ++scanned;
      double last_in = 0.0;
      std::vector<double> probe(costs.begin(), costs.end());
      for (std::size_t k = 1;; ++k) {
        probe[i] = resolution * static_cast<double>(k);
        if (probe[i] > cv.upper_bracket) break;
        if (!RunSelection(tf, oracle, probe, oracle.all()).Contains(i)) break;
        last_in = probe[i];
      }
      // The grid pins the threshold to [last_in, last_in + resolution].
      const double gap = std::max(
          {0.0, last_in - cv.value, cv.value - (last_in + resolution)});
      const double ratio = cv.upper_bracket / gb;
      const auto max_iter = static_cast<std::size_t>(
          ratio <= 1.0 ? 0.0 : std::ceil(std::log2(ratio) - 1e-12));
      bisection_agreement.Check(
          gap <= gb && cv.iterations <= max_iter, inst,
          {{"client", i}, {"bisection", cv.value}, {"grid_threshold", last_in},
           {"iterations", cv.iterations}, {"max_iterations", max_iter},
           {"upper_bracket", cv.upper_bracket}});
    }

    // No client is essential once beta is at the monopoly-free bound.
    {
      const std::size_t t = UniformInt(rng, 1, 400);
      CoverageInstance state = RandomProtocolState(
          rng, UniformInt(rng, 2, std::max<std::size_t>(2, settings.max_clients)),
          UniformInt(rng, 1, std::max<std::size_t>(1, settings.max_dim)), t, 1.0,
          1.0);
      state.beta = MonopolyFreeBetaBound(static_cast<double>(t), 1.0, 1.0,
                                         state.v_last.dim());
      CoverageOracle so(state);
      for (ClientId i = 0; i < state.num_clients(); ++i) {
        monopoly.Check(!IsEssential(so, i, std::log(state.beta), so.all()), state,
                       {{"t", t}, {"client", i}, {"beta", state.beta}});
      }
    }
  }

  OracleReport report;
  report.trials = settings.trials;
  report.seed = settings.seed;
  for (Recorder* r :
       {&submodularity, &budget_monotonicity, &budget_respect,
        &selection_monotonicity, &bi_criteria, &truthfulness,
        &individual_rationality, &bisection_agreement, &complexity_bound,
        &monopoly}) {
    report.properties.push_back(r->Take());
  }
  return report;
}

}  // namespace fedban
