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

#include "fedban/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>
#include <utility>

#include "fedban/error.hpp"
#include "fedban/report.hpp"

namespace fedban {
namespace {

std::string RunFileStem(const std::string& label, std::uint64_t seed) {
  return label + "_seed" + std::to_string(seed);
}

void WritePlots(const std::filesystem::path& dir, const std::string& prefix,
                const std::vector<const VariantSummary*>& variants) {
  for (std::size_t k = 0; k < kNumMetrics; ++k) {
    std::vector<PlotSeries> series;
    for (const VariantSummary* v : variants) {
      series.push_back({v->label, v->series[k].mean});
    }
    const std::string metric(kMetricNames[k]);
    WriteTextFile(dir / "plots" / (prefix + metric + ".svg"),
                  LinePlotSvg(metric + " (seed mean)", metric, series));
  }
}

void WriteSeedFiles(const std::filesystem::path& dir,
                    const VariantSummary& v) {
  for (const SeedRun& run : v.runs) {
    const std::string stem = RunFileStem(v.label, run.seed);
    std::ostringstream csv;
    WriteRunCsv(csv, run.metrics);
    WriteTextFile(dir / "runs" / (stem + ".csv"), csv.str());
    std::ostringstream clients;
    WriteClientCsv(clients, run.metrics);
    WriteTextFile(dir / "clients" / (stem + ".csv"), clients.str());
    if (!run.rounds.empty()) {
      std::string jsonl;
      for (const RoundRecord& r : run.rounds) {
        jsonl += RoundRecordToJson(r);
        jsonl += '\n';
      }
      WriteTextFile(dir / "rounds" / (stem + ".jsonl"), jsonl);
    }
  }
}

// variant,metric,mean,std over the final values of each seed, plus rounds.
std::string FinalSummaryCsv(const std::vector<const VariantSummary*>& variants,
                            const std::string& prefix_header,
                            const std::vector<std::string>& prefixes) {
  std::ostringstream out;
  out << prefix_header << "metric,mean,std\n";
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const VariantSummary& s = *variants[v];
    auto row = [&](std::string_view metric, const std::vector<double>& xs) {
      double mean = 0.0, var = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(std::max<std::size_t>(1, xs.size()));
      for (double x : xs) var += (x - mean) * (x - mean);
      var /= static_cast<double>(std::max<std::size_t>(1, xs.size()));
      out << prefixes[v] << metric << ',' << FormatNumber(mean) << ','
          << FormatNumber(std::sqrt(var)) << '\n';
    };
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      std::vector<double> finals;
      for (const SeedRun& r : s.runs) {
        const auto& series = MetricSeries(r.metrics, k);
        finals.push_back(series.empty() ? 0.0 : series.back());
      }
      row(kMetricNames[k], finals);
    }
    std::vector<double> rounds;
    for (const SeedRun& r : s.runs) {
      rounds.push_back(static_cast<double>(r.metrics.rounds));
    }
    row("rounds", rounds);
  }
  return out.str();
}

}  // namespace

const std::vector<double>& MetricSeries(const RunMetrics& m,
                                        std::size_t metric) {
  switch (metric) {
    case 0: return m.regret;
    case 1: return m.communication;
    case 2: return m.incentive;
    case 3: return m.social_cost;
    default:
      Fail(ErrorCode::kConfigInvalid,
           "metric index " + std::to_string(metric) + " out of range");
  }
}

void RunParallel(std::size_t count, std::size_t workers,
                 const std::function<void(std::size_t)>& task) {
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < count; k = next++) {
          try {
            task(k);
          } catch (...) {
            errors[k] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SeriesSummary Summarize(const std::vector<const std::vector<double>*>& runs) {
  SeriesSummary s;
  if (runs.empty()) return s;
  const std::size_t steps = runs.front()->size();
  const double n = static_cast<double>(runs.size());
  s.mean.assign(steps, 0.0);
  s.std.assign(steps, 0.0);
  for (std::size_t t = 0; t < steps; ++t) {
    double mean = 0.0;
    for (const auto* r : runs) mean += (*r)[t];
    mean /= n;
    double var = 0.0;
    for (const auto* r : runs) var += ((*r)[t] - mean) * ((*r)[t] - mean);
    s.mean[t] = mean;
    s.std[t] = std::sqrt(var / n);
  }
  return s;
}

double VariantSummary::FinalMean(std::size_t metric) const {
  const auto& mean = series[metric].mean;
  return mean.empty() ? 0.0 : mean.back();
}

double VariantSummary::MeanRounds() const {
  if (runs.empty()) return 0.0;
  double total = 0.0;
  for (const SeedRun& r : runs) total += static_cast<double>(r.metrics.rounds);
  return total / static_cast<double>(runs.size());
}

std::vector<SeedRun> RunBatch(const std::vector<SimulationConfig>& configs,
                              std::size_t workers) {
  std::vector<SeedRun> out(configs.size());
  RunParallel(configs.size(), workers, [&](std::size_t k) {
    SimulationResult r = RunSimulation(configs[k]);
    out[k].seed = configs[k].seed;
    out[k].metrics = std::move(r.metrics);
    out[k].rounds = std::move(r.rounds);
  });
  return out;
}

VariantSummary Summarize(std::string label, std::vector<SeedRun> runs) {
  VariantSummary v;
  v.label = std::move(label);
  v.runs = std::move(runs);
  for (std::size_t k = 0; k < kNumMetrics; ++k) {
    std::vector<const std::vector<double>*> series;
    for (const SeedRun& r : v.runs) series.push_back(&MetricSeries(r.metrics, k));
    v.series[k] = Summarize(series);
  }
  return v;
}

VariantSummary RunSingle(const ExperimentConfig& config) {
  config.Validate();
  std::vector<SimulationConfig> configs;
  for (std::uint64_t seed : config.seeds) {
    SimulationConfig c = config.ForRun(config.sim.mechanism.kind, seed);
    c.keep_round_log = config.round_log;
    configs.push_back(std::move(c));
  }
  return Summarize(std::string(MechanismName(config.sim.mechanism.kind)),
                   RunBatch(configs, config.workers));
}

std::vector<VariantSummary> RunComparison(const ExperimentConfig& config) {
  config.Validate();
  std::vector<SimulationConfig> configs;
  for (MechanismKind m : config.mechanisms) {
    for (std::uint64_t seed : config.seeds) {
      SimulationConfig c = config.ForRun(m, seed);
      c.keep_round_log = config.round_log;
      configs.push_back(std::move(c));
    }
  }
  std::vector<SeedRun> runs = RunBatch(configs, config.workers);
  std::vector<VariantSummary> out;
  const std::size_t per = config.seeds.size();
  for (std::size_t v = 0; v < config.mechanisms.size(); ++v) {
    std::vector<SeedRun> mine(std::make_move_iterator(runs.begin() + v * per),
                              std::make_move_iterator(runs.begin() + (v + 1) * per));
    out.push_back(Summarize(std::string(MechanismName(config.mechanisms[v])),
                            std::move(mine)));
  }
  return out;
}

MicroResult RunMicroStudy(const ExperimentConfig& config) {
  config.Validate();
  const ClientId who = config.micro.client;
  std::vector<double> factors{1.0};  // the truthful row first
  factors.insert(factors.end(), config.micro.factors.begin(),
                 config.micro.factors.end());

  std::vector<SimulationConfig> configs;
  for (MechanismKind m : config.micro.mechanisms) {
    for (std::size_t f = 0; f < factors.size(); ++f) {
      for (std::uint64_t seed : config.seeds) {
        SimulationConfig c = config.ForRun(m, seed);
        c.keep_round_log = false;
        c.strategies.assign(c.num_clients, ReportingStrategy::Truthful());
        if (f > 0) c.strategies[who] = ReportingStrategy::Multiplicative(factors[f]);
        configs.push_back(std::move(c));
      }
    }
  }
  const std::vector<SeedRun> runs = RunBatch(configs, config.workers);

  MicroResult result;
  result.client = who;
  const std::size_t seeds = config.seeds.size();
  const double n = static_cast<double>(seeds);
  std::size_t at = 0;
  for (MechanismKind m : config.micro.mechanisms) {
    const std::size_t truthful_at = at;
    MicroRow truthful;
    for (std::size_t f = 0; f < factors.size(); ++f) {
      MicroRow row;
      row.mechanism = m;
      row.factor = factors[f];
      row.strategy = f == 0 ? "truthful"
                            : ReportingStrategy::Multiplicative(factors[f]).Label();
      for (std::size_t s = 0; s < seeds; ++s) {
        const RunMetrics& r = runs[at + s].metrics;
        row.regret += r.client_regret[who] / n;
        row.incentive += r.client_incentive[who] / n;
        row.utility += r.client_utility[who] / n;
        const RunMetrics& t = runs[truthful_at + s].metrics;
        const double slack =
            2.0 * config.sim.gamma *
            static_cast<double>(std::max(t.rounds, r.rounds));
        if (r.client_utility[who] > t.client_utility[who] + slack + 1e-9) {
          ++row.utility_violations;
        }
      }
      if (f == 0) truthful = row;
      auto ratio = [](double value, double base) {
        return base == 0.0 ? (value == 0.0 ? 1.0 : std::nan(""))
                           : value / base;
      };
      row.norm_regret = ratio(row.regret, truthful.regret);
      row.norm_incentive = ratio(row.incentive, truthful.incentive);
      row.norm_utility = ratio(row.utility, truthful.utility);
      result.rows.push_back(std::move(row));
      at += seeds;
    }
  }
  return result;
}

std::string MacroCellLabel(const MacroCell& cell) {
  return std::string(DirectionName(cell.direction)) + "_" +
         FormatNumber(cell.ratio);
}

std::vector<MacroCell> RunMacroStudy(const ExperimentConfig& config) {
  config.Validate();
  std::vector<MacroCell> cells;
  std::vector<SimulationConfig> configs;
  for (MisreportDirection dir : config.macro.directions) {
    const double factor = dir == MisreportDirection::kUnder
                              ? config.macro.under_factor
                              : config.macro.over_factor;
    for (double ratio : config.macro.ratios) {
      MacroCell cell;
      cell.direction = dir;
      cell.ratio = ratio;
      for (std::uint64_t seed : config.seeds) {
        SimulationConfig c = config.ForRun(config.sim.mechanism.kind, seed);
        c.keep_round_log = false;
        c.strategies = AssignPopulation(c.num_clients, ratio, dir, factor, seed);
        cell.misreporters = static_cast<std::size_t>(std::count_if(
            c.strategies.begin(), c.strategies.end(),
            [](const ReportingStrategy& s) { return !s.IsTruthful(); }));
        configs.push_back(std::move(c));
      }
      cells.push_back(std::move(cell));
    }
  }
  std::vector<SeedRun> runs = RunBatch(configs, config.workers);
  const std::size_t per = config.seeds.size();
  for (std::size_t k = 0; k < cells.size(); ++k) {
    std::vector<SeedRun> mine(std::make_move_iterator(runs.begin() + k * per),
                              std::make_move_iterator(runs.begin() + (k + 1) * per));
    cells[k].summary = Summarize(MacroCellLabel(cells[k]), std::move(mine));
  }
  return cells;
}

void WriteRunOutputs(const std::filesystem::path& dir,
                     const ExperimentConfig& config,
                     const std::vector<VariantSummary>& variants) {
  WriteTextFile(dir / "config.json", ConfigToJson(config));
  std::ostringstream agg;
  WriteAggregateCsv(agg, variants);
  WriteTextFile(dir / "aggregate.csv", agg.str());
  std::vector<const VariantSummary*> ptrs;
  std::vector<std::string> prefixes;
  for (const VariantSummary& v : variants) {
    WriteSeedFiles(dir, v);
    ptrs.push_back(&v);
    prefixes.push_back(v.label + ",");
  }
  WriteTextFile(dir / "summary.csv", FinalSummaryCsv(ptrs, "variant,", prefixes));
  WritePlots(dir, "", ptrs);
}

void WriteMicroOutputs(const std::filesystem::path& dir,
                       const ExperimentConfig& config,
                       const MicroResult& result) {
  WriteTextFile(dir / "config.json", ConfigToJson(config));
  std::ostringstream out;
  out << "mechanism,strategy,factor,regret,incentive,utility,norm_regret,"
         "norm_incentive,norm_utility,utility_violations\n";
  for (const MicroRow& r : result.rows) {
    out << MechanismName(r.mechanism) << ',' << r.strategy << ','
        << FormatNumber(r.factor) << ',' << FormatNumber(r.regret) << ','
        << FormatNumber(r.incentive) << ',' << FormatNumber(r.utility) << ','
        << FormatNumber(r.norm_regret) << ','
        << FormatNumber(r.norm_incentive) << ','
        << FormatNumber(r.norm_utility) << ',' << r.utility_violations << '\n';
  }
  WriteTextFile(dir / "micro.csv", out.str());
}

void WriteMacroOutputs(const std::filesystem::path& dir,
                       const ExperimentConfig& config,
                       const std::vector<MacroCell>& cells) {
  WriteTextFile(dir / "config.json", ConfigToJson(config));
  std::vector<const VariantSummary*> ptrs;
  std::vector<std::string> prefixes;
  for (const MacroCell& cell : cells) {
    std::ostringstream agg;
    WriteAggregateCsv(agg, std::span<const VariantSummary>(&cell.summary, 1));
    WriteTextFile(dir / "cells" / (cell.summary.label + ".csv"), agg.str());
    ptrs.push_back(&cell.summary);
    prefixes.push_back(std::string(DirectionName(cell.direction)) + "," +
                       FormatNumber(cell.ratio) + "," +
                       std::to_string(cell.misreporters) + ",");
  }
  WriteTextFile(dir / "macro_summary.csv",
                FinalSummaryCsv(ptrs, "direction,ratio,misreporters,", prefixes));
  for (MisreportDirection dir_kind : config.macro.directions) {
    std::vector<const VariantSummary*> mine;
    for (const MacroCell& cell : cells) {
      if (cell.direction == dir_kind) mine.push_back(&cell.summary);
    }
    WritePlots(dir, std::string(DirectionName(dir_kind)) + "_", mine);
  }
}

}  // namespace fedban
