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

#ifndef FEDBAN_REPORT_HPP_
#define FEDBAN_REPORT_HPP_

#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "fedban/protocol.hpp"

namespace fedban {

struct VariantSummary;

// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string FormatNumber(double value);

// step,metric,value for t = 1..T.
void WriteRunCsv(std::ostream& out, const RunMetrics& metrics);
// client,utility,incentive,regret.
void WriteClientCsv(std::ostream& out, const RunMetrics& metrics);
// step,variant,metric,mean,std.
void WriteAggregateCsv(std::ostream& out,
                       std::span<const VariantSummary> variants);

struct PlotSeries {
  std::string label;
  std::vector<double> y;  // y[k] is plotted at x = k + 1
};

// Self-contained SVG line chart; long series are thinned to at most
// `max_points` vertices.
std::string LinePlotSvg(const std::string& title, const std::string& y_label,
                        std::span<const PlotSeries> series,
                        std::size_t max_points = 400);

// Writes `content` to `path`, creating parent directories. Throws Io.
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content);

}  // namespace fedban

#endif  // FEDBAN_REPORT_HPP_
