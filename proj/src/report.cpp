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

#include "fedban/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fedban/error.hpp"
#include "fedban/experiments.hpp"

namespace fedban {
namespace {

std::string Short(double v, int precision) {
  if (!std::isfinite(v)) return FormatNumber(v);
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v,
                           std::chars_format::general, precision);
  return std::string(buf, res.ptr);
}

std::string Escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#ff7f0e", "#9467bd", "#8c564b",
                                    "#e377c2", "#7f7f7f", "#17becf",
                                    "#bcbd22"};

}  // namespace

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void WriteRunCsv(std::ostream& out, const RunMetrics& m) {
  out << "step,metric,value\n";
  const std::size_t steps = m.regret.size();
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t k = 0; k < kNumMetrics; ++k) {
      out << t + 1 << ',' << kMetricNames[k] << ','
          << FormatNumber(MetricSeries(m, k)[t]) << '\n';
    }
  }
}

void WriteClientCsv(std::ostream& out, const RunMetrics& m) {
  out << "client,utility,incentive,regret\n";
  for (std::size_t i = 0; i < m.client_utility.size(); ++i) {
    out << i << ',' << FormatNumber(m.client_utility[i]) << ','
        << FormatNumber(m.client_incentive[i]) << ','
        << FormatNumber(m.client_regret[i]) << '\n';
  }
}

void WriteAggregateCsv(std::ostream& out,
                       std::span<const VariantSummary> variants) {
  out << "step,variant,metric,mean,std\n";
  std::size_t steps = 0;
  for (const VariantSummary& v : variants) {
    steps = std::max(steps, v.series[0].mean.size());
  }
  for (std::size_t t = 0; t < steps; ++t) {
    for (const VariantSummary& v : variants) {
      for (std::size_t k = 0; k < kNumMetrics; ++k) {
        const SeriesSummary& s = v.series[k];
        if (t >= s.mean.size()) continue;
        out << t + 1 << ',' << v.label << ',' << kMetricNames[k] << ','
            << FormatNumber(s.mean[t]) << ',' << FormatNumber(s.std[t])
            << '\n';
      }
    }
  }
}

std::string LinePlotSvg(const std::string& title, const std::string& y_label,
                        std::span<const PlotSeries> series,
                        std::size_t max_points) {
  constexpr double kW = 720, kH = 440;
  constexpr double kLeft = 80, kRight = 170, kTop = 40, kBottom = 50;
  const double pw = kW - kLeft - kRight, ph = kH - kTop - kBottom;

  std::size_t n = 0;
  double lo = 0.0, hi = 0.0;
  bool any = false;
  for (const PlotSeries& s : series) {
    n = std::max(n, s.y.size());
    for (double v : s.y) {
      if (!std::isfinite(v)) continue;
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  if (!any) lo = 0.0, hi = 1.0;
  lo = std::min(lo, 0.0);
  if (hi <= lo) hi = lo + 1.0;
  const double xmax = std::max<double>(1.0, static_cast<double>(n));
  auto px = [&](double x) { return kLeft + pw * (x - 1.0) / std::max(1.0, xmax - 1.0); };
  auto py = [&](double y) { return kTop + ph * (1.0 - (y - lo) / (hi - lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\" viewBox=\"0 0 " << kW << ' ' << kH
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\""
      << " font-size=\"15\">" << Escape(title) << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw
      << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double y = lo + (hi - lo) * k / 4.0;
    const double yy = py(y);
    svg << "<line x1=\"" << kLeft - 4 << "\" y1=\"" << Short(yy, 6)
        << "\" x2=\"" << kLeft + pw << "\" y2=\"" << Short(yy, 6)
        << "\" stroke=\"#dddddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << Short(yy + 4, 6)
        << "\" text-anchor=\"end\">" << Short(y, 4) << "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double x = 1.0 + (xmax - 1.0) * k / 4.0;
    svg << "<text x=\"" << Short(px(x), 6) << "\" y=\"" << kTop + ph + 18
        << "\" text-anchor=\"middle\">" << Short(std::round(x), 6)
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kH - 10
      << "\" text-anchor=\"middle\">step</text>\n";
  svg << "<text x=\"18\" y=\"" << kTop + ph / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
      << kTop + ph / 2 << ")\">" << Escape(y_label) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& y = series[s].y;
    const char* color = kPalette[s % std::size(kPalette)];
    if (!y.empty()) {
      const std::size_t stride =
          std::max<std::size_t>(1, (y.size() + max_points - 1) / max_points);
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < y.size(); k += stride) {
        if (!std::isfinite(y[k])) continue;
        svg << Short(px(k + 1.0), 6) << ',' << Short(py(y[k]), 6) << ' ';
      }
      if (std::isfinite(y.back())) {
        svg << Short(px(static_cast<double>(y.size())), 6) << ','
            << Short(py(y.back()), 6);
      }
      svg << "\"/>\n";
    }
    const double ly = kTop + 10 + 18.0 * s;
    svg << "<line x1=\"" << kLeft + pw + 12 << "\" y1=\"" << ly << "\" x2=\""
        << kLeft + pw + 32 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kLeft + pw + 38 << "\" y=\"" << ly + 4 << "\">"
        << Escape(series[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) {
      Fail(ErrorCode::kIo, "cannot create directory " +
                               path.parent_path().string() + ": " +
                               ec.message());
    }
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace fedban
