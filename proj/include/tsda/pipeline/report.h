// Copyright 2026  The tsda Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef TSDA_PIPELINE_REPORT_H_
#define TSDA_PIPELINE_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tsda::pipeline {

/// 100 (system - baseline) / baseline. Negative values are improvements.
/// Throws InvalidArgument unless baseline_ter > 0.
double Werr(double baseline_ter, double system_ter);

struct SystemRow {
  std::string system;
  double clean_ter = 0.0;
  double noisy_ter = 0.0;
  double clean_werr = 0.0;
  double noisy_werr = 0.0;
  bool operator==(const SystemRow&) const = default;
};

struct RunReport {
  std::uint64_t seed = 0;
  std::string config_hash;
  std::vector<SystemRow> systems;
  bool operator==(const RunReport&) const = default;
};

struct GridRow {
  double temperature = 1.0;
  int k = 0;  // 0 means every logit
  double clean_ter = 0.0;
  double noisy_ter = 0.0;
  double clean_werr = 0.0;
  double noisy_werr = 0.0;
  bool operator==(const GridRow&) const = default;
};

struct SizeRow {
  int multiplier = 1;
  double clean_ter = 0.0;
  double noisy_ter = 0.0;
  double clean_werr = 0.0;
  double noisy_werr = 0.0;
  bool operator==(const SizeRow&) const = default;
};

inline constexpr const char* kTableHeader = "system,clean_ter,noisy_ter,clean_werr,noisy_werr";
inline constexpr const char* kGridHeader = "temperature,k,clean_ter,noisy_ter,clean_werr,noisy_werr";
inline constexpr const char* kSizeHeader = "multiplier,clean_ter,noisy_ter,clean_werr,noisy_werr";
inline constexpr const char* kPlotHeader = "x,y,series";

/// Numbers are written in shortest round-trip form, so parsing a CSV back
/// reproduces the rows exactly.
void WriteTableCsv(std::ostream& os, const std::vector<SystemRow>& rows);
void WriteGridCsv(std::ostream& os, const std::vector<GridRow>& rows);
void WriteSizeCsv(std::ostream& os, const std::vector<SizeRow>& rows);
std::vector<SystemRow> ReadTableCsv(std::istream& is);
std::vector<GridRow> ReadGridCsv(std::istream& is);
std::vector<SizeRow> ReadSizeCsv(std::istream& is);

/// run_report.json: seed, config hash, and the table rows.
std::string RunReportJson(const RunReport& report);

/// Writes tables.csv and run_report.json plus plot_table.csv
/// (x = system index, y = noisy WERR).
void EmitTable(const std::filesystem::path& dir, const RunReport& report);
/// Writes grid.csv and plot_grid.csv (x = k with "max" as the class count,
/// y = noisy WERR, series = "T=<t>").
void EmitGrid(const std::filesystem::path& dir, const std::vector<GridRow>& rows,
              int num_classes);
/// Writes size.csv and plot_size.csv (x = multiplier, y = WERR,
/// series = clean | noisy).
void EmitSize(const std::filesystem::path& dir, const std::vector<SizeRow>& rows);

/// Shortest representation that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace tsda::pipeline

#endif  // TSDA_PIPELINE_REPORT_H_
