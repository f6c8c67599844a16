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

#include "tsda/pipeline/report.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "tsda/common/error.h"

namespace tsda::pipeline {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

double ParseDouble(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("csv: not a number: '" + s + "'");
  return v;
}

int ParseInt(const std::string& s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidArgument("csv: not an integer: '" + s + "'");
  return v;
}

// Reads the header, checks it, and returns the data rows split into fields.
std::vector<std::vector<std::string>> ReadCsv(std::istream& is, const char* header,
                                              std::size_t columns) {
  std::string line;
  if (!std::getline(is, line) || line != header)
    throw InvalidArgument(std::string("csv: expected header '") + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = SplitCsvLine(line);
    if (fields.size() != columns)
      throw InvalidArgument("csv: expected " + std::to_string(columns) + " fields in '" + line +
                            "'");
    rows.push_back(std::move(fields));
  }
  return rows;
}

std::ofstream OpenOut(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw IoError("report: cannot write " + path.string());
  return os;
}

void Close(std::ofstream& os, const fs::path& path) {
  os.close();
  if (!os) throw IoError("report: write failed for " + path.string());
}

}  // namespace

double Werr(double baseline_ter, double system_ter) {
  if (!(baseline_ter > 0.0)) throw InvalidArgument("werr: baseline TER must be positive");
  return 100.0 * (system_ter - baseline_ter) / baseline_ter;
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvalidArgument("format: cannot format number");
  return std::string(buf, ptr);
}

void WriteTableCsv(std::ostream& os, const std::vector<SystemRow>& rows) {
  os << kTableHeader << '\n';
  for (const SystemRow& r : rows) {
    if (r.system.find_first_of(",\n") != std::string::npos)
      throw InvalidArgument("csv: system name contains a separator: " + r.system);
    os << r.system << ',' << FormatDouble(r.clean_ter) << ',' << FormatDouble(r.noisy_ter) << ','
       << FormatDouble(r.clean_werr) << ',' << FormatDouble(r.noisy_werr) << '\n';
  }
}

void WriteGridCsv(std::ostream& os, const std::vector<GridRow>& rows) {
  os << kGridHeader << '\n';
  for (const GridRow& r : rows) {
    os << FormatDouble(r.temperature) << ',' << (r.k == 0 ? std::string("max") : std::to_string(r.k))
       << ',' << FormatDouble(r.clean_ter) << ',' << FormatDouble(r.noisy_ter) << ','
       << FormatDouble(r.clean_werr) << ',' << FormatDouble(r.noisy_werr) << '\n';
  }
}

void WriteSizeCsv(std::ostream& os, const std::vector<SizeRow>& rows) {
  os << kSizeHeader << '\n';
  for (const SizeRow& r : rows) {
    os << r.multiplier << ',' << FormatDouble(r.clean_ter) << ',' << FormatDouble(r.noisy_ter)
       << ',' << FormatDouble(r.clean_werr) << ',' << FormatDouble(r.noisy_werr) << '\n';
  }
}

std::vector<SystemRow> ReadTableCsv(std::istream& is) {
  std::vector<SystemRow> out;
  for (const auto& f : ReadCsv(is, kTableHeader, 5))
    out.push_back({f[0], ParseDouble(f[1]), ParseDouble(f[2]), ParseDouble(f[3]),
                   ParseDouble(f[4])});
  return out;
}

std::vector<GridRow> ReadGridCsv(std::istream& is) {
  std::vector<GridRow> out;
  for (const auto& f : ReadCsv(is, kGridHeader, 6))
    out.push_back({ParseDouble(f[0]), f[1] == "max" ? 0 : ParseInt(f[1]), ParseDouble(f[2]),
                   ParseDouble(f[3]), ParseDouble(f[4]), ParseDouble(f[5])});
  return out;
}

std::vector<SizeRow> ReadSizeCsv(std::istream& is) {
  std::vector<SizeRow> out;
  for (const auto& f : ReadCsv(is, kSizeHeader, 5))
    out.push_back({ParseInt(f[0]), ParseDouble(f[1]), ParseDouble(f[2]), ParseDouble(f[3]),
                   ParseDouble(f[4])});
  return out;
}

std::string RunReportJson(const RunReport& report) {
  nlohmann::ordered_json j;
  j["seed"] = report.seed;
  j["config_hash"] = report.config_hash;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SystemRow& r : report.systems)
    rows.push_back({{"system", r.system},
                    {"clean_ter", r.clean_ter},
                    {"noisy_ter", r.noisy_ter},
                    {"clean_werr", r.clean_werr},
                    {"noisy_werr", r.noisy_werr}});
  j["systems"] = rows;
  return j.dump(2) + "\n";
}

void EmitTable(const fs::path& dir, const RunReport& report) {
  fs::create_directories(dir);
  {
    const fs::path p = dir / "tables.csv";
    auto os = OpenOut(p);
    WriteTableCsv(os, report.systems);
    Close(os, p);
  }
  {
    const fs::path p = dir / "run_report.json";
    auto os = OpenOut(p);
    os << RunReportJson(report);
    Close(os, p);
  }
  {
    const fs::path p = dir / "plot_table.csv";
    auto os = OpenOut(p);
    os << kPlotHeader << '\n';
    for (std::size_t i = 0; i < report.systems.size(); ++i)
      os << i << ',' << FormatDouble(report.systems[i].noisy_werr) << ','
         << report.systems[i].system << '\n';
    Close(os, p);
  }
}

void EmitGrid(const fs::path& dir, const std::vector<GridRow>& rows, int num_classes) {
  fs::create_directories(dir);
  {
    const fs::path p = dir / "grid.csv";
    auto os = OpenOut(p);
    WriteGridCsv(os, rows);
    Close(os, p);
  }
  const fs::path p = dir / "plot_grid.csv";
  auto os = OpenOut(p);
  os << kPlotHeader << '\n';
  for (const GridRow& r : rows)
    os << (r.k == 0 ? num_classes : r.k) << ',' << FormatDouble(r.noisy_werr) << ",T="
       << FormatDouble(r.temperature) << '\n';
  Close(os, p);
}

void EmitSize(const fs::path& dir, const std::vector<SizeRow>& rows) {
  fs::create_directories(dir);
  {
    const fs::path p = dir / "size.csv";
    auto os = OpenOut(p);
    WriteSizeCsv(os, rows);
    Close(os, p);
  }
  const fs::path p = dir / "plot_size.csv";
  auto os = OpenOut(p);
  os << kPlotHeader << '\n';
  for (const SizeRow& r : rows) os << r.multiplier << ',' << FormatDouble(r.clean_werr) << ",clean\n";
  for (const SizeRow& r : rows) os << r.multiplier << ',' << FormatDouble(r.noisy_werr) << ",noisy\n";
  Close(os, p);
}

}  // namespace tsda::pipeline
