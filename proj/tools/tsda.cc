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

// Command-line driver for the distillation experiments.
//
//   tsda [--config cfg.toml] [--seed N] [--out DIR] [--jobs N] <command> ...
//
// Every command prints the directory of the artifact it produced. Exit
// codes: 0 success, 2 configuration error, 3 stage failure, 4 I/O error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tsda/common/error.h"
#include "tsda/pipeline/cache.h"
#include "tsda/pipeline/config.h"
#include "tsda/pipeline/experiment.h"
#include "tsda/pipeline/report.h"

namespace {

namespace fs = std::filesystem;
using namespace tsda;
using namespace tsda::pipeline;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;
constexpr int kExitIo = 4;

struct GlobalOptions {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

struct CorpusOptions {
  std::string split = "train";
  int copy = 0;
  int bank = 0;
};

struct StudentOptions {
  std::optional<double> temperature;
  std::string k;
  int multiplier = 1;
};

int ParseK(const std::string& text, int fallback) {
  if (text.empty()) return fallback;
  if (text == "max") return kMaxK;
  std::size_t used = 0;
  int k = 0;
  try {
    k = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || k < 1) throw ConfigError("--k must be a positive integer or 'max'");
  return k;
}

ExperimentConfig BuildConfig(const GlobalOptions& g) {
  ExperimentConfig cfg = g.config.empty() ? ExperimentConfig{} : LoadConfig(g.config);
  if (g.seed) cfg.seed = *g.seed;
  if (g.out) cfg.output_dir = *g.out;
  if (g.jobs) cfg.jobs = *g.jobs;
  Validate(cfg);
  return cfg;
}

CorpusId ToCorpusId(const CorpusOptions& o) {
  if (o.split != "train" && o.split != "test") throw ConfigError("--split must be train or test");
  if (o.copy < 0 || o.bank < 0) throw ConfigError("--copy and --bank must be non-negative");
  if (o.split == "test" && (o.copy != 0 || o.bank != 0))
    throw ConfigError("the test split has no copies");
  return {o.split == "train" ? Split::kTrain : Split::kTest, o.copy, o.bank};
}

StageRef StudentRef(Experiment& ex, const StudentOptions& o) {
  const ExperimentConfig& cfg = ex.config();
  const double t = o.temperature.value_or(cfg.codec.temperature);
  if (!(t > 0.0)) throw ConfigError("--temperature must be positive");
  if (o.multiplier < 1) throw ConfigError("--multiplier must be at least 1");
  return ex.Student(t, ParseK(o.k, cfg.codec.k), o.multiplier);
}

void WriteFile(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  os << text;
  os.close();
  if (!os) throw IoError("cannot write " + path.string());
}

void WriteTimings(const Experiment& ex, const std::string& command) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [stage, seconds] : ex.Timings()) j[stage] = seconds;
  WriteFile(ex.config().output_dir / ("timings-" + command + ".json"), j.dump(2) + "\n");
}

void AddCorpusOptions(CLI::App* app, CorpusOptions& o) {
  app->add_option("--split", o.split, "train or test")->capture_default_str();
  app->add_option("--copy", o.copy, "corpus copy index (train only)")->capture_default_str();
  app->add_option("--bank", o.bank, "noise bank size override, 0 keeps the configured size");
}

void AddStudentOptions(CLI::App* app, StudentOptions& o) {
  app->add_option("--temperature", o.temperature, "distillation temperature");
  app->add_option("--k", o.k, "logits kept per frame, an integer or 'max'");
  app->add_option("--multiplier", o.multiplier, "noisy copies used for training")
      ->capture_default_str();
}

int Run(int argc, char** argv) {
  CLI::App app{"Teacher-student distillation experiments on simulated far-field audio", "tsda"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--config", g.config, "TOML experiment config");
  app.add_option("--seed", g.seed, "global seed");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--jobs", g.jobs, "worker threads");

  CorpusOptions corpus;
  StudentOptions student;
  std::string model = "teacher";
  std::string soft_k;
  std::optional<double> soft_t;

  auto* simulate = app.add_subcommand("simulate", "generate a simulated corpus");
  AddCorpusOptions(simulate, corpus);
  auto* features = app.add_subcommand("features", "extract LFBE features of a corpus");
  AddCorpusOptions(features, corpus);
  auto* teacher = app.add_subcommand("train-teacher", "train the teacher on clean transcribed audio");
  auto* multicond =
      app.add_subcommand("train-multicond", "train the multi-condition model on noisy transcribed audio");
  auto* soft = app.add_subcommand("soft-targets", "export top-k teacher logits as STGT");
  soft->add_option("--k", soft_k, "logits kept per frame, an integer or 'max'");
  soft->add_option("--temperature", soft_t, "temperature recorded in the header");
  auto* train_student = app.add_subcommand("train-student", "distill a student on noisy audio");
  AddStudentOptions(train_student, student);
  auto* eval = app.add_subcommand("eval", "score a model on the held-out clean and noisy sets");
  eval->add_option("--model", model, "teacher, multicond or student")
      ->check(CLI::IsMember({"teacher", "multicond", "student"}))
      ->capture_default_str();
  AddStudentOptions(eval, student);
  auto* sweep_tk = app.add_subcommand("sweep-tk", "student grid over temperature and k");
  auto* sweep_size = app.add_subcommand("sweep-size", "student sweep over training-set size");
  auto* report = app.add_subcommand("report", "table comparing students with the baseline and multi-condition models");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  Experiment ex(BuildConfig(g));
  const ExperimentConfig& cfg = ex.config();
  std::string command;
  fs::path result;

  if (*simulate) {
    command = "simulate";
    result = ex.Corpus(ToCorpusId(corpus)).dir;
  } else if (*features) {
    command = "features";
    result = ex.Features(ToCorpusId(corpus)).dir;
  } else if (*teacher) {
    command = "train-teacher";
    result = ex.Teacher().dir;
  } else if (*multicond) {
    command = "train-multicond";
    result = ex.MultiCondition().dir;
  } else if (*soft) {
    command = "soft-targets";
    const double t = soft_t.value_or(cfg.codec.temperature);
    if (!(t > 0.0)) throw ConfigError("--temperature must be positive");
    result = ex.SoftTargets(ParseK(soft_k, cfg.codec.k), t).dir;
  } else if (*train_student) {
    command = "train-student";
    result = StudentRef(ex, student).dir;
  } else if (*eval) {
    command = "eval";
    StageRef m = model == "teacher"     ? ex.Teacher()
                 : model == "multicond" ? ex.MultiCondition()
                                        : StudentRef(ex, student);
    result = ex.Evaluation(m).dir;
  } else if (*sweep_tk) {
    command = "sweep-tk";
    EmitGrid(cfg.output_dir, ex.SweepTk(), cfg.corpus.n_classes);
    result = cfg.output_dir / "grid.csv";
  } else if (*sweep_size) {
    command = "sweep-size";
    EmitSize(cfg.output_dir, ex.SweepSize());
    result = cfg.output_dir / "size.csv";
  } else if (*report) {
    command = "report";
    EmitTable(cfg.output_dir, ex.RunTable());
    result = cfg.output_dir / "tables.csv";
  }
  WriteTimings(ex, command);
  std::cout << result.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return Run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "tsda: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const StageError& e) {
    std::cerr << "tsda: " << e.what() << '\n';
    return e.io() ? kExitIo : kExitStage;
  } catch (const IoError& e) {
    std::cerr << "tsda: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "tsda: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "tsda: " << e.what() << '\n';
    return kExitStage;
  }
}
