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

#include "tsda/pipeline/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "toml.hpp"
#include "tsda/common/error.h"

namespace tsda::pipeline {

namespace {

using Json = nlohmann::ordered_json;

// Reads typed keys from one TOML table and remembers which were consumed so
// leftovers can be reported.
class Section {
 public:
  Section(const toml::table* table, std::string name, const std::string& origin)
      : table_(table), name_(std::move(name)), origin_(origin) {}

  bool Has(const char* key) const { return table_ && table_->contains(key); }

  void Get(const char* key, double& out) {
    if (const toml::node* n = Node(key)) {
      auto v = n->value<double>();
      if (!v || n->is_boolean()) Fail(key, "expected a number");
      out = *v;
    }
  }
  void Get(const char* key, int& out) {
    if (const toml::node* n = Node(key)) {
      auto v = n->as_integer();
      if (!v) Fail(key, "expected an integer");
      const std::int64_t x = v->get();
      if (x < INT32_MIN || x > INT32_MAX) Fail(key, "integer out of range");
      out = static_cast<int>(x);
    }
  }
  void Get(const char* key, std::uint64_t& out) {
    if (const toml::node* n = Node(key)) {
      auto v = n->as_integer();
      if (!v || v->get() < 0) Fail(key, "expected a non-negative integer");
      out = static_cast<std::uint64_t>(v->get());
    }
  }
  void Get(const char* key, bool& out) {
    if (const toml::node* n = Node(key)) {
      auto v = n->as_boolean();
      if (!v) Fail(key, "expected a boolean");
      out = v->get();
    }
  }
  void Get(const char* key, std::string& out) {
    if (const toml::node* n = Node(key)) {
      auto v = n->as_string();
      if (!v) Fail(key, "expected a string");
      out = v->get();
    }
  }
  template <typename T>
  void Get(const char* key, std::vector<T>& out) {
    if (const toml::node* n = Node(key)) {
      const toml::array* arr = n->as_array();
      if (!arr) Fail(key, "expected an array");
      std::vector<T> v;
      for (const toml::node& e : *arr) v.push_back(Element<T>(key, e));
      out = std::move(v);
    }
  }
  template <typename T>
  void Get(const char* key, std::pair<T, T>& out) {
    std::vector<T> v;
    if (!Has(key)) return;
    Get(key, v);
    if (v.size() != 2) Fail(key, "expected a two-element [lo, hi] array");
    out = {v[0], v[1]};
  }
  // k accepts an integer or "max".
  void GetK(const char* key, int& out) {
    if (const toml::node* n = Node(key)) out = KElement(key, *n);
  }
  void GetKs(const char* key, std::vector<int>& out) {
    if (const toml::node* n = Node(key)) {
      const toml::array* arr = n->as_array();
      if (!arr) Fail(key, "expected an array");
      std::vector<int> v;
      for (const toml::node& e : *arr) v.push_back(KElement(key, e));
      out = std::move(v);
    }
  }
  // A number, or "default" for the min-minus-50T policy.
  void GetFloor(const char* key, std::optional<double>& out) {
    if (const toml::node* n = Node(key)) {
      if (auto s = n->as_string()) {
        if (s->get() != "default") Fail(key, "expected a number or \"default\"");
        out.reset();
      } else if (auto v = n->value<double>(); v && !n->is_boolean()) {
        out = *v;
      } else {
        Fail(key, "expected a number or \"default\"");
      }
    }
  }

  void Finish() const {
    if (!table_) return;
    for (const auto& [k, v] : *table_) {
      const std::string key(k.str());
      if (!used_.count(key)) {
        if (v.is_table() && name_.empty()) continue;  // sections are handled separately
        throw ConfigError(origin_ + ": unknown key '" + Qualified(key.c_str()) + "'");
      }
    }
  }

 private:
  const toml::node* Node(const char* key) {
    if (!table_) return nullptr;
    used_.insert(key);
    return table_->get(key);
  }
  std::string Qualified(const char* key) const {
    return name_.empty() ? key : name_ + "." + key;
  }
  [[noreturn]] void Fail(const char* key, const std::string& why) const {
    throw ConfigError(origin_ + ": " + Qualified(key) + ": " + why);
  }
  template <typename T>
  T Element(const char* key, const toml::node& e) const {
    if constexpr (std::is_same_v<T, double>) {
      auto v = e.value<double>();
      if (!v || e.is_boolean()) Fail(key, "expected numbers");
      return *v;
    } else {
      auto v = e.as_integer();
      if (!v) Fail(key, "expected integers");
      return static_cast<T>(v->get());
    }
  }
  int KElement(const char* key, const toml::node& e) const {
    if (auto s = e.as_string()) {
      if (s->get() != "max") Fail(key, "expected an integer or \"max\"");
      return kMaxK;
    }
    auto v = e.as_integer();
    if (!v || v->get() < 1 || v->get() > 65535) Fail(key, "expected a positive integer or \"max\"");
    return static_cast<int>(v->get());
  }

  const toml::table* table_;
  std::string name_;
  std::string origin_;
  std::set<std::string> used_;
};

const toml::table* SubTable(const toml::table& root, const char* name, const std::string& origin) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) throw ConfigError(origin + ": [" + name + "] must be a table");
  return n->as_table();
}

void ReadTrain(Section& s, TrainSection& t) {
  s.Get("learning_rate", t.learning_rate);
  s.Get("momentum", t.momentum);
  s.Get("epochs", t.epochs);
  s.Get("batch_size", t.batch_size);
  s.Get("max_grad_norm", t.max_grad_norm);
}

void CheckTrain(const TrainSection& t, const std::string& name) {
  if (!(t.learning_rate > 0.0)) throw ConfigError(name + ".learning_rate must be positive");
  if (!(t.momentum >= 0.0 && t.momentum < 1.0))
    throw ConfigError(name + ".momentum must lie in [0, 1)");
  if (t.epochs < 1) throw ConfigError(name + ".epochs must be at least 1");
  if (t.batch_size < 1) throw ConfigError(name + ".batch_size must be at least 1");
  if (!(t.max_grad_norm >= 0.0)) throw ConfigError(name + ".max_grad_norm must be >= 0");
}

void CheckK(int k, int n_classes, const std::string& name) {
  if (k != kMaxK && (k < 1 || k > n_classes))
    throw ConfigError(name + " must be \"max\" or lie in [1, corpus.n_classes]");
}

template <typename T>
toml::array ToArray(const std::vector<T>& v) {
  toml::array a;
  for (const T& x : v) a.push_back(x);
  return a;
}

template <typename T>
toml::array ToArray(const std::pair<T, T>& p) {
  return toml::array{p.first, p.second};
}

toml::array KArray(const std::vector<int>& ks) {
  toml::array a;
  for (int k : ks) {
    if (k == kMaxK) a.push_back("max");
    else a.push_back(k);
  }
  return a;
}

toml::table TrainTable(const TrainSection& t) {
  return toml::table{{"learning_rate", t.learning_rate},
                     {"momentum", t.momentum},
                     {"epochs", t.epochs},
                     {"batch_size", t.batch_size},
                     {"max_grad_norm", t.max_grad_norm}};
}

}  // namespace

std::string KName(int k) { return k == kMaxK ? "max" : std::to_string(k); }

void Validate(const ExperimentConfig& cfg) {
  const CorpusSection& c = cfg.corpus;
  try {
    signal::Validate(c.sim);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("corpus: ") + e.what());
  }
  if (c.n_utts < 1) throw ConfigError("corpus.n_utts must be at least 1");
  if (c.test_utts < 1) throw ConfigError("corpus.test_utts must be at least 1");
  if (c.n_classes < 2 || c.n_classes > 65535)
    throw ConfigError("corpus.n_classes must lie in [2, 65535]");
  if (!(c.transcribed_fraction > 0.0 && c.transcribed_fraction <= 1.0))
    throw ConfigError("corpus.transcribed_fraction must lie in (0, 1]");
  if (c.tokens_per_utt.first < 1 || c.tokens_per_utt.first > c.tokens_per_utt.second)
    throw ConfigError("corpus.tokens_per_utt must be [lo, hi] with 1 <= lo <= hi");
  if (c.segment_frames.first < 1 || c.segment_frames.first > c.segment_frames.second)
    throw ConfigError("corpus.segment_frames must be [lo, hi] with 1 <= lo <= hi");

  const features::FrontEndConfig& fe = cfg.features;
  if (!(fe.hop_s > 0.0) || !(fe.win_s >= fe.hop_s))
    throw ConfigError("features: need win_s >= hop_s > 0");
  if (fe.n_fft < 2 || fe.win_s * c.sim.sample_rate > fe.n_fft + 1e-9)
    throw ConfigError("features: window longer than n_fft");
  if (fe.n_mels < 1) throw ConfigError("features.n_mels must be at least 1");
  if (!(fe.fmin >= 0.0 && fe.fmin < fe.fmax && fe.fmax <= 0.5 * c.sim.sample_rate))
    throw ConfigError("features: need 0 <= fmin < fmax <= sample_rate / 2");

  const net::ArchitectureSpec& m = cfg.model;
  if (m.context < 0) throw ConfigError("model.context must be >= 0");
  if (m.label_delay < 0) throw ConfigError("model.label_delay must be >= 0");
  for (int h : m.hidden)
    if (h < 1) throw ConfigError("model.hidden sizes must be positive");
  if (m.recurrent && m.hidden.empty())
    throw ConfigError("model.recurrent needs at least one hidden layer");
  if (!(m.init_scale > 0.0)) throw ConfigError("model.init_scale must be positive");

  CheckTrain(cfg.teacher, "teacher");
  CheckTrain(cfg.multicond, "multicond");
  CheckTrain(cfg.student.train, "student");
  for (double t : cfg.student.temperatures)
    if (!(t > 0.0)) throw ConfigError("student.temperatures must be positive");
  if (cfg.student.finetune_epochs < 0) throw ConfigError("student.finetune_epochs must be >= 0");
  if (!(cfg.student.finetune_learning_rate > 0.0))
    throw ConfigError("student.finetune_learning_rate must be positive");

  CheckK(cfg.codec.k, c.n_classes, "codec.k");
  if (!(cfg.codec.temperature > 0.0)) throw ConfigError("codec.temperature must be positive");
  if (cfg.codec.floor_constant && !std::isfinite(*cfg.codec.floor_constant))
    throw ConfigError("codec.floor_constant must be finite");

  for (double t : cfg.sweep.temperatures)
    if (!(t > 0.0)) throw ConfigError("sweep.temperatures must be positive");
  for (int k : cfg.sweep.ks) CheckK(k, c.n_classes, "sweep.ks entries");
  for (int m2 : cfg.sweep.size_multipliers)
    if (m2 < 1) throw ConfigError("sweep.size_multipliers must be >= 1");
  if (!(cfg.sweep.size_temperature > 0.0))
    throw ConfigError("sweep.size_temperature must be positive");
  CheckK(cfg.sweep.size_k, c.n_classes, "sweep.size_k");
  if (cfg.sweep.size_noise_bank_size < 0 ||
      (cfg.sweep.size_noise_bank_size > 0 &&
       cfg.sweep.size_noise_bank_size < c.sim.noises_per_utt.second))
    throw ConfigError("sweep.size_noise_bank_size must be 0 or >= the max noises per utterance");
  if (cfg.jobs < 1) throw ConfigError("jobs must be at least 1");
  if (cfg.output_dir.empty()) throw ConfigError("output.dir must not be empty");
}

ExperimentConfig ParseConfig(const std::string& toml_text, const std::string& origin) {
  toml::table root;
  try {
    root = toml::parse(toml_text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
        << e.description();
    throw ConfigError(msg.str());
  }

  ExperimentConfig cfg;
  Section top(&root, "", origin);
  top.Get("seed", cfg.seed);
  top.Get("jobs", cfg.jobs);
  top.Finish();
  static const std::set<std::string> kSections = {"corpus",    "features", "model",
                                                  "teacher",   "student",  "multicond",
                                                  "codec",     "sweep",    "output"};
  for (const auto& [k, v] : root)
    if (v.is_table() && !kSections.count(std::string(k.str())))
      throw ConfigError(origin + ": unknown section [" + std::string(k.str()) + "]");

  {
    Section s(SubTable(root, "corpus", origin), "corpus", origin);
    CorpusSection& c = cfg.corpus;
    s.Get("n_utts", c.n_utts);
    s.Get("n_classes", c.n_classes);
    s.Get("transcribed_fraction", c.transcribed_fraction);
    s.Get("test_utts", c.test_utts);
    s.Get("tokens_per_utt", c.tokens_per_utt);
    s.Get("segment_frames", c.segment_frames);
    s.Get("snr_range_db", c.sim.snr_range_db);
    s.Get("t60_range_s", c.sim.t60_range_s);
    s.Get("noises_per_utt", c.sim.noises_per_utt);
    s.Get("room_x_m", c.sim.room_dim_ranges[0]);
    s.Get("room_y_m", c.sim.room_dim_ranges[1]);
    s.Get("room_z_m", c.sim.room_dim_ranges[2]);
    s.Get("sample_rate", c.sim.sample_rate);
    s.Get("max_order_cap", c.sim.max_order_cap);
    s.Get("noise_bank_size", c.sim.noise_bank_size);
    s.Get("noise_length_s", c.sim.noise_length_s);
    s.Get("speed_of_sound", c.sim.speed_of_sound);
    s.Finish();
  }
  {
    Section s(SubTable(root, "features", origin), "features", origin);
    features::FrontEndConfig& fe = cfg.features;
    s.Get("win_s", fe.win_s);
    s.Get("hop_s", fe.hop_s);
    s.Get("n_fft", fe.n_fft);
    s.Get("n_mels", fe.n_mels);
    s.Get("fmin", fe.fmin);
    s.Get("fmax", fe.fmax);
    s.Finish();
  }
  {
    Section s(SubTable(root, "model", origin), "model", origin);
    net::ArchitectureSpec& m = cfg.model;
    s.Get("context", m.context);
    s.Get("hidden", m.hidden);
    s.Get("recurrent", m.recurrent);
    s.Get("label_delay", m.label_delay);
    s.Get("init_scale", m.init_scale);
    s.Finish();
  }
  for (auto [name, sec] : {std::pair<const char*, TrainSection*>{"teacher", &cfg.teacher},
                           {"multicond", &cfg.multicond}}) {
    Section s(SubTable(root, name, origin), name, origin);
    ReadTrain(s, *sec);
    s.Finish();
  }
  {
    Section s(SubTable(root, "student", origin), "student", origin);
    ReadTrain(s, cfg.student.train);
    s.Get("temperatures", cfg.student.temperatures);
    s.Get("finetune_epochs", cfg.student.finetune_epochs);
    s.Get("finetune_learning_rate", cfg.student.finetune_learning_rate);
    s.Finish();
  }
  {
    Section s(SubTable(root, "codec", origin), "codec", origin);
    s.GetK("k", cfg.codec.k);
    s.Get("temperature", cfg.codec.temperature);
    s.GetFloor("floor_constant", cfg.codec.floor_constant);
    s.Finish();
  }
  {
    Section s(SubTable(root, "sweep", origin), "sweep", origin);
    SweepSection& w = cfg.sweep;
    s.Get("temperatures", w.temperatures);
    s.GetKs("ks", w.ks);
    s.Get("size_multipliers", w.size_multipliers);
    s.Get("size_temperature", w.size_temperature);
    s.GetK("size_k", w.size_k);
    s.Get("size_noise_bank_size", w.size_noise_bank_size);
    s.Finish();
  }
  {
    Section s(SubTable(root, "output", origin), "output", origin);
    std::string dir = cfg.output_dir.string();
    s.Get("dir", dir);
    cfg.output_dir = dir;
    s.Finish();
  }
  Validate(cfg);
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ParseConfig(ss.str(), path.string());
}

std::string DumpConfig(const ExperimentConfig& cfg) {
  const CorpusSection& c = cfg.corpus;
  toml::table root{
      {"seed", static_cast<std::int64_t>(cfg.seed)},
      {"jobs", cfg.jobs},
      {"corpus",
       toml::table{{"n_utts", c.n_utts},
                   {"n_classes", c.n_classes},
                   {"transcribed_fraction", c.transcribed_fraction},
                   {"test_utts", c.test_utts},
                   {"tokens_per_utt", ToArray(c.tokens_per_utt)},
                   {"segment_frames", ToArray(c.segment_frames)},
                   {"snr_range_db", ToArray(c.sim.snr_range_db)},
                   {"t60_range_s", ToArray(c.sim.t60_range_s)},
                   {"noises_per_utt", ToArray(c.sim.noises_per_utt)},
                   {"room_x_m", ToArray(c.sim.room_dim_ranges[0])},
                   {"room_y_m", ToArray(c.sim.room_dim_ranges[1])},
                   {"room_z_m", ToArray(c.sim.room_dim_ranges[2])},
                   {"sample_rate", c.sim.sample_rate},
                   {"max_order_cap", c.sim.max_order_cap},
                   {"noise_bank_size", c.sim.noise_bank_size},
                   {"noise_length_s", c.sim.noise_length_s},
                   {"speed_of_sound", c.sim.speed_of_sound}}},
      {"features",
       toml::table{{"win_s", cfg.features.win_s},
                   {"hop_s", cfg.features.hop_s},
                   {"n_fft", cfg.features.n_fft},
                   {"n_mels", cfg.features.n_mels},
                   {"fmin", cfg.features.fmin},
                   {"fmax", cfg.features.fmax}}},
      {"model",
       toml::table{{"context", cfg.model.context},
                   {"hidden", ToArray(cfg.model.hidden)},
                   {"recurrent", cfg.model.recurrent},
                   {"label_delay", cfg.model.label_delay},
                   {"init_scale", cfg.model.init_scale}}},
      {"teacher", TrainTable(cfg.teacher)},
      {"multicond", TrainTable(cfg.multicond)},
      {"codec", toml::table{{"temperature", cfg.codec.temperature}}},
      {"sweep",
       toml::table{{"temperatures", ToArray(cfg.sweep.temperatures)},
                   {"ks", KArray(cfg.sweep.ks)},
                   {"size_multipliers", ToArray(cfg.sweep.size_multipliers)},
                   {"size_temperature", cfg.sweep.size_temperature},
                   {"size_noise_bank_size", cfg.sweep.size_noise_bank_size}}},
      {"output", toml::table{{"dir", cfg.output_dir.generic_string()}}},
  };
  toml::table student = TrainTable(cfg.student.train);
  student.insert("temperatures", ToArray(cfg.student.temperatures));
  student.insert("finetune_epochs", cfg.student.finetune_epochs);
  student.insert("finetune_learning_rate", cfg.student.finetune_learning_rate);
  root.insert("student", std::move(student));

  toml::table& codec = *root["codec"].as_table();
  if (cfg.codec.k == kMaxK) codec.insert("k", "max");
  else codec.insert("k", cfg.codec.k);
  if (cfg.codec.floor_constant) codec.insert("floor_constant", *cfg.codec.floor_constant);
  else codec.insert("floor_constant", "default");
  toml::table& sweep = *root["sweep"].as_table();
  if (cfg.sweep.size_k == kMaxK) sweep.insert("size_k", "max");
  else sweep.insert("size_k", cfg.sweep.size_k);

  std::ostringstream os;
  os << root << '\n';
  return os.str();
}

net::ArchitectureSpec Architecture(const ExperimentConfig& cfg) {
  net::ArchitectureSpec a = cfg.model;
  a.feat_dim = cfg.features.n_mels;
  a.num_classes = cfg.corpus.n_classes;
  return a;
}

net::TrainConfig ToTrainConfig(const TrainSection& s, std::uint64_t seed, net::LossKind loss,
                               double temperature) {
  net::TrainConfig tc;
  tc.learning_rate = s.learning_rate;
  tc.momentum = s.momentum;
  tc.epochs = s.epochs;
  tc.batch_size = s.batch_size;
  tc.seed = seed;
  tc.loss = loss;
  tc.temperature = temperature;
  tc.max_grad_norm = s.max_grad_norm;
  return tc;
}

Json ToJson(const signal::SimConfig& sim) {
  Json j;
  j["snr_range_db"] = {sim.snr_range_db.first, sim.snr_range_db.second};
  j["t60_range_s"] = {sim.t60_range_s.first, sim.t60_range_s.second};
  j["noises_per_utt"] = {sim.noises_per_utt.first, sim.noises_per_utt.second};
  Json dims = Json::array();
  for (const auto& r : sim.room_dim_ranges) dims.push_back({r.first, r.second});
  j["room_dim_ranges"] = dims;
  j["seed"] = sim.seed;
  j["sample_rate"] = sim.sample_rate;
  j["max_order_cap"] = sim.max_order_cap;
  j["noise_bank_size"] = sim.noise_bank_size;
  j["noise_length_s"] = sim.noise_length_s;
  j["speed_of_sound"] = sim.speed_of_sound;
  return j;
}

Json ToJson(const features::FrontEndConfig& fe) {
  return Json{{"win_s", fe.win_s}, {"hop_s", fe.hop_s}, {"n_fft", fe.n_fft},
              {"n_mels", fe.n_mels}, {"fmin", fe.fmin}, {"fmax", fe.fmax}};
}

Json ToJson(const net::ArchitectureSpec& a) {
  return Json{{"feat_dim", a.feat_dim},       {"context", a.context},
              {"hidden", a.hidden},           {"recurrent", a.recurrent},
              {"num_classes", a.num_classes}, {"label_delay", a.label_delay},
              {"init_scale", a.init_scale}};
}

Json ToJson(const net::TrainConfig& tc) {
  return Json{{"learning_rate", tc.learning_rate},
              {"momentum", tc.momentum},
              {"epochs", tc.epochs},
              {"batch_size", tc.batch_size},
              {"seed", tc.seed},
              {"loss", tc.loss == net::LossKind::kHard ? "hard" : "soft"},
              {"temperature", tc.temperature},
              {"max_grad_norm", tc.max_grad_norm}};
}

}  // namespace tsda::pipeline
