/*
 * Copyright 2026 The DGCDR Toolkit Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "dgcdr_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "dgcdr/errors.hpp"

namespace dgcdr::cli {
namespace {

namespace pt = boost::property_tree;

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + text + "'");
  }
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError("config key '" + key + "' expects a non-negative integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  throw ConfigError("config key '" + key + "' expects true/false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F fmt) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ",";
    out += fmt(values[k]);
  }
  return out;
}

const std::vector<std::string>& train_numeric_keys() {
  static const std::vector<std::string> keys{
      "dim",         "layers",     "lr",         "l2",       "dropout",   "tau",
      "lambda_en",   "lambda_de",  "lambda_item", "batch_size", "patience", "max_epochs",
      "monitor_k"};
  return keys;
}

int as_int(const std::string& key, double v) {
  if (v != static_cast<double>(static_cast<int>(v))) {
    throw ConfigError("train key '" + key + "' must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

void set_train_field(TrainConfig& cfg, const std::string& key, double v) {
  if (key == "dim") cfg.dim = as_int(key, v);
  else if (key == "layers") cfg.layers = as_int(key, v);
  else if (key == "lr") cfg.lr = v;
  else if (key == "l2") cfg.l2 = v;
  else if (key == "dropout") cfg.dropout = v;
  else if (key == "tau") cfg.tau = v;
  else if (key == "lambda_en") cfg.lambda_en = v;
  else if (key == "lambda_de") cfg.lambda_de = v;
  else if (key == "lambda_item") cfg.lambda_item = v;
  else if (key == "batch_size") cfg.batch_size = as_int(key, v);
  else if (key == "patience") cfg.patience = as_int(key, v);
  else if (key == "max_epochs") cfg.max_epochs = as_int(key, v);
  else if (key == "monitor_k") cfg.monitor_k = as_int(key, v);
  else throw ConfigError("unknown train key '" + key + "'");
}

double get_train_field(const TrainConfig& cfg, const std::string& key) {
  if (key == "dim") return cfg.dim;
  if (key == "layers") return cfg.layers;
  if (key == "lr") return cfg.lr;
  if (key == "l2") return cfg.l2;
  if (key == "dropout") return cfg.dropout;
  if (key == "tau") return cfg.tau;
  if (key == "lambda_en") return cfg.lambda_en;
  if (key == "lambda_de") return cfg.lambda_de;
  if (key == "lambda_item") return cfg.lambda_item;
  if (key == "batch_size") return cfg.batch_size;
  if (key == "patience") return cfg.patience;
  if (key == "max_epochs") return cfg.max_epochs;
  if (key == "monitor_k") return cfg.monitor_k;
  throw ConfigError("unknown train key '" + key + "'");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  for (const auto& item : split_list(text)) out.push_back(static_cast<int>(to_integer("k", item)));
  if (out.empty()) throw ConfigError("empty integer list");
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg;
  static const std::set<std::string> sections{"data", "split", "train", "eval", "sweep", "export"};
  for (const auto& [section, body] : tree) {
    if (!sections.count(section)) throw ConfigError("unknown config section [" + section + "]");
    for (const auto& [key, node] : body) {
      const std::string value = node.get_value<std::string>();
      const std::string full = section + "." + key;
      if (section == "data") {
        if (key == "domain_a") cfg.domain_a = value;
        else if (key == "domain_b") cfg.domain_b = value;
        else if (key == "dataset_dir") cfg.dataset_dir = value;
        else if (key == "n_core") cfg.n_core = static_cast<unsigned>(to_unsigned(full, value));
        else throw ConfigError("unknown config key " + full);
      } else if (section == "split") {
        if (key == "target") cfg.split.target = parse_domain(value);
        else if (key == "target_train") cfg.split.target_train = to_double(full, value);
        else if (key == "target_valid") cfg.split.target_valid = to_double(full, value);
        else if (key == "target_test") cfg.split.target_test = to_double(full, value);
        else if (key == "source_train") cfg.split.source_train = to_double(full, value);
        else if (key == "source_valid") cfg.split.source_valid = to_double(full, value);
        else if (key == "seed") cfg.split.seed = to_unsigned(full, value);
        else throw ConfigError("unknown config key " + full);
      } else if (section == "train") {
        if (key == "ablation") cfg.train.ablation = AblationFlags::parse(value);
        else if (key == "seeds") {
          cfg.seeds.clear();
          for (const auto& s : split_list(value)) cfg.seeds.push_back(to_unsigned(full, s));
        } else {
          set_train_field(cfg.train, key, to_double(full, value));
        }
      } else if (section == "eval") {
        if (key == "k") cfg.ks = parse_int_list(value);
        else if (key == "candidates") cfg.candidates = static_cast<int>(to_integer(full, value));
        else throw ConfigError("unknown config key " + full);
      } else if (section == "sweep") {
        if (key == "workers") {
          cfg.workers = static_cast<int>(to_integer(full, value));
        } else {
          get_train_field(cfg.train, key);  // validates the axis name
          std::vector<double> values;
          for (const auto& v : split_list(value)) values.push_back(to_double(full, v));
          cfg.sweep_axes[key] = values;
        }
      } else {
        if (key == "out") cfg.out = value;
        else if (key == "attention") cfg.export_attention = to_bool(full, value);
        else if (key == "embeddings") cfg.export_embeddings = to_bool(full, value);
        else throw ConfigError("unknown config key " + full);
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
  pt::ptree tree;
  tree.put("data.domain_a", domain_a.string());
  tree.put("data.domain_b", domain_b.string());
  tree.put("data.dataset_dir", dataset_dir.string());
  tree.put("data.n_core", std::to_string(n_core));
  tree.put("split.target", std::string(1, domain_letter(split.target)));
  tree.put("split.target_train", fmt_double(split.target_train));
  tree.put("split.target_valid", fmt_double(split.target_valid));
  tree.put("split.target_test", fmt_double(split.target_test));
  tree.put("split.source_train", fmt_double(split.source_train));
  tree.put("split.source_valid", fmt_double(split.source_valid));
  tree.put("split.seed", std::to_string(split.seed));
  for (const auto& key : train_numeric_keys()) {
    tree.put("train." + key, fmt_double(get_train_field(train, key)));
  }
  tree.put("train.ablation", train.ablation.to_string());
  tree.put("train.seeds", join(seeds, [](std::uint64_t s) { return std::to_string(s); }));
  tree.put("eval.k", join(ks, [](int k) { return std::to_string(k); }));
  tree.put("eval.candidates", std::to_string(candidates));
  tree.put("sweep.workers", std::to_string(workers));
  for (const auto& [axis, values] : sweep_axes) tree.put("sweep." + axis, join(values, fmt_double));
  tree.put("export.out", out.string());
  tree.put("export.attention", export_attention ? "true" : "false");
  tree.put("export.embeddings", export_embeddings ? "true" : "false");
  std::ostringstream os;
  pt::write_ini(os, tree);
  return os.str();
}

void ExperimentConfig::validate() const {
  split.validate();
  train.validate();
  if (n_core == 0) throw ConfigError("n_core must be >= 1");
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (ks.empty()) throw ConfigError("at least one cutoff k is required");
  for (int k : ks) {
    if (k < 1) throw ConfigError("cutoff k must be >= 1");
  }
  if (candidates < 0) throw ConfigError("candidates must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  for (const auto& [axis, values] : sweep_axes) {
    if (values.empty()) throw ConfigError("sweep axis '" + axis + "' has no values");
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  const auto split_eq = [](const SplitSpec& x, const SplitSpec& y) {
    return x.target == y.target && x.target_train == y.target_train &&
           x.target_valid == y.target_valid && x.target_test == y.target_test &&
           x.source_train == y.source_train && x.source_valid == y.source_valid &&
           x.seed == y.seed;
  };
  if (!(a.domain_a == b.domain_a && a.domain_b == b.domain_b && a.dataset_dir == b.dataset_dir &&
        a.n_core == b.n_core && split_eq(a.split, b.split) && a.seeds == b.seeds &&
        a.ks == b.ks && a.candidates == b.candidates && a.sweep_axes == b.sweep_axes &&
        a.workers == b.workers && a.out == b.out && a.export_attention == b.export_attention &&
        a.export_embeddings == b.export_embeddings &&
        a.train.ablation == b.train.ablation && a.train.seed == b.train.seed)) {
    return false;
  }
  for (const auto& key : train_numeric_keys()) {
    if (get_train_field(a.train, key) != get_train_field(b.train, key)) return false;
  }
  return true;
}

}  // namespace dgcdr::cli
