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

#include "cgcd/io/config_file.h"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cgcd/error.h"

namespace cgcd::io {
namespace {

template <typename T>
T parse_number(const std::string& text, const std::string& key) {
  T value{};
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw ConfigError("invalid value '" + text + "' for " + key);
  }
  return value;
}

template <typename T>
std::string format_number(T value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean '" + text + "' for " + key);
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> out;
  if (text.empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    out.push_back(parse_number<T>(
        b == std::string::npos ? std::string() : item.substr(b, e - b + 1),
        key));
  }
  return out;
}

template <typename T>
std::string format_list(const std::vector<T>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ",";
    out += format_number(values[i]);
  }
  return out;
}

struct Field {
  std::string section;
  std::string key;
  std::function<void(const std::string&, const std::string&)> set;
  std::function<std::string()> get;
};

template <typename T>
Field number(std::string section, std::string key, T& target) {
  return {std::move(section), std::move(key),
          [&target](const std::string& v, const std::string& k) {
            target = parse_number<T>(v, k);
          },
          [&target] { return format_number(target); }};
}

std::vector<Field> fields(ScenarioConfig& c) {
  std::vector<Field> f = {
      number("scenario", "total_classes", c.total_classes),
      number("scenario", "initial_class_fraction", c.initial_class_fraction),
      number("scenario", "initial_data_fraction", c.initial_data_fraction),
      number("scenario", "eval_fraction", c.eval_fraction),
      number("scenario", "steps", c.steps),
      number("scenario", "samples_per_class", c.samples_per_class),
      number("scenario", "cluster_spread", c.cluster_spread),
      number("scenario", "input_dim", c.input_dim),
      number("scenario", "max_mean_cosine", c.max_mean_cosine),
      number("scenario", "seed", c.seed),
      {"scenario", "recall_ks",
       [&c](const std::string& v, const std::string& k) {
         c.recall_ks = parse_list<int>(v, k);
       },
       [&c] { return format_list(c.recall_ks); }},
      {"model", "hidden_dims",
       [&c](const std::string& v, const std::string& k) {
         c.model.hidden_dims = parse_list<std::size_t>(v, k);
       },
       [&c] { return format_list(c.model.hidden_dims); }},
      number("model", "embedding_dim", c.model.embedding_dim),
      {"model", "activation",
       [&c](const std::string& v, const std::string& k) {
         try {
           c.model.activation = parse_activation(v);
         } catch (const std::invalid_argument&) {
           throw ConfigError("invalid value '" + v + "' for " + k);
         }
       },
       [&c] { return std::string(activation_name(c.model.activation)); }},
      number("evt", "tail_size", c.evt.tail_size),
      number("evt", "reject_threshold", c.evt.reject_threshold),
      number("evt", "cover_threshold", c.evt.cover_threshold),
      number("loss", "alpha", c.loss.alpha),
      number("loss", "delta", c.loss.delta),
      number("loss", "pa_weight", c.loss.pa_weight),
      number("loss", "kd_weight", c.loss.kd_weight),
      number("loss", "fr_weight", c.loss.fr_weight),
      {"loss", "negatives",
       [&c](const std::string& v, const std::string& k) {
         if (v == "absent") {
           c.loss.negatives = NegativeProxies::kAbsentFromBatch;
         } else if (v == "all") {
           c.loss.negatives = NegativeProxies::kAll;
         } else {
           throw ConfigError("invalid value '" + v + "' for " + k +
                             " (expected absent or all)");
         }
       },
       [&c] {
         return std::string(c.loss.negatives == NegativeProxies::kAll
                                ? "all"
                                : "absent");
       }},
      {"loss", "kd_sign",
       [&c](const std::string& v, const std::string& k) {
         if (v == "penalty") {
           c.loss.kd_sign = KdSign::kPenalty;
         } else if (v == "literal") {
           c.loss.kd_sign = KdSign::kLiteral;
         } else {
           throw ConfigError("invalid value '" + v + "' for " + k +
                             " (expected penalty or literal)");
         }
       },
       [&c] {
         return std::string(c.loss.kd_sign == KdSign::kLiteral ? "literal"
                                                                : "penalty");
       }},
      number("replay", "sigma", c.replay.sigma),
      number("replay", "samples_per_class", c.replay.samples_per_class),
      number("train", "epochs_pa", c.train.epochs_pa),
      number("train", "epochs_evt", c.train.epochs_evt),
      number("train", "epochs_continual", c.train.epochs_continual),
      number("train", "batch_size", c.train.batch_size),
      number("train", "learning_rate", c.train.learning_rate),
      number("train", "weight_decay", c.train.weight_decay),
      number("train", "seed", c.train.seed),
      {"train", "evt_in_continual",
       [&c](const std::string& v, const std::string& k) {
         c.train.evt_in_continual = parse_bool(v, k);
       },
       [&c] { return std::string(c.train.evt_in_continual ? "true" : "false"); }},
      number("ap", "damping", c.ap.damping),
      {"ap", "preference",
       [&c](const std::string& v, const std::string& k) {
         if (v == "median") {
           c.ap.preference.reset();
         } else {
           c.ap.preference = parse_number<double>(v, k);
         }
       },
       [&c] {
         return c.ap.preference ? format_number(*c.ap.preference)
                                : std::string("median");
       }},
      number("ap", "max_iterations", c.ap.max_iterations),
      number("ap", "convergence_window", c.ap.convergence_window),
  };
  return f;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  ScenarioConfig cfg;
  std::map<std::string, std::map<std::string, Field*>> index;
  std::vector<Field> all = fields(cfg);
  for (Field& f : all) index[f.section][f.key] = &f;

  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("key '" + section + "' is outside any section");
    }
    const auto sec = index.find(section);
    if (sec == index.end()) {
      throw ConfigError("unknown config section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      const auto it = sec->second.find(key);
      if (it == sec->second.end()) {
        throw ConfigError("unknown config key '" + key + "' in [" + section +
                          "]");
      }
      it->second->set(value.data(), section + "." + key);
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ScenarioConfig& cfg) {
  ScenarioConfig copy = cfg;
  std::ostringstream out;
  std::string current;
  for (const Field& f : fields(copy)) {
    if (f.section != current) {
      if (!current.empty()) out << "\n";
      out << "[" << f.section << "]\n";
      current = f.section;
    }
    out << f.key << " = " << f.get() << "\n";
  }
  return out.str();
}

}  // namespace cgcd::io
