// Copyright 2026 the hsmmattn authors
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

#include "config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "error.hpp"

namespace hsmmattn {

namespace {

using nlohmann::json;

// Strict object view: every present key must be declared, so typos fail
// fast instead of silently using defaults.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    require(j_.is_object(), ErrorCode::kConfig, "config: " + path_ + " must be an object");
  }

  ~StrictObject() = default;

  void finish(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : j_.items()) {
      (void)value;
      require(allowed.count(key) == 1, ErrorCode::kConfig,
              "config: unknown key '" + path_ + "." + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& raw(const char* key) const { return j_.at(key); }

  template <class T>
  T get(const char* key, T fallback) const {
    if (!j_.contains(key)) return fallback;
    return convert<T>(key);
  }

  template <class T>
  T get_required(const char* key) const {
    require(j_.contains(key), ErrorCode::kConfig,
            "config: missing required key '" + path_ + "." + key + "'");
    return convert<T>(key);
  }

 private:
  template <class T>
  T convert(const char* key) const {
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw_error(ErrorCode::kConfig, "config: wrong type for '" + path_ + "." + key + "'");
    }
  }

  const json& j_;
  std::string path_;
};

GenSpec parse_gen(const json& j, int& count_out) {
  StrictObject obj(j, "gen");
  GenSpec gen;
  gen.seed = obj.get_required<uint64_t>("seed");
  count_out = obj.get<int>("count", 32);
  gen.vocab_size = obj.get<int>("vocab_size", gen.vocab_size);
  gen.frame_dim = obj.get<int>("frame_dim", gen.frame_dim);
  gen.duration_mean = obj.get<double>("duration_mean", gen.duration_mean);
  gen.duration_std = obj.get<double>("duration_std", gen.duration_std);
  gen.duration_max = obj.get<int>("duration_max", gen.duration_max);
  gen.noise_std = obj.get<double>("noise_std", gen.noise_std);
  gen.target_spread = obj.get<double>("target_spread", gen.target_spread);
  gen.min_target_separation =
      obj.get<double>("min_target_separation", gen.min_target_separation);
  gen.min_units = obj.get<int>("min_units", gen.min_units);
  gen.max_units = obj.get<int>("max_units", gen.max_units);
  gen.duration_means = obj.get<std::vector<double>>("duration_means", {});
  gen.duration_stds = obj.get<std::vector<double>>("duration_stds", {});
  gen.targets = obj.get<std::vector<std::vector<double>>>("targets", {});
  obj.finish({"seed", "count", "vocab_size", "frame_dim", "duration_mean", "duration_std",
              "duration_max", "noise_std", "target_spread", "min_target_separation", "min_units",
              "max_units", "duration_means", "duration_stds", "targets"});
  require(count_out >= 1, ErrorCode::kConfig, "config: gen.count must be >= 1");
  gen.validate();
  return gen;
}

NetworkConfig parse_model(const json& j) {
  StrictObject obj(j, "model");
  NetworkConfig model;
  model.context_dim = obj.get<int>("context_dim", model.context_dim);
  model.encoder_hidden = obj.get<std::vector<int>>("encoder_hidden", model.encoder_hidden);
  model.prenet_hidden = obj.get<std::vector<int>>("prenet_hidden", model.prenet_hidden);
  model.core_hidden = obj.get<std::vector<int>>("core_hidden", model.core_hidden);
  model.prior_hidden = obj.get<std::vector<int>>("prior_hidden", model.prior_hidden);
  model.share_prior = obj.get<bool>("share_prior", model.share_prior);
  model.variance_floor = obj.get<double>("variance_floor", model.variance_floor);
  obj.finish({"context_dim", "encoder_hidden", "prenet_hidden", "core_hidden", "prior_hidden",
              "share_prior", "variance_floor"});
  return model;
}

TrainConfig parse_train(const json& j) {
  StrictObject obj(j, "train");
  TrainConfig train;
  train.seed = obj.get_required<uint64_t>("seed");
  train.stage1_epochs = obj.get<int>("stage1_epochs", train.stage1_epochs);
  train.stage2_epochs = obj.get<int>("stage2_epochs", train.stage2_epochs);
  train.stage3_epochs = obj.get<int>("stage3_epochs", train.stage3_epochs);
  train.adam.step_size = obj.get<double>("step_size", train.adam.step_size);
  train.adam.beta1 = obj.get<double>("beta1", train.adam.beta1);
  train.adam.beta2 = obj.get<double>("beta2", train.adam.beta2);
  train.adam.epsilon = obj.get<double>("epsilon", train.adam.epsilon);
  train.batch_size = obj.get<int>("batch_size", train.batch_size);
  train.grad_clip_norm = obj.get<double>("grad_clip_norm", train.grad_clip_norm);
  train.duration_cap = obj.get<int>("duration_cap", train.duration_cap);
  obj.finish({"seed", "stage1_epochs", "stage2_epochs", "stage3_epochs", "step_size", "beta1",
              "beta2", "epsilon", "batch_size", "grad_clip_norm", "duration_cap"});
  require(train.stage1_epochs >= 0 && train.stage2_epochs >= 0 && train.stage3_epochs >= 0,
          ErrorCode::kConfig, "config: stage epoch counts must be >= 0");
  require(train.adam.step_size > 0.0, ErrorCode::kConfig, "config: step_size must be positive");
  require(train.batch_size >= 0, ErrorCode::kConfig, "config: batch_size must be >= 0");
  require(train.grad_clip_norm >= 0.0, ErrorCode::kConfig,
          "config: grad_clip_norm must be >= 0");
  require(train.duration_cap >= 0, ErrorCode::kConfig, "config: duration_cap must be >= 0");
  return train;
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw_error(ErrorCode::kConfig, std::string("config: invalid JSON (") + e.what() + ")");
  }
  StrictObject root(doc, "");
  RunConfig config;
  config.schema_version = root.get_required<int>("schema_version");
  require(config.schema_version == 1, ErrorCode::kConfig,
          "config: unsupported schema_version " + std::to_string(config.schema_version) +
              " (expected 1)");
  require(root.has("gen"), ErrorCode::kConfig, "config: missing 'gen' section");
  require(root.has("train"), ErrorCode::kConfig, "config: missing 'train' section");
  config.gen = parse_gen(root.raw("gen"), config.gen_count);
  if (root.has("model")) config.model = parse_model(root.raw("model"));
  config.train = parse_train(root.raw("train"));
  root.finish({"schema_version", "gen", "model", "train"});

  config.model.unit_dim = config.gen.unit_dim();
  config.model.frame_dim = config.gen.frame_dim;
  ModelShapes::build(config.model);  // validates widths and dimensions
  return config;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kConfig, "cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_run_config(buffer.str());
}

std::string apply_config_overrides(const std::string& json_text,
                                   const std::vector<std::string>& assignments) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw_error(ErrorCode::kConfig, std::string("config: invalid JSON (") + e.what() + ")");
  }
  for (const std::string& assignment : assignments) {
    const size_t eq = assignment.find('=');
    require(eq != std::string::npos && eq > 0, ErrorCode::kConfig,
            "override must look like key.path=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);
    json value;
    try {
      value = json::parse(value_text);
    } catch (const json::parse_error&) {
      value = value_text;  // bare strings are allowed
    }
    json* node = &doc;
    size_t begin = 0;
    while (true) {
      const size_t dot = path.find('.', begin);
      const std::string key = path.substr(begin, dot == std::string::npos ? dot : dot - begin);
      require(!key.empty(), ErrorCode::kConfig, "override has an empty path segment: " + assignment);
      if (dot == std::string::npos) {
        (*node)[key] = value;
        break;
      }
      node = &(*node)[key];
      begin = dot + 1;
    }
  }
  return doc.dump(2);
}

}  // namespace hsmmattn
