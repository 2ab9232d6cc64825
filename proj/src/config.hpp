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

#ifndef HSMMATTN_CONFIG_HPP
#define HSMMATTN_CONFIG_HPP

#include <cstdint>
#include <string>

#include "adam.hpp"
#include "datagen.hpp"
#include "networks.hpp"

namespace hsmmattn {

struct TrainConfig {
  int stage1_epochs = 200;  // encoder maximum-likelihood stage
  int stage2_epochs = 100;  // decoder-only stage, encoder frozen
  int stage3_epochs = 200;  // joint bound maximization
  AdamConfig adam;
  int batch_size = 0;  // 0 = full corpus per step
  uint64_t seed = 0;
  double grad_clip_norm = 5.0;  // global-norm clip, stage 3 only; 0 disables
  int duration_cap = 0;         // 0 = auto (mean + 5 sigma policy)
};

// One JSON document drives every command. Unknown keys and schema version
// mismatches are rejected outright. gen.seed and train.seed are the only
// required fields; everything else has defaults.
struct RunConfig {
  int schema_version = 1;
  GenSpec gen;
  int gen_count = 32;  // gen.count: utterances written by gen-data
  NetworkConfig model;  // dims are filled in from the gen section
  TrainConfig train;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Applies dotted-path assignments like "train.seed=7" or
// "model.encoder_hidden=[32,32]" to a config document before parsing.
// Values are parsed as JSON when possible, otherwise taken as strings.
std::string apply_config_overrides(const std::string& json_text,
                                   const std::vector<std::string>& assignments);

}  // namespace hsmmattn

#endif  // HSMMATTN_CONFIG_HPP
