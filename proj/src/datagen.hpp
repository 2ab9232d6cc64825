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
//
// Synthetic corpus generator. Each utterance is a random symbol string;
// unit features are the one-hot symbol identity plus a normalized position
// scalar, and frames repeat the symbol's target vector (plus observation
// noise) for a sampled integer duration. Ground-truth segmentations are
// recorded, which real speech corpora cannot provide.

#ifndef HSMMATTN_DATAGEN_HPP
#define HSMMATTN_DATAGEN_HPP

#include <cstdint>
#include <vector>

#include "corpus.hpp"

namespace hsmmattn {

struct GenSpec {
  int vocab_size = 5;
  int frame_dim = 4;
  double duration_mean = 4.0;  // per-symbol default; override per symbol below
  double duration_std = 1.0;
  int duration_max = 10;  // generator-side clamp on sampled durations
  double noise_std = 0.1;
  double target_spread = 1.5;           // std of sampled symbol targets
  double min_target_separation = 1.0;   // resample until targets are this far apart
  int min_units = 3;
  int max_units = 6;
  uint64_t seed = 0;

  // Optional per-symbol overrides; resolved to vocab_size entries.
  std::vector<double> duration_means;
  std::vector<double> duration_stds;
  std::vector<std::vector<double>> targets;  // vocab_size x frame_dim

  // One-hot symbol plus the position scalar.
  int unit_dim() const { return vocab_size + 1; }

  void validate() const;
};

// The symbol target vectors a spec resolves to: explicit targets when
// given, otherwise sampled from the spec seed with a minimum pairwise
// separation (resampled until separated). Deterministic per spec.
std::vector<std::vector<double>> generator_targets(const GenSpec& spec);

// Generates `count` utterances with ids utt_0000... Deterministic: the same
// spec and count produce identical corpora; each utterance derives its own
// seed, so generation order is immaterial.
std::vector<Utterance> generate_corpus(const GenSpec& spec, int count);

struct BoundaryReport {
  double mean_abs_frame_error = 0.0;
  double within_2_frames_pct = 100.0;
  int num_boundaries = 0;
};

// Compares the K-1 interior segment boundaries (cumulative duration
// positions) of two segmentations over the same K and total length. The
// final cumulative position is the shared total and is not scored.
BoundaryReport boundary_error(const std::vector<int>& predicted_durations,
                              const std::vector<int>& true_durations);

}  // namespace hsmmattn

#endif  // HSMMATTN_DATAGEN_HPP
