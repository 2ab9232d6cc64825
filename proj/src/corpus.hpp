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

#ifndef HSMMATTN_CORPUS_HPP
#define HSMMATTN_CORPUS_HPP

#include <string>
#include <vector>

#include "matrix.hpp"

namespace hsmmattn {

// One paired example: unit features (one row per input unit) and frame
// features (one row per output frame). true_durations, when present, is the
// generator's ground-truth segmentation and is never shown to training.
struct Utterance {
  std::string id;
  Matrix<double> units;   // K x F_l
  Matrix<double> frames;  // T x F_o (may have zero rows for synthesis input)
  std::vector<int> true_durations;

  int num_units() const { return units.rows(); }
  int num_frames() const { return frames.rows(); }
};

// JSON Lines corpus files: one utterance per line,
// {"id": ..., "units": [[...]], "frames": [[...]], "true_durations": [...]}.
// Unknown keys are rejected; parse errors name the offending line.
std::vector<Utterance> load_corpus(const std::string& path);
void save_corpus(const std::vector<Utterance>& corpus, const std::string& path);

}  // namespace hsmmattn

#endif  // HSMMATTN_CORPUS_HPP
