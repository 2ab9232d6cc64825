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

#include "datagen.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "error.hpp"

namespace hsmmattn {

namespace {

// splitmix64: cheap, well-mixed per-utterance seed derivation.
uint64_t mix_seed(uint64_t seed, uint64_t index) {
  uint64_t z = seed + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double min_pairwise_distance(const std::vector<std::vector<double>>& targets) {
  double best = std::numeric_limits<double>::infinity();
  for (size_t a = 0; a < targets.size(); ++a) {
    for (size_t b = a + 1; b < targets.size(); ++b) {
      double sq = 0.0;
      for (size_t j = 0; j < targets[a].size(); ++j) {
        const double d = targets[a][j] - targets[b][j];
        sq += d * d;
      }
      best = std::min(best, std::sqrt(sq));
    }
  }
  return best;
}

}  // namespace

void GenSpec::validate() const {
  require(vocab_size >= 1, ErrorCode::kConfig, "gen: vocab_size must be >= 1");
  require(frame_dim >= 1, ErrorCode::kConfig, "gen: frame_dim must be >= 1");
  require(duration_max >= 1, ErrorCode::kConfig, "gen: duration_max must be >= 1");
  require(duration_mean > 0.0, ErrorCode::kConfig, "gen: duration_mean must be positive");
  require(duration_std >= 0.0, ErrorCode::kConfig, "gen: duration_std must be >= 0");
  require(noise_std >= 0.0, ErrorCode::kConfig, "gen: noise_std must be >= 0");
  require(min_units >= 1 && max_units >= min_units, ErrorCode::kConfig,
          "gen: need 1 <= min_units <= max_units");
  require(duration_means.empty() || static_cast<int>(duration_means.size()) == vocab_size,
          ErrorCode::kConfig, "gen: duration_means must have one entry per symbol");
  require(duration_stds.empty() || static_cast<int>(duration_stds.size()) == vocab_size,
          ErrorCode::kConfig, "gen: duration_stds must have one entry per symbol");
  if (!targets.empty()) {
    require(static_cast<int>(targets.size()) == vocab_size, ErrorCode::kConfig,
            "gen: targets must have one row per symbol");
    for (const auto& row : targets) {
      require(static_cast<int>(row.size()) == frame_dim, ErrorCode::kConfig,
              "gen: each target row must have frame_dim entries");
    }
  }
}

std::vector<std::vector<double>> generator_targets(const GenSpec& spec) {
  spec.validate();
  if (!spec.targets.empty()) return spec.targets;

  std::mt19937_64 rng(mix_seed(spec.seed, 0));
  std::normal_distribution<double> dist(0.0, spec.target_spread);
  std::vector<std::vector<double>> targets(spec.vocab_size, std::vector<double>(spec.frame_dim));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (auto& row : targets) {
      for (double& x : row) x = dist(rng);
    }
    if (spec.vocab_size == 1 || min_pairwise_distance(targets) >= spec.min_target_separation) {
      return targets;
    }
  }
  throw_error(ErrorCode::kConfig,
              "gen: could not sample symbol targets with the requested separation; "
              "raise target_spread or lower min_target_separation");
}

std::vector<Utterance> generate_corpus(const GenSpec& spec, int count) {
  spec.validate();
  require(count >= 1, ErrorCode::kConfig, "gen: count must be >= 1");

  const auto targets = generator_targets(spec);
  const auto means = spec.duration_means.empty()
                         ? std::vector<double>(spec.vocab_size, spec.duration_mean)
                         : spec.duration_means;
  const auto stds = spec.duration_stds.empty()
                        ? std::vector<double>(spec.vocab_size, spec.duration_std)
                        : spec.duration_stds;

  std::vector<Utterance> corpus;
  corpus.reserve(count);
  for (int u = 0; u < count; ++u) {
    std::mt19937_64 rng(mix_seed(spec.seed, static_cast<uint64_t>(u) + 1));
    std::uniform_int_distribution<int> unit_count_dist(spec.min_units, spec.max_units);
    std::uniform_int_distribution<int> symbol_dist(0, spec.vocab_size - 1);
    std::normal_distribution<double> noise(0.0, 1.0);

    Utterance utt;
    char id[16];
    std::snprintf(id, sizeof(id), "utt_%04d", u);
    utt.id = id;

    const int num_units = unit_count_dist(rng);
    std::vector<int> symbols(num_units);
    for (int& s : symbols) s = symbol_dist(rng);

    utt.units = Matrix<double>(num_units, spec.unit_dim(), 0.0);
    utt.true_durations.resize(num_units);
    int total_frames = 0;
    for (int k = 0; k < num_units; ++k) {
      utt.units.at(k, symbols[k]) = 1.0;
      utt.units.at(k, spec.vocab_size) =
          (num_units == 1) ? 0.0 : static_cast<double>(k) / (num_units - 1);
      const double sampled = means[symbols[k]] + stds[symbols[k]] * noise(rng);
      utt.true_durations[k] =
          std::clamp(static_cast<int>(std::lround(sampled)), 1, spec.duration_max);
      total_frames += utt.true_durations[k];
    }

    utt.frames = Matrix<double>(total_frames, spec.frame_dim);
    int t = 0;
    for (int k = 0; k < num_units; ++k) {
      for (int i = 0; i < utt.true_durations[k]; ++i, ++t) {
        for (int j = 0; j < spec.frame_dim; ++j) {
          utt.frames.at(t, j) = targets[symbols[k]][j] + spec.noise_std * noise(rng);
        }
      }
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

BoundaryReport boundary_error(const std::vector<int>& predicted_durations,
                              const std::vector<int>& true_durations) {
  require(predicted_durations.size() == true_durations.size(), ErrorCode::kInvalidArgument,
          "boundary_error: segmentations have different state counts");
  int predicted_total = 0, true_total = 0;
  for (int d : predicted_durations) predicted_total += d;
  for (int d : true_durations) true_total += d;
  require(predicted_total == true_total, ErrorCode::kInvalidArgument,
          "boundary_error: segmentations cover different totals (" +
              std::to_string(predicted_total) + " vs " + std::to_string(true_total) + ")");

  BoundaryReport report;
  report.num_boundaries = static_cast<int>(true_durations.size()) - 1;
  if (report.num_boundaries <= 0) return report;

  int hits = 0;
  double abs_sum = 0.0;
  int predicted_cum = 0, true_cum = 0;
  for (int k = 0; k < report.num_boundaries; ++k) {
    predicted_cum += predicted_durations[k];
    true_cum += true_durations[k];
    const int offset = std::abs(predicted_cum - true_cum);
    abs_sum += offset;
    if (offset <= 2) ++hits;
  }
  report.mean_abs_frame_error = abs_sum / report.num_boundaries;
  report.within_2_frames_pct = 100.0 * hits / report.num_boundaries;
  return report;
}

}  // namespace hsmmattn
