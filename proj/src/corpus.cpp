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

#include "corpus.hpp"

#include <fstream>

#include "json.hpp"

#include "error.hpp"

namespace hsmmattn {

namespace {

using nlohmann::json;

Matrix<double> parse_matrix(const json& j, const std::string& what, int line_number) {
  if (!j.is_array()) {
    throw_error(ErrorCode::kConfig,
                "corpus line " + std::to_string(line_number) + ": " + what + " must be an array");
  }
  const int rows = static_cast<int>(j.size());
  if (rows == 0) return {};
  int cols = -1;
  for (const auto& row : j) {
    require(row.is_array(), ErrorCode::kConfig,
            "corpus line " + std::to_string(line_number) + ": " + what + " rows must be arrays");
    if (cols < 0) cols = static_cast<int>(row.size());
    require(static_cast<int>(row.size()) == cols, ErrorCode::kConfig,
            "corpus line " + std::to_string(line_number) + ": ragged " + what + " matrix");
  }
  Matrix<double> m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      require(j[r][c].is_number(), ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) + ": non-numeric entry in " + what);
      m.at(r, c) = j[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix<double>& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<Utterance> load_corpus(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), ErrorCode::kIo, "cannot open corpus file: " + path);

  std::vector<Utterance> corpus;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw_error(ErrorCode::kConfig, "corpus line " + std::to_string(line_number) +
                                          ": invalid JSON (" + e.what() + ")");
    }
    require(j.is_object(), ErrorCode::kConfig,
            "corpus line " + std::to_string(line_number) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
      (void)value;
      require(key == "id" || key == "units" || key == "frames" || key == "true_durations",
              ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) + ": unknown key '" + key + "'");
    }
    require(j.contains("id") && j["id"].is_string(), ErrorCode::kConfig,
            "corpus line " + std::to_string(line_number) + ": missing string 'id'");
    require(j.contains("units"), ErrorCode::kConfig,
            "corpus line " + std::to_string(line_number) + ": missing 'units'");

    Utterance utt;
    utt.id = j["id"].get<std::string>();
    utt.units = parse_matrix(j["units"], "units", line_number);
    require(utt.units.rows() >= 1, ErrorCode::kConfig,
            "corpus line " + std::to_string(line_number) + ": utterance has no units");
    if (j.contains("frames")) utt.frames = parse_matrix(j["frames"], "frames", line_number);
    if (j.contains("true_durations")) {
      require(j["true_durations"].is_array(), ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) + ": true_durations must be an array");
      for (const auto& d : j["true_durations"]) {
        require(d.is_number_integer() && d.get<int>() >= 1, ErrorCode::kConfig,
                "corpus line " + std::to_string(line_number) +
                    ": true_durations must be positive integers");
        utt.true_durations.push_back(d.get<int>());
      }
      int total = 0;
      for (int d : utt.true_durations) total += d;
      require(total == utt.frames.rows(), ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) +
                  ": true_durations do not sum to the frame count");
      require(static_cast<int>(utt.true_durations.size()) == utt.units.rows(), ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) +
                  ": true_durations length does not match the unit count");
    }
    for (double x : utt.units.data()) {
      require(std::isfinite(x), ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) + ": non-finite unit feature");
    }
    for (double x : utt.frames.data()) {
      require(std::isfinite(x), ErrorCode::kConfig,
              "corpus line " + std::to_string(line_number) + ": non-finite frame feature");
    }
    corpus.push_back(std::move(utt));
  }
  return corpus;
}

void save_corpus(const std::vector<Utterance>& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot write corpus file: " + path);
  for (const auto& utt : corpus) {
    json j;
    j["id"] = utt.id;
    j["units"] = matrix_to_json(utt.units);
    j["frames"] = matrix_to_json(utt.frames);
    if (!utt.true_durations.empty()) j["true_durations"] = utt.true_durations;
    out << j.dump() << '\n';
  }
  require(out.good(), ErrorCode::kIo, "failed while writing corpus file: " + path);
}

}  // namespace hsmmattn
