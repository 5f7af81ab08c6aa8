// Copyright 2026 The drm Authors
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

#include "drm/dataset_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace drm::learn {

namespace {

nlohmann::json to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Eigen::VectorXd from_json(const nlohmann::json& record, const char* key, int line) {
  const auto it = record.find(key);
  if (it == record.end() || !it->is_array()) {
    throw ParseError(std::string("record is missing array '") + key + "'", line);
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(it->size()));
  for (std::size_t i = 0; i < it->size(); ++i) {
    const auto& x = (*it)[i];
    if (!x.is_number()) throw ParseError(std::string("non-numeric entry in '") + key + "'", line);
    v(static_cast<Eigen::Index>(i)) = x.get<double>();
  }
  return v;
}

}  // namespace

void write_dataset_jsonl(std::ostream& out, const TrajectoryDataset& data) {
  for (const Sample& s : data.samples) {
    nlohmann::ordered_json record;
    record["q"] = to_json(s.q);
    record["qd"] = to_json(s.qd);
    record["qdd"] = to_json(s.qdd);
    record["tau"] = to_json(s.tau);
    out << record.dump() << '\n';
  }
}

void write_dataset_jsonl(const std::string& path, const TrajectoryDataset& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  write_dataset_jsonl(out, data);
  out.flush();
  if (!out) throw Error("write failed: " + path);
}

TrajectoryDataset read_dataset_jsonl(std::istream& in) {
  TrajectoryDataset data;
  std::string line;
  int line_no = 0;
  Eigen::Index n = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("malformed JSON record: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw ParseError("record is not a JSON object", line_no);
    Sample s{from_json(record, "q", line_no), from_json(record, "qd", line_no), from_json(record, "qdd", line_no),
             from_json(record, "tau", line_no)};
    if (n < 0) n = s.q.size();
    for (const auto* v : {&s.q, &s.qd, &s.qdd, &s.tau}) {
      if (v->size() != n) {
        throw Error("line " + std::to_string(line_no) + ": vector length " + std::to_string(v->size()) +
                    " differs from " + std::to_string(n));
      }
    }
    data.samples.push_back(std::move(s));
  }
  return data;
}

TrajectoryDataset read_dataset_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read file: " + path);
  return read_dataset_jsonl(in);
}

}  // namespace drm::learn
