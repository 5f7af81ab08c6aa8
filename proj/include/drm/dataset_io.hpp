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

// JSON Lines trajectory files, one record per line:
//   {"q":[...],"qd":[...],"qdd":[...],"tau":[...]}

#pragma once

#include <iosfwd>
#include <string>

#include "drm/learn.hpp"

namespace drm::learn {

void write_dataset_jsonl(std::ostream& out, const TrajectoryDataset& data);
void write_dataset_jsonl(const std::string& path, const TrajectoryDataset& data);

// Throws ParseError (with the 1-based line number) on malformed records and
// Error when vector lengths differ between or within records. Blank lines
// are skipped.
TrajectoryDataset read_dataset_jsonl(std::istream& in);
TrajectoryDataset read_dataset_jsonl(const std::string& path);

}  // namespace drm::learn
