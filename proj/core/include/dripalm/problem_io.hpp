// Copyright 2026 The dripalm Authors
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

// On-disk layout of a ProblemInstance: a directory holding `problem.ini`
// (family, lambda, lambda_c, seed, dimensions) and one binary matrix file per
// agent and role, plus x_true when present.

#pragma once

#include <filesystem>
#include <iosfwd>

#include "dripalm/objectives.hpp"

namespace dripalm {

/// Binary dense matrix: 8-byte magic "DRMAT001", uint64 rows, uint64 cols
/// (little endian), then rows*cols row-major IEEE doubles.
void write_matrix_binary(std::ostream& out, const Matrix& m);
Matrix read_matrix_binary(std::istream& in);

void save_problem(const ProblemInstance& problem,
                  const std::filesystem::path& dir);
/// Rebuilds the per-agent oracles from the stored data.
ProblemInstance load_problem(const std::filesystem::path& dir);

}  // namespace dripalm
