// Copyright 2026 The ospkit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef OSPKIT_EXPERIMENT_H_
#define OSPKIT_EXPERIMENT_H_

#include <optional>
#include <string>
#include <vector>

#include "ospkit/psystem.h"
#include "ospkit/tree.h"

namespace ospkit {

// Largest number of queries any agent receives on one root-to-leaf path.
int MaxQueriesPerAgent(const ImplementationTree& tree);

struct ExperimentInput {
  std::string name;
  Instance instance;
};

struct ExperimentRow {
  std::string instance;
  int d = 0;
  int k = 0;
  bool k_limitable = false;
  Rat worst_ratio;
  int queries_max = 0;  // on the compressed tree
};

// One row per (instance, k). Without explicit ks each instance sweeps
// k = 0 .. ceil(d/2). Rows are sorted by (instance, d, k).
std::vector<ExperimentRow> RunExperiment(
    const std::vector<ExperimentInput>& inputs,
    const std::optional<std::vector<int>>& ks);

inline constexpr const char* kExperimentHeader =
    "instance,d,k,verdict_k_limitable,worst_ratio,queries_max";

std::string ExperimentCsv(const std::vector<ExperimentRow>& rows);

}  // namespace ospkit

#endif  // OSPKIT_EXPERIMENT_H_
