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

#include "ospkit/experiment.h"

#include <algorithm>
#include <tuple>

#include "ospkit/greedy.h"
#include "ospkit/tree_transform.h"

namespace ospkit {

namespace {

// Instance names may contain commas, e.g. single_item(3,6).
std::string CsvField(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

int MaxQueriesPerAgent(const ImplementationTree& tree) {
  int best = 0;
  for (const Node& n : tree.nodes) {
    if (!n.leaf) continue;
    for (int i = 0; i < tree.agents; ++i) {
      best = std::max(best, query_count(tree, i, n.id));
    }
  }
  return best;
}

std::vector<ExperimentRow> RunExperiment(
    const std::vector<ExperimentInput>& inputs,
    const std::optional<std::vector<int>>& ks) {
  std::vector<ExperimentRow> rows;
  for (const ExperimentInput& in : inputs) {
    const int d = in.instance.domain.size();
    const ImplementationTree tree =
        extract_tree(in.instance.system, in.instance.domain);
    const Rat ratio = approx_ratio(in.instance.system, tree);
    const int qmax = MaxQueriesPerAgent(compress(tree));
    std::vector<int> sweep;
    if (ks) {
      sweep = *ks;
    } else {
      for (int k = 0; k <= (d + 1) / 2; ++k) sweep.push_back(k);
    }
    for (int k : sweep) {
      rows.push_back(
          {in.name, d, k, is_k_limitable(tree, k).pass, ratio, qmax});
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ExperimentRow& a, const ExperimentRow& b) {
                     return std::tie(a.instance, a.d, a.k) <
                            std::tie(b.instance, b.d, b.k);
                   });
  return rows;
}

std::string ExperimentCsv(const std::vector<ExperimentRow>& rows) {
  std::string out = std::string(kExperimentHeader) + "\n";
  for (const ExperimentRow& r : rows) {
    out += CsvField(r.instance) + "," + std::to_string(r.d) + "," +
           std::to_string(r.k) + "," + (r.k_limitable ? "pass" : "fail") + "," +
           r.worst_ratio.ToString() + "," + std::to_string(r.queries_max) +
           "\n";
  }
  return out;
}

}  // namespace ospkit
