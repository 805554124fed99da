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

#ifndef OSPKIT_TREE_TRANSFORM_H_
#define OSPKIT_TREE_TRANSFORM_H_

#include <string>

#include "ospkit/tree.h"
#include "ospkit/verifier.h"

namespace ospkit {

// Splits every query with more than two blocks, or with two blocks neither
// of which is an extreme singleton, into a chain of binary extremal queries.
// Each step peels the domain minimum when its block is no larger than the
// maximum's block, else the maximum.
ImplementationTree serialize(const ImplementationTree& tree);

// Merges every parent/child pair of queries to the same agent.
ImplementationTree compress(const ImplementationTree& tree);

// is_k_limited on the compressed tree.
KLimitedVerdict is_k_limitable(const ImplementationTree& tree, int k);

// Outcome of agent i(u) is 1 on every available profile below the top type
// of D_i(u), or 0 on every available profile above the bottom type.
bool is_revealable(const ImplementationTree& tree, NodeId u);

struct TwoWayVerdict {
  bool pass = true;
  NodeId node = -1;
  int agent = -1;
  std::string reason;
};

// Binary extremal queries; a singleton bottom block gives outcome 1 (greedy
// side), a singleton top block gives outcome 0 (reverse side); an agent
// keeps one side unless revealable. Requires 0/1 outcomes.
TwoWayVerdict is_two_way_greedy(const ImplementationTree& tree);

}  // namespace ospkit

#endif  // OSPKIT_TREE_TRANSFORM_H_
