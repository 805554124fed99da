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

#ifndef OSPKIT_SEARCH_H_
#define OSPKIT_SEARCH_H_

#include <cstdint>

#include "ospkit/psystem.h"
#include "ospkit/tree.h"

namespace ospkit {

struct SearchResult {
  bool found = false;
  ImplementationTree tree;  // cost convention, zero payments
  std::int64_t functions_tried = 0;
  std::int64_t states = 0;
};

// Looks for a binary extremal tree that is two-way greedy, k-limitable and
// reaches worst-case ratio >= `target`. Outcome functions meeting the ratio
// are tried in a fixed order; for each one a memoized depth-first search
// over (remaining domains, side history, compressed query counts) decides
// whether such a tree implements it. With `forward_only` an agent may only
// be asked top queries until it is revealable. Exhaustive: found == false
// means no such tree exists. Requires two elements and at most four types.
SearchResult search_two_way_greedy(const PSystem& p, const TypeDomain& d, int k,
                                   const Rat& target,
                                   bool forward_only = false);

}  // namespace ospkit

#endif  // OSPKIT_SEARCH_H_
