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

#ifndef OSPKIT_CMON_H_
#define OSPKIT_CMON_H_

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "ospkit/tree.h"

namespace ospkit {

// Which slice of the agent's domain a class draws its types from: the types
// still available at a leaf reached after q <= k+1 queries (J, with j=q+1),
// or, at the (k+2)-th query, the effective types (K2E) or the rest (K2NotE).
struct DomainClassIndex {
  enum Kind { kJ = 0, kK2E = 1, kK2NotE = 2 };
  Kind kind = kJ;
  int j = 1;

  std::string ToString() const;
  auto operator<=>(const DomainClassIndex&) const = default;
};

struct LambdaClass {
  int agent = 0;
  NodeId path = 0;  // (k+2)-th query node of the path, or its leaf
  DomainClassIndex index;
  int outcome_bit = 0;
  std::vector<Profile> members;  // lexicographic
  std::vector<Rat> types;        // distinct member types, ascending
};

// The class rule found several candidate sets of non-effective types.
class ClassConstructionError : public TreeError {
 public:
  ClassConstructionError(NodeId node, const std::string& msg);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

std::vector<LambdaClass> build_lambda_classes(const ImplementationTree& tree,
                                              Horizon k, int agent);

struct OspEdge {
  int from = 0;
  int to = 0;
  Rat weight;
  NodeId node = 0;  // first node (in id order) separating the two classes
};

struct OspGraph {
  int agent = 0;
  Horizon horizon = Horizon::Infinity();
  std::vector<LambdaClass> vertices;  // ordered by (path, index, bit)
  std::vector<OspEdge> edges;         // ordered by (from, to)
};

OspGraph build_k_osp_graph(const ImplementationTree& tree, Horizon k,
                           int agent);

struct CycleWitness {
  std::vector<int> cycle;  // vertex ids; the edge back to the first closes it
  Rat weight;
};

std::optional<CycleWitness> has_negative_cycle(const OspGraph& g);

// Shortest-path distance from the zero-weight super source to each vertex.
// Throws std::logic_error if the graph has a negative cycle.
std::vector<Rat> ShortestPathLabels(const OspGraph& g);

struct PaymentResult {
  bool ok = false;
  ImplementationTree tree;  // input tree with synthesized payments when ok
  int agent = -1;           // agent of the failure
  std::optional<CycleWitness> cycle;
  std::string error;
};

PaymentResult synthesize_payments(const ImplementationTree& tree, Horizon k);

struct StickyVerdict {
  bool pass = true;
  bool skipped = false;  // tree is not k-limited
  int from = -1;
  int to = -1;
  Profile x;
  Profile x2;
  std::string reason;
};

StickyVerdict sticky_edges_check(const ImplementationTree& tree, Horizon k,
                                 int agent);

struct EquivalenceVerdict {
  bool agree = true;
  bool skipped = false;
  int agent = -1;  // first disagreeing agent
  bool k_cycle = false;
  bool inf_cycle = false;
};

EquivalenceVerdict k_vs_infinity_equivalence(const ImplementationTree& tree,
                                             Horizon k);

nlohmann::json GraphToJson(const OspGraph& g);

}  // namespace ospkit

#endif  // OSPKIT_CMON_H_
