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

#ifndef OSPKIT_TREE_H_
#define OSPKIT_TREE_H_

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ospkit/rational.h"

namespace ospkit {

using NodeId = int;
using Profile = std::vector<Rat>;

// Ordered finite type set of one agent. Values are strictly increasing.
struct TypeDomain {
  std::vector<Rat> values;

  int size() const { return static_cast<int>(values.size()); }
  // Position of `t` in `values`, or -1.
  int IndexOf(const Rat& t) const;
  bool operator==(const TypeDomain&) const = default;
};

// Planning horizon: a non-negative integer or infinity.
class Horizon {
 public:
  static Horizon Finite(int k);
  static Horizon Infinity() { return Horizon(); }
  // "inf", "infinity" or a non-negative integer.
  static Horizon Parse(const std::string& text);

  bool infinite() const { return infinite_; }
  int k() const;
  std::string ToString() const;

  friend bool operator==(const Horizon&, const Horizon&) = default;
  friend bool operator<(const Horizon& a, const Horizon& b) {
    if (a.infinite_) return false;
    if (b.infinite_) return true;
    return a.k_ < b.k_;
  }

 private:
  Horizon() = default;
  bool infinite_ = true;
  int k_ = 0;
};

// One node of a round-table implementation tree. Query nodes carry agent,
// blocks and children; leaves carry outcome and payment vectors.
struct Node {
  NodeId id = 0;
  bool leaf = true;
  int agent = -1;
  std::vector<std::vector<Rat>> blocks;
  std::vector<NodeId> children;
  std::vector<Rat> outcome;
  std::vector<Rat> payment;

  bool operator==(const Node&) const = default;
};

// The mechanism (f, p, T). `nodes[id].id == id` for every node.
struct ImplementationTree {
  int agents = 0;
  std::vector<TypeDomain> domains;
  NodeId root = 0;
  std::vector<Node> nodes;

  const Node& node(NodeId id) const { return nodes.at(id); }
  int size() const { return static_cast<int>(nodes.size()); }
  bool operator==(const ImplementationTree&) const = default;
};

struct Diagnostic {
  NodeId node = -1;  // -1 for tree-level problems
  std::string rule;
  std::string detail;
};

// Empty iff every structural invariant holds.
std::vector<Diagnostic> validate_tree(const ImplementationTree& tree);

// Renumbers nodes in pre-order from the root and sorts block values.
// Unreachable nodes are dropped.
ImplementationTree Canonicalize(const ImplementationTree& tree);

// True iff every leaf outcome entry is 0 or 1.
bool HasBinaryOutcomes(const ImplementationTree& tree);

// Thrown for malformed input to the tree operations.
class TreeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LeafResult {
  NodeId leaf = -1;
  std::vector<Rat> outcome;
  std::vector<Rat> payment;
};

LeafResult leaf_of(const ImplementationTree& tree, const Profile& b);

// Number of queries to `agent` on the root-to-`leaf` path.
int query_count(const ImplementationTree& tree, int agent, NodeId leaf);

struct Neighborhood {
  std::vector<NodeId> nodes;  // N_k(u), sorted
  std::vector<NodeId> limit;  // L_k(u), sorted
};

// The horizon of u ends, on each branch, at the (k+1)-th node after u that
// queries i(u), or at the leaf. `limit` holds those end nodes and `nodes`
// everything strictly between u and them. Divergence inside `nodes` (or at u)
// separates two profiles.
Neighborhood k_step_neighborhood(const ImplementationTree& tree, NodeId u,
                                 Horizon k);

// All profiles available at u that are not separated from `a` at u or inside
// the horizon of u. Sorted lexicographically by type index.
std::vector<Profile> gamma_class(const ImplementationTree& tree, NodeId u,
                                 const Profile& a, Horizon k);

}  // namespace ospkit

#endif  // OSPKIT_TREE_H_
