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

#ifndef OSPKIT_TREE_INDEX_H_
#define OSPKIT_TREE_INDEX_H_

#include <cstdint>
#include <vector>

#include "ospkit/tree.h"

namespace ospkit {

// Upper bound on enumerated profiles. OSPKIT_SCALE_GUARD overrides it.
std::int64_t ScaleGuard();

// Throws TreeError when `count` exceeds ScaleGuard().
void CheckScale(std::int64_t count, const char* what);

// Profile-enumeration view of a valid tree. Profiles are encoded as integers
// in mixed radix over type indices with agent 0 most significant, so code
// order is lexicographic order. Immutable after construction.
class TreeIndex {
 public:
  // Throws TreeError if the tree is invalid, a domain has more than 64
  // values or the profile count exceeds the scale guard.
  explicit TreeIndex(const ImplementationTree& tree);

  const ImplementationTree& tree() const { return *tree_; }
  int agents() const { return n_; }
  int domain_size(int agent) const { return dsize_[agent]; }
  const Rat& type_value(int agent, int idx) const {
    return tree_->domains[agent].values[idx];
  }
  int num_profiles() const { return num_profiles_; }

  int TypeAt(int code, int agent) const {
    return (code / stride_[agent]) % dsize_[agent];
  }
  int WithType(int code, int agent, int idx) const {
    return code + (idx - TypeAt(code, agent)) * stride_[agent];
  }
  std::vector<int> Decode(int code) const;
  int Encode(const std::vector<int>& idx) const;
  Profile ToProfile(int code) const;
  // Throws TreeError if `p` is not in the root domain box.
  int FromProfile(const Profile& p) const;

  NodeId Leaf(int code) const { return paths_[code].back(); }
  const std::vector<NodeId>& Path(int code) const { return paths_[code]; }
  int Depth(NodeId u) const { return depth_[u]; }
  NodeId Parent(NodeId u) const { return parent_[u]; }
  bool IsLeaf(NodeId u) const { return tree_->nodes[u].leaf; }
  int AgentAt(NodeId u) const { return tree_->nodes[u].agent; }
  // Block slot chosen at internal node u by a profile available at u.
  int SlotAt(int code, NodeId u) const;
  NodeId ChildOnPath(int code, NodeId u) const {
    return paths_[code][depth_[u] + 1];
  }

  const std::vector<int>& ProfilesAt(NodeId u) const { return at_[u]; }
  std::uint64_t Avail(NodeId u, int agent) const {
    return avail_[static_cast<std::size_t>(u) * n_ + agent];
  }
  // Profiles available at u, as codes, restricted to one block slot.
  std::vector<int> ProfilesInSlot(NodeId u, int slot) const;

  const Rat& F(int code, int agent) const {
    return tree_->nodes[Leaf(code)].outcome[agent];
  }
  const Rat& P(int code, int agent) const {
    return tree_->nodes[Leaf(code)].payment[agent];
  }

  // Where the horizon of u ends on the path of `code`: the (k+1)-th later
  // node querying i(u), or the leaf.
  NodeId HorizonEnd(int code, NodeId u, Horizon k) const;

  // Queries to `agent` on the path of `code` (whole path).
  int QueriesOnPath(int code, int agent) const;

  bool IsPrefix(NodeId u) const;
  bool IsSuffix(NodeId u) const;

  const std::vector<NodeId>& Preorder() const { return preorder_; }

 private:
  const ImplementationTree* tree_;
  int n_ = 0;
  std::vector<int> dsize_;
  std::vector<int> stride_;
  int num_profiles_ = 1;
  std::vector<int> depth_;
  std::vector<NodeId> parent_;
  std::vector<std::uint64_t> avail_;
  // slot_[u][type index of i(u)] = block slot, or -1.
  std::vector<std::vector<int>> slot_;
  std::vector<std::vector<NodeId>> paths_;
  std::vector<std::vector<int>> at_;
  std::vector<NodeId> preorder_;
};

// Profiles available at u grouped by where their horizon ends, i.e. the
// gamma classes at u. Groups are ordered by their smallest member; types are
// type indices of the agent queried at u.
struct GammaGroup {
  std::vector<int> members;
  int slot = -1;
  int min_type = 1 << 30;
  int max_type = -1;
};

std::vector<GammaGroup> GammaGroupsAt(const TreeIndex& idx, NodeId u,
                                      Horizon k);

// Bit mask of `values` over the domain of `agent`.
std::uint64_t MaskOf(const ImplementationTree& tree, int agent,
                     const std::vector<Rat>& values);

inline int PopCount(std::uint64_t m) { return __builtin_popcountll(m); }
inline int LowBit(std::uint64_t m) { return __builtin_ctzll(m); }
inline int HighBit(std::uint64_t m) { return 63 - __builtin_clzll(m); }

}  // namespace ospkit

#endif  // OSPKIT_TREE_INDEX_H_
