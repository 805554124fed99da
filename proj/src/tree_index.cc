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

#include "ospkit/tree_index.h"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <string>

namespace ospkit {

std::int64_t ScaleGuard() {
  const char* env = std::getenv("OSPKIT_SCALE_GUARD");
  if (env != nullptr && *env != '\0') {
    try {
      long long v = std::stoll(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  return 100000;
}

void CheckScale(std::int64_t count, const char* what) {
  if (count > ScaleGuard()) {
    throw TreeError(std::string(what) + ": " + std::to_string(count) +
                    " exceeds the scale guard of " +
                    std::to_string(ScaleGuard()) +
                    " (set OSPKIT_SCALE_GUARD to raise it)");
  }
}

std::uint64_t MaskOf(const ImplementationTree& tree, int agent,
                     const std::vector<Rat>& values) {
  std::uint64_t m = 0;
  for (const Rat& t : values) {
    int j = tree.domains[agent].IndexOf(t);
    if (j < 0) throw TreeError("value " + t.ToString() + " not in domain");
    m |= std::uint64_t{1} << j;
  }
  return m;
}

TreeIndex::TreeIndex(const ImplementationTree& tree) : tree_(&tree) {
  auto diags = validate_tree(tree);
  if (!diags.empty()) {
    const auto& d = diags.front();
    throw TreeError("invalid tree: node " + std::to_string(d.node) + ": " +
                    d.rule + (d.detail.empty() ? "" : " (" + d.detail + ")"));
  }
  n_ = tree.agents;
  dsize_.resize(n_);
  stride_.assign(n_, 1);
  std::int64_t total = 1;
  for (int i = 0; i < n_; ++i) {
    dsize_[i] = tree.domains[i].size();
    if (dsize_[i] > 64) throw TreeError("domain larger than 64 types");
    total *= dsize_[i];
    CheckScale(total, "profile count");
  }
  num_profiles_ = static_cast<int>(total);
  for (int i = n_ - 2; i >= 0; --i) stride_[i] = stride_[i + 1] * dsize_[i + 1];

  const int m = tree.size();
  depth_.assign(m, 0);
  parent_.assign(m, -1);
  avail_.assign(static_cast<std::size_t>(m) * n_, 0);
  slot_.assign(m, {});
  for (int i = 0; i < n_; ++i) {
    avail_[static_cast<std::size_t>(tree.root) * n_ + i] =
        dsize_[i] == 64 ? ~std::uint64_t{0}
                        : (std::uint64_t{1} << dsize_[i]) - 1;
  }
  std::vector<NodeId> stack{tree.root};
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    preorder_.push_back(u);
    const Node& nd = tree.nodes[u];
    if (nd.leaf) continue;
    slot_[u].assign(dsize_[nd.agent], -1);
    for (std::size_t s = 0; s < nd.blocks.size(); ++s) {
      NodeId c = nd.children[s];
      depth_[c] = depth_[u] + 1;
      parent_[c] = u;
      std::uint64_t bm = MaskOf(tree, nd.agent, nd.blocks[s]);
      for (int i = 0; i < n_; ++i) {
        avail_[static_cast<std::size_t>(c) * n_ + i] =
            i == nd.agent ? bm : Avail(u, i);
      }
      for (std::uint64_t r = bm; r; r &= r - 1) slot_[u][LowBit(r)] = s;
    }
    for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) {
      stack.push_back(*it);
    }
  }

  paths_.resize(num_profiles_);
  at_.assign(m, {});
  for (int code = 0; code < num_profiles_; ++code) {
    auto& path = paths_[code];
    NodeId cur = tree.root;
    for (;;) {
      path.push_back(cur);
      at_[cur].push_back(code);
      const Node& nd = tree.nodes[cur];
      if (nd.leaf) break;
      cur = nd.children[slot_[cur][TypeAt(code, nd.agent)]];
    }
  }
}

std::vector<int> TreeIndex::Decode(int code) const {
  std::vector<int> out(n_);
  for (int i = 0; i < n_; ++i) out[i] = TypeAt(code, i);
  return out;
}

int TreeIndex::Encode(const std::vector<int>& idx) const {
  int code = 0;
  for (int i = 0; i < n_; ++i) code += idx[i] * stride_[i];
  return code;
}

Profile TreeIndex::ToProfile(int code) const {
  Profile p(n_);
  for (int i = 0; i < n_; ++i) p[i] = type_value(i, TypeAt(code, i));
  return p;
}

int TreeIndex::FromProfile(const Profile& p) const {
  if (static_cast<int>(p.size()) != n_) {
    throw TreeError("profile has " + std::to_string(p.size()) +
                    " types, expected " + std::to_string(n_));
  }
  std::vector<int> idx(n_);
  for (int i = 0; i < n_; ++i) {
    idx[i] = tree_->domains[i].IndexOf(p[i]);
    if (idx[i] < 0) {
      throw TreeError("type " + p[i].ToString() + " of agent " +
                      std::to_string(i) + " is outside its domain");
    }
  }
  return Encode(idx);
}

int TreeIndex::SlotAt(int code, NodeId u) const {
  return slot_[u][TypeAt(code, AgentAt(u))];
}

std::vector<int> TreeIndex::ProfilesInSlot(NodeId u, int slot) const {
  std::vector<int> out;
  for (int code : at_[u]) {
    if (SlotAt(code, u) == slot) out.push_back(code);
  }
  return out;
}

NodeId TreeIndex::HorizonEnd(int code, NodeId u, Horizon k) const {
  const auto& path = paths_[code];
  const int agent = AgentAt(u);
  if (k.infinite()) return path.back();
  int seen = 0;
  for (std::size_t j = depth_[u] + 1; j + 1 < path.size(); ++j) {
    if (AgentAt(path[j]) == agent && ++seen == k.k() + 1) return path[j];
  }
  return path.back();
}

int TreeIndex::QueriesOnPath(int code, int agent) const {
  int q = 0;
  const auto& path = paths_[code];
  for (std::size_t j = 0; j + 1 < path.size(); ++j) {
    if (AgentAt(path[j]) == agent) ++q;
  }
  return q;
}

bool TreeIndex::IsPrefix(NodeId u) const {
  int i = AgentAt(u);
  std::uint64_t cur = Avail(u, i);
  std::uint64_t full = Avail(tree_->root, i);
  std::uint64_t rest = full & ~cur;
  return rest == 0 || HighBit(cur) < LowBit(rest);
}

bool TreeIndex::IsSuffix(NodeId u) const {
  int i = AgentAt(u);
  std::uint64_t cur = Avail(u, i);
  std::uint64_t full = Avail(tree_->root, i);
  std::uint64_t rest = full & ~cur;
  return rest == 0 || LowBit(cur) > HighBit(rest);
}

std::vector<GammaGroup> GammaGroupsAt(const TreeIndex& idx, NodeId u,
                                      Horizon k) {
  const int agent = idx.AgentAt(u);
  std::map<NodeId, int> where;
  std::vector<GammaGroup> out;
  for (int code : idx.ProfilesAt(u)) {
    NodeId end = idx.HorizonEnd(code, u, k);
    auto [it, fresh] = where.emplace(end, static_cast<int>(out.size()));
    if (fresh) {
      out.emplace_back();
      out.back().slot = idx.SlotAt(code, u);
    }
    GammaGroup& g = out[it->second];
    g.members.push_back(code);
    int t = idx.TypeAt(code, agent);
    g.min_type = std::min(g.min_type, t);
    g.max_type = std::max(g.max_type, t);
  }
  return out;
}

}  // namespace ospkit
