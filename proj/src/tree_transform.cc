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

#include "ospkit/tree_transform.h"

#include <algorithm>
#include <utility>

#include "ospkit/tree_index.h"

namespace ospkit {

namespace {

using Mask = std::uint64_t;

std::vector<Rat> ValuesOf(const ImplementationTree& t, int agent, Mask m) {
  std::vector<Rat> out;
  for (; m != 0; m &= m - 1) out.push_back(t.domains[agent].values[LowBit(m)]);
  return out;
}

NodeId AddNode(ImplementationTree& out, Node nd) {
  nd.id = out.size();
  out.nodes.push_back(std::move(nd));
  return out.size() - 1;
}

class Serializer {
 public:
  explicit Serializer(const ImplementationTree& src) : src_(src) {
    out_.agents = src.agents;
    out_.domains = src.domains;
  }

  ImplementationTree Run() {
    std::vector<Mask> all(src_.agents);
    for (int i = 0; i < src_.agents; ++i) {
      all[i] = MaskOf(src_, i, src_.domains[i].values);
    }
    out_.root = Build(src_.root, all);
    return Canonicalize(out_);
  }

 private:
  struct Part {
    Mask mask;
    NodeId child;
  };

  NodeId Build(NodeId v, std::vector<Mask> allowed) {
    const Node& nd = src_.node(v);
    if (nd.leaf) return AddNode(out_, nd);
    const int i = nd.agent;
    std::vector<Part> parts;
    for (std::size_t s = 0; s < nd.blocks.size(); ++s) {
      Mask m = MaskOf(src_, i, nd.blocks[s]) & allowed[i];
      if (m != 0) parts.push_back({m, nd.children[s]});
    }
    std::sort(parts.begin(), parts.end(), [](const Part& a, const Part& b) {
      return LowBit(a.mask) < LowBit(b.mask);
    });
    return Emit(i, parts, allowed);
  }

  NodeId Emit(int i, std::vector<Part> parts, std::vector<Mask> allowed) {
    if (parts.size() == 1) {
      allowed[i] = parts.front().mask;
      return Build(parts.front().child, allowed);
    }
    Mask rest = 0;
    for (const Part& p : parts) rest |= p.mask;
    // Blocks need not be intervals, so locate the owners of both extremes.
    auto owner = [&](int t) {
      return std::find_if(parts.begin(), parts.end(),
                          [&](const Part& p) { return (p.mask >> t) & 1u; });
    };
    auto low = owner(LowBit(rest));
    auto high = owner(HighBit(rest));
    const bool peel_min = PopCount(low->mask) <= PopCount(high->mask);
    auto from = peel_min ? low : high;
    const int t = peel_min ? LowBit(rest) : HighBit(rest);
    const Mask single = Mask{1} << t;

    std::vector<Mask> yes_allowed = allowed;
    yes_allowed[i] = single;
    NodeId yes = Build(from->child, yes_allowed);
    from->mask &= ~single;
    if (from->mask == 0) parts.erase(from);
    std::vector<Mask> no_allowed = allowed;
    no_allowed[i] = rest & ~single;
    NodeId no = Emit(i, parts, no_allowed);

    Node q;
    q.leaf = false;
    q.agent = i;
    if (peel_min) {
      q.blocks = {ValuesOf(src_, i, single), ValuesOf(src_, i, rest & ~single)};
      q.children = {yes, no};
    } else {
      q.blocks = {ValuesOf(src_, i, rest & ~single), ValuesOf(src_, i, single)};
      q.children = {no, yes};
    }
    return AddNode(out_, std::move(q));
  }

  const ImplementationTree& src_;
  ImplementationTree out_;
};

class Compressor {
 public:
  explicit Compressor(const ImplementationTree& src) : src_(src) {
    out_.agents = src.agents;
    out_.domains = src.domains;
  }

  ImplementationTree Run() {
    out_.root = Build(src_.root);
    return Canonicalize(out_);
  }

 private:
  NodeId Build(NodeId v) {
    const Node& nd = src_.node(v);
    if (nd.leaf) return AddNode(out_, nd);
    std::vector<std::pair<std::vector<Rat>, NodeId>> parts;
    Expand(v, nd.agent, parts);
    std::sort(parts.begin(), parts.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Node q;
    q.leaf = false;
    q.agent = nd.agent;
    for (auto& [block, child] : parts) {
      q.blocks.push_back(block);
      q.children.push_back(Build(child));
    }
    return AddNode(out_, std::move(q));
  }

  // Blocks of the maximal same-agent chain hanging from v.
  void Expand(NodeId v, int agent,
              std::vector<std::pair<std::vector<Rat>, NodeId>>& parts) {
    const Node& nd = src_.node(v);
    for (std::size_t s = 0; s < nd.blocks.size(); ++s) {
      const Node& c = src_.node(nd.children[s]);
      if (!c.leaf && c.agent == agent) {
        Expand(c.id, agent, parts);
      } else {
        std::vector<Rat> b = nd.blocks[s];
        std::sort(b.begin(), b.end());
        parts.emplace_back(std::move(b), c.id);
      }
    }
  }

  const ImplementationTree& src_;
  ImplementationTree out_;
};

void RequireBinaryOutcomes(const ImplementationTree& tree) {
  if (!HasBinaryOutcomes(tree)) throw NonBinaryOutcomeError();
}

enum Side : int { kGreedy = 1, kReverse = 2 };

bool Revealable(const TreeIndex& idx, NodeId u) {
  const int i = idx.AgentAt(u);
  const Mask dom = idx.Avail(u, i);
  const int lo = LowBit(dom), hi = HighBit(dom);
  bool ones = true, zeros = true;
  for (int x : idx.ProfilesAt(u)) {
    int t = idx.TypeAt(x, i);
    if (t < hi && idx.F(x, i) != Rat(1)) ones = false;
    if (t > lo && idx.F(x, i) != Rat(0)) zeros = false;
  }
  return ones || zeros;
}

}  // namespace

ImplementationTree serialize(const ImplementationTree& tree) {
  RequireBinaryOutcomes(tree);
  TreeIndex check(tree);
  return Serializer(tree).Run();
}

ImplementationTree compress(const ImplementationTree& tree) {
  RequireBinaryOutcomes(tree);
  TreeIndex check(tree);
  return Compressor(tree).Run();
}

KLimitedVerdict is_k_limitable(const ImplementationTree& tree, int k) {
  return is_k_limited(compress(tree), k);
}

bool is_revealable(const ImplementationTree& tree, NodeId u) {
  RequireBinaryOutcomes(tree);
  TreeIndex idx(tree);
  if (u < 0 || u >= tree.size() || idx.IsLeaf(u)) {
    throw TreeError("node " + std::to_string(u) + " is not a query");
  }
  return Revealable(idx, u);
}

TwoWayVerdict is_two_way_greedy(const ImplementationTree& tree) {
  RequireBinaryOutcomes(tree);
  TreeIndex idx(tree);
  TwoWayVerdict verdict;
  // Depth-first with the per-agent set of sides still allowed.
  std::vector<std::pair<NodeId, std::vector<int>>> stack;
  stack.emplace_back(tree.root,
                     std::vector<int>(tree.agents, kGreedy | kReverse));
  while (!stack.empty() && verdict.pass) {
    auto [u, allowed] = std::move(stack.back());
    stack.pop_back();
    const Node& nd = tree.node(u);
    if (nd.leaf) continue;
    const int i = nd.agent;
    auto fail = [&](const std::string& why) { verdict = {false, u, i, why}; };
    if (nd.blocks.size() != 2) {
      fail("query is not binary");
      break;
    }
    const Mask left = MaskOf(tree, i, nd.blocks[0]);
    const Mask right = MaskOf(tree, i, nd.blocks[1]);
    const bool swapped = LowBit(left) > LowBit(right);
    const Mask lo_block = swapped ? right : left;
    const Mask hi_block = swapped ? left : right;
    const int lo_slot = swapped ? 1 : 0;
    if (HighBit(lo_block) > LowBit(hi_block)) {
      fail("blocks are not ordered");
      break;
    }
    if (PopCount(lo_block) != 1 && PopCount(hi_block) != 1) {
      fail("query is not extremal");
      break;
    }
    int sides = 0;
    auto all_equal = [&](int slot, const Rat& v) {
      for (int x : idx.ProfilesInSlot(u, slot)) {
        if (idx.F(x, i) != v) return false;
      }
      return true;
    };
    if (PopCount(lo_block) == 1 && all_equal(lo_slot, Rat(1))) {
      sides |= kGreedy;
    }
    if (PopCount(hi_block) == 1 && all_equal(1 - lo_slot, Rat(0))) {
      sides |= kReverse;
    }
    if (sides == 0) {
      fail("singleton block does not fix the outcome of its side");
      break;
    }
    if (!Revealable(idx, u)) {
      allowed[i] &= sides;
      if (allowed[i] == 0) {
        fail("agent switches side before it is revealable");
        break;
      }
    }
    for (auto it = nd.children.rbegin(); it != nd.children.rend(); ++it) {
      stack.emplace_back(*it, allowed);
    }
  }
  return verdict;
}

}  // namespace ospkit
