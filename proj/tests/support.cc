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

#include "support.h"

#include <algorithm>
#include <map>

namespace ospkit::testing {

std::vector<Rat> Rats(std::initializer_list<std::int64_t> xs) {
  std::vector<Rat> out;
  for (std::int64_t x : xs) out.push_back(Rat(x));
  return out;
}

Hand::Hand(int agents, std::vector<TypeDomain> domains) {
  t_.agents = agents;
  t_.domains = std::move(domains);
}

NodeId Hand::Leaf(std::vector<Rat> outcome, std::vector<Rat> payment) {
  Node n;
  n.id = t_.size();
  n.outcome = std::move(outcome);
  n.payment = std::move(payment);
  t_.nodes.push_back(n);
  return n.id;
}

NodeId Hand::Leaf(std::vector<Rat> outcome) {
  std::vector<Rat> zero(outcome.size(), Rat(0));
  return Leaf(std::move(outcome), zero);
}

NodeId Hand::Ask(int agent, std::vector<std::vector<Rat>> blocks,
                 std::vector<NodeId> children) {
  Node n;
  n.id = t_.size();
  n.leaf = false;
  n.agent = agent;
  n.blocks = std::move(blocks);
  n.children = std::move(children);
  t_.nodes.push_back(n);
  return n.id;
}

ImplementationTree Hand::Done(NodeId root) {
  t_.root = root;
  return Canonicalize(t_);
}

std::vector<Profile> AllProfiles(const std::vector<TypeDomain>& domains) {
  std::vector<Profile> out = {{}};
  for (const TypeDomain& d : domains) {
    std::vector<Profile> next;
    for (const Profile& p : out) {
      for (const Rat& v : d.values) {
        Profile q = p;
        q.push_back(v);
        next.push_back(q);
      }
    }
    out = next;
  }
  return out;
}

std::vector<NodeId> Walk(const ImplementationTree& t, const Profile& x) {
  std::vector<NodeId> path = {t.root};
  while (!t.node(path.back()).leaf) {
    const Node& n = t.node(path.back());
    NodeId next = -1;
    for (std::size_t b = 0; b < n.blocks.size(); ++b) {
      const auto& blk = n.blocks[b];
      if (std::find(blk.begin(), blk.end(), x[n.agent]) != blk.end()) {
        next = n.children[b];
      }
    }
    if (next < 0) return {};
    path.push_back(next);
  }
  return path;
}

std::vector<Profile> AvailableAt(const ImplementationTree& t, NodeId u) {
  std::vector<Profile> out;
  for (const Profile& x : AllProfiles(t.domains)) {
    auto p = Walk(t, x);
    if (std::find(p.begin(), p.end(), u) != p.end()) out.push_back(x);
  }
  return out;
}

bool SeparatedWithin(const ImplementationTree& t, NodeId u, const Profile& a,
                     const Profile& b, Horizon k) {
  const auto pa = Walk(t, a);
  const auto pb = Walk(t, b);
  std::size_t common = 0;
  while (common < pa.size() && common < pb.size() && pa[common] == pb[common]) {
    ++common;
  }
  if (common == pa.size()) return false;  // same leaf
  const NodeId split = pa[common - 1];
  const auto at_u = std::find(pa.begin(), pa.end(), u) - pa.begin();
  const auto at_split = static_cast<std::ptrdiff_t>(common - 1);
  if (at_split < at_u) return false;
  if (at_split == at_u) return true;
  if (k.infinite()) return true;
  const int agent = t.node(u).agent;
  int later = 0;
  for (auto s = at_u + 1; s <= at_split; ++s) {
    if (t.node(pa[s]).agent == agent) ++later;
  }
  (void)split;
  return later <= k.k();
}

std::vector<Profile> OracleGamma(const ImplementationTree& t, NodeId u,
                                 const Profile& a, Horizon k) {
  std::vector<Profile> out;
  for (const Profile& b : AvailableAt(t, u)) {
    if (!SeparatedWithin(t, u, a, b, k)) out.push_back(b);
  }
  return out;
}

namespace {

Rat Utility(const ImplementationTree& t, const Profile& x, int i,
            const Rat& type) {
  const Node& leaf = t.node(Walk(t, x).back());
  return leaf.payment[i] - type * leaf.outcome[i];
}

bool DivergeAt(const ImplementationTree& t, NodeId u, const Profile& a,
               const Profile& b) {
  const auto pa = Walk(t, a);
  const auto pb = Walk(t, b);
  auto ia = std::find(pa.begin(), pa.end(), u) - pa.begin();
  auto ib = std::find(pb.begin(), pb.end(), u) - pb.begin();
  if (ia == static_cast<long>(pa.size()) || ib == static_cast<long>(pb.size()))
    return false;
  return pa[ia + 1] != pb[ib + 1];
}

}  // namespace

bool OracleOsp(const ImplementationTree& t, Horizon k) {
  for (const Node& n : t.nodes) {
    if (n.leaf) continue;
    const int i = n.agent;
    const auto avail = AvailableAt(t, n.id);
    for (const Profile& a : avail) {
      const Rat& type = a[i];
      Rat worst_truthful;
      bool first = true;
      for (const Profile& y : avail) {
        if (SeparatedWithin(t, n.id, a, y, k)) continue;
        Rat u = Utility(t, y, i, type);
        if (first || u < worst_truthful) worst_truthful = u;
        first = false;
      }
      for (const Profile& z : avail) {
        if (!DivergeAt(t, n.id, a, z)) continue;
        if (worst_truthful < Utility(t, z, i, type)) return false;
      }
    }
  }
  return true;
}

Feasible SizeCap(int cap) {
  return [cap](ElementSet s) { return __builtin_popcount(s) <= cap; };
}

Feasible TriangleForest() {
  // Edges 0,1,2 of a triangle; only all three together close a cycle.
  return [](ElementSet s) { return (s & 7u) != 7u && s < 8u; };
}

Feasible OracleFor(const PSystem& p) {
  switch (p.kind()) {
    case PSystem::Kind::kSingleItem:
      return SizeCap(1);
    case PSystem::Kind::kUniform:
      return SizeCap(p.rank_param());
    case PSystem::Kind::kGraphic: {
      const auto edges = p.edges();
      const int v = p.vertices();
      return [edges, v](ElementSet s) {
        std::vector<int> parent(v);
        for (int x = 0; x < v; ++x) parent[x] = x;
        std::function<int(int)> root = [&](int x) {
          return parent[x] == x ? x : parent[x] = root(parent[x]);
        };
        for (std::size_t e = 0; e < edges.size(); ++e) {
          if (!Has(s, static_cast<int>(e))) continue;
          int a = root(edges[e].first), b = root(edges[e].second);
          if (a == b) return false;
          parent[a] = b;
        }
        return true;
      };
    }
    case PSystem::Kind::kExplicit: {
      const auto listed = p.listed();
      return [listed](ElementSet s) {
        for (ElementSet m : listed) {
          if ((s & ~m) == 0) return true;
        }
        return false;
      };
    }
  }
  return SizeCap(0);
}

Rat OracleOptimum(int n, const Feasible& f, const std::vector<Rat>& w) {
  Rat best(0);
  for (ElementSet s = 0; s < (ElementSet{1} << n); ++s) {
    if (!f(s)) continue;
    Rat total(0);
    for (int e = 0; e < n; ++e) {
      if (Has(s, e)) total += w[e];
    }
    best = Max(best, total);
  }
  return best;
}

std::vector<ElementSet> OracleMaximal(int n, const Feasible& f) {
  std::vector<ElementSet> out;
  for (ElementSet s = 0; s < (ElementSet{1} << n); ++s) {
    if (!f(s)) continue;
    bool grows = false;
    for (int e = 0; e < n; ++e) {
      if (!Has(s, e) && f(s | Bit(e))) grows = true;
    }
    if (!grows) out.push_back(s);
  }
  return out;
}

ElementSet OracleReverseGreedy(int n, const Feasible& f,
                               const std::vector<Rat>& w) {
  std::vector<int> order(n);
  for (int e = 0; e < n; ++e) order[e] = e;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (w[a] != w[b]) return w[a] < w[b];
    return a > b;
  });
  const auto maximal = OracleMaximal(n, f);
  ElementSet keep = n == 32 ? ~ElementSet{0} : Bit(n) - 1;
  for (int e : order) {
    const ElementSet without = keep & ~Bit(e);
    for (ElementSet m : maximal) {
      if ((m & ~without) == 0) {
        keep = without;
        break;
      }
    }
  }
  return keep;
}

namespace {

std::vector<TypeDomain> Domains(int n, int d) {
  TypeDomain dom;
  for (int v = 1; v <= d; ++v) dom.values.push_back(Rat(v));
  return std::vector<TypeDomain>(n, dom);
}

struct RandomBuilder {
  std::mt19937_64& rng;
  ImplementationTree t;
  int max_depth;
  // Outcome function on type-index profiles, or empty for random leaves.
  std::map<std::vector<int>, std::vector<int>> f;

  int Uniform(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  }

  NodeId AddLeaf(const std::vector<int>& outcome) {
    Node n;
    n.id = t.size();
    for (int b : outcome) n.outcome.push_back(Rat(b));
    n.payment.assign(t.agents, Rat(0));
    t.nodes.push_back(n);
    return n.id;
  }

  NodeId AddQuery(int agent, std::vector<std::vector<int>> blocks) {
    Node n;
    n.id = t.size();
    n.leaf = false;
    n.agent = agent;
    for (const auto& b : blocks) {
      std::vector<Rat> vals;
      for (int v : b) vals.push_back(t.domains[agent].values[v]);
      n.blocks.push_back(vals);
    }
    t.nodes.push_back(n);
    return n.id;
  }

  // Free form: random agent, random 2- or 3-way partition.
  NodeId Free(std::vector<std::vector<int>> box, int depth) {
    std::vector<int> askable;
    for (int i = 0; i < t.agents; ++i) {
      if (box[i].size() >= 2) askable.push_back(i);
    }
    if (askable.empty() || depth >= max_depth || Uniform(0, 4) == 0) {
      std::vector<int> bits(t.agents);
      for (int& b : bits) b = Uniform(0, 1);
      return AddLeaf(bits);
    }
    const int agent = askable[Uniform(0, static_cast<int>(askable.size()) - 1)];
    std::vector<int> vals = box[agent];
    std::shuffle(vals.begin(), vals.end(), rng);
    const int parts =
        std::min<int>(static_cast<int>(vals.size()), Uniform(2, 3));
    std::vector<std::vector<int>> blocks(parts);
    for (std::size_t x = 0; x < vals.size(); ++x) {
      blocks[x < static_cast<std::size_t>(parts) ? x : Uniform(0, parts - 1)]
          .push_back(vals[x]);
    }
    for (auto& b : blocks) std::sort(b.begin(), b.end());
    std::sort(blocks.begin(), blocks.end());
    const NodeId u = AddQuery(agent, blocks);
    std::vector<NodeId> kids;
    for (const auto& b : blocks) {
      auto sub = box;
      sub[agent] = b;
      kids.push_back(Free(sub, depth + 1));
    }
    t.nodes[u].children = kids;
    return u;
  }

  // Extremal queries until the outcome function is constant on the box.
  NodeId Extremal(std::vector<std::vector<int>> box) {
    std::vector<std::vector<int>> outs;
    std::vector<int> idx(t.agents, 0);
    std::function<void(int)> rec = [&](int a) {
      if (a == t.agents) {
        outs.push_back(f.at(idx));
        return;
      }
      for (int v : box[a]) {
        idx[a] = v;
        rec(a + 1);
      }
    };
    rec(0);
    bool constant = std::all_of(outs.begin(), outs.end(),
                                [&](const auto& o) { return o == outs[0]; });
    std::vector<int> askable;
    for (int i = 0; i < t.agents; ++i) {
      if (box[i].size() >= 2) askable.push_back(i);
    }
    if (constant || askable.empty()) return AddLeaf(outs[0]);
    const int agent = askable[Uniform(0, static_cast<int>(askable.size()) - 1)];
    std::vector<int> vals = box[agent];
    const bool low = Uniform(0, 1) == 0;
    std::vector<int> single = {low ? vals.front() : vals.back()};
    std::vector<int> rest(vals.begin() + (low ? 1 : 0),
                          vals.end() - (low ? 0 : 1));
    std::vector<std::vector<int>> blocks =
        low ? std::vector<std::vector<int>>{single, rest}
            : std::vector<std::vector<int>>{rest, single};
    const NodeId u = AddQuery(agent, blocks);
    std::vector<NodeId> kids;
    for (const auto& b : blocks) {
      auto sub = box;
      sub[agent] = b;
      kids.push_back(Extremal(sub));
    }
    t.nodes[u].children = kids;
    return u;
  }
};

std::vector<std::vector<int>> FullBox(int n, int d) {
  std::vector<int> all(d);
  for (int v = 0; v < d; ++v) all[v] = v;
  return std::vector<std::vector<int>>(n, all);
}

}  // namespace

ImplementationTree RandomBinaryTree(std::mt19937_64& rng, int n, int d,
                                    int max_depth) {
  RandomBuilder b{rng, {}, max_depth, {}};
  b.t.agents = n;
  b.t.domains = Domains(n, d);
  b.t.root = b.Free(FullBox(n, d), 0);
  return Canonicalize(b.t);
}

ImplementationTree RandomExtremalTree(std::mt19937_64& rng, int n, int d,
                                      int max_depth) {
  RandomBuilder b{rng, {}, max_depth, {}};
  b.t.agents = n;
  b.t.domains = Domains(n, d);
  // f_i(x) = 1 iff x_i <= threshold_i(x_{-i}); thresholds drawn per x_{-i}.
  std::vector<std::map<std::vector<int>, int>> thr(n);
  std::vector<int> idx(n, 0);
  std::function<void(int)> rec = [&](int a) {
    if (a == n) {
      std::vector<int> out(n);
      for (int i = 0; i < n; ++i) {
        std::vector<int> rest = idx;
        rest[i] = -1;
        auto it = thr[i].find(rest);
        if (it == thr[i].end()) {
          it = thr[i].emplace(rest, b.Uniform(-1, d - 1)).first;
        }
        out[i] = idx[i] <= it->second ? 1 : 0;
      }
      b.f[idx] = out;
      return;
    }
    for (int v = 0; v < d; ++v) {
      idx[a] = v;
      rec(a + 1);
    }
  };
  rec(0);
  b.t.root = b.Extremal(FullBox(n, d));
  return Canonicalize(b.t);
}

PSystem RandomPSystem(std::mt19937_64& rng) {
  const int pick = std::uniform_int_distribution<int>(0, 5)(rng);
  switch (pick) {
    case 0:
      return PSystem::SingleItem(std::uniform_int_distribution<int>(1, 5)(rng));
    case 1: {
      const int n = std::uniform_int_distribution<int>(2, 6)(rng);
      return PSystem::Uniform(n, std::uniform_int_distribution<int>(0, n)(rng));
    }
    case 2:
      return PSystem::Graphic(3, {{0, 1}, {1, 2}, {0, 2}});
    case 3:
      return PSystem::Graphic(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
    case 4:
      return PSystem::Explicit(3, {{0, 1}, {2}});
    default:
      return PSystem::Explicit(5, {{0, 1, 2}, {2, 3}, {1, 4}});
  }
}

}  // namespace ospkit::testing
