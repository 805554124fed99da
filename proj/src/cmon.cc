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

#include "ospkit/cmon.h"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <tuple>

#include "ospkit/tree_index.h"
#include "ospkit/verifier.h"

namespace ospkit {

using nlohmann::json;

std::string DomainClassIndex::ToString() const {
  switch (kind) {
    case kJ:
      return "J" + std::to_string(j);
    case kK2E:
      return "K2E";
    case kK2NotE:
      return "K2NotE";
  }
  return "?";
}

ClassConstructionError::ClassConstructionError(NodeId node,
                                               const std::string& msg)
    : TreeError("node " + std::to_string(node) + ": " + msg), node_(node) {}

namespace {

struct ClassTable {
  std::vector<LambdaClass> classes;
  std::vector<std::vector<int>> codes;  // members of each class
  std::vector<int> class_of;            // class of each profile code
};

// Mask of the effective types at the (k+2)-th query u: everything outside
// the largest group of types sharing the same outcome on every x_{-i}.
std::uint64_t EffectiveTypes(const TreeIndex& idx, NodeId u) {
  const int i = idx.AgentAt(u);
  const std::uint64_t dom = idx.Avail(u, i);
  const int low = LowBit(dom);
  std::vector<int> bases;
  for (int code : idx.ProfilesAt(u)) {
    if (idx.TypeAt(code, i) == low) bases.push_back(code);
  }
  std::map<std::vector<Rat>, std::uint64_t> groups;
  for (std::uint64_t r = dom; r; r &= r - 1) {
    int t = LowBit(r);
    std::vector<Rat> sig;
    for (int b : bases) sig.push_back(idx.F(idx.WithType(b, i, t), i));
    groups[sig] |= std::uint64_t{1} << t;
  }
  if (groups.size() == 1) return 0;
  int best = 0, ties = 0;
  std::uint64_t best_mask = 0;
  for (const auto& [sig, m] : groups) {
    int sz = PopCount(m);
    if (sz > best) {
      best = sz;
      ties = 1;
      best_mask = m;
    } else if (sz == best) {
      ++ties;
    }
  }
  if (ties == 1) return dom & ~best_mask;
  if (PopCount(dom) == 2) {
    bool suffix_only = idx.IsSuffix(u) && !idx.IsPrefix(u);
    return std::uint64_t{1} << (suffix_only ? LowBit(dom) : HighBit(dom));
  }
  throw ClassConstructionError(
      u, "no unique largest set of types with equal outcomes");
}

ClassTable BuildClasses(const TreeIndex& idx, Horizon k, int agent) {
  using Key = std::tuple<NodeId, DomainClassIndex, int>;
  std::map<Key, std::vector<int>> buckets;
  std::map<NodeId, std::uint64_t> effective;
  for (int code = 0; code < idx.num_profiles(); ++code) {
    const auto& path = idx.Path(code);
    int q = 0;
    NodeId end = path.back();
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
      if (idx.AgentAt(path[j]) != agent) continue;
      ++q;
      if (!k.infinite() && q == k.k() + 2) {
        end = path[j];
        break;
      }
    }
    DomainClassIndex ci;
    if (idx.IsLeaf(end)) {
      ci.kind = DomainClassIndex::kJ;
      ci.j = q + 1;
    } else {
      auto it = effective.find(end);
      if (it == effective.end()) {
        it = effective.emplace(end, EffectiveTypes(idx, end)).first;
      }
      bool eff = (it->second >> idx.TypeAt(code, agent)) & 1;
      ci.kind = eff ? DomainClassIndex::kK2E : DomainClassIndex::kK2NotE;
      ci.j = k.k() + 2;
    }
    int bit = idx.F(code, agent) == Rat(1) ? 1 : 0;
    buckets[{end, ci, bit}].push_back(code);
  }
  ClassTable t;
  t.class_of.assign(idx.num_profiles(), -1);
  for (auto& [key, codes] : buckets) {
    LambdaClass lc;
    lc.agent = agent;
    lc.path = std::get<0>(key);
    lc.index = std::get<1>(key);
    lc.outcome_bit = std::get<2>(key);
    std::set<int> types;
    for (int c : codes) {
      lc.members.push_back(idx.ToProfile(c));
      types.insert(idx.TypeAt(c, agent));
      t.class_of[c] = static_cast<int>(t.classes.size());
    }
    for (int ty : types) lc.types.push_back(idx.type_value(agent, ty));
    t.classes.push_back(std::move(lc));
    t.codes.push_back(codes);
  }
  return t;
}

void RequireBinary(const ImplementationTree& tree) {
  if (!HasBinaryOutcomes(tree)) throw NonBinaryOutcomeError();
}

// An edge carries the tightest bound any separated pair of members imposes:
// the extreme type of the source profile's gamma class at the separating
// node, times the outcome change.
OspGraph BuildGraph(const TreeIndex& idx, const ClassTable& t, Horizon k,
                    int agent) {
  OspGraph g;
  g.agent = agent;
  g.horizon = k;
  g.vertices = t.classes;
  std::map<std::pair<int, int>, std::pair<Rat, NodeId>> best;
  for (NodeId v = 0; v < idx.tree().size(); ++v) {
    if (idx.IsLeaf(v) || idx.AgentAt(v) != agent) continue;
    const auto& at = idx.ProfilesAt(v);
    for (const GammaGroup& gr : GammaGroupsAt(idx, v, k)) {
      const Rat& low = idx.type_value(agent, gr.min_type);
      const Rat& high = idx.type_value(agent, gr.max_type);
      for (int a : gr.members) {
        const int from = t.class_of[a];
        for (int b : at) {
          if (idx.SlotAt(b, v) == gr.slot) continue;
          const int to = t.class_of[b];
          if (from == to) continue;
          int df = t.classes[to].outcome_bit - t.classes[from].outcome_bit;
          Rat w = 0;
          if (df > 0) w = low;
          if (df < 0) w = -high;
          auto [it, fresh] =
              best.emplace(std::make_pair(from, to), std::make_pair(w, v));
          if (!fresh && w < it->second.first) it->second.first = w;
        }
      }
    }
  }
  for (const auto& [pair, wv] : best) {
    g.edges.push_back({pair.first, pair.second, wv.first, wv.second});
  }
  return g;
}

}  // namespace

std::vector<LambdaClass> build_lambda_classes(const ImplementationTree& tree,
                                              Horizon k, int agent) {
  RequireBinary(tree);
  TreeIndex idx(tree);
  if (agent < 0 || agent >= idx.agents()) throw TreeError("no such agent");
  return BuildClasses(idx, k, agent).classes;
}

OspGraph build_k_osp_graph(const ImplementationTree& tree, Horizon k,
                           int agent) {
  RequireBinary(tree);
  TreeIndex idx(tree);
  if (agent < 0 || agent >= idx.agents()) throw TreeError("no such agent");
  return BuildGraph(idx, BuildClasses(idx, k, agent), k, agent);
}

namespace {

// Bellman-Ford from a zero-weight super source. Returns a vertex whose label
// still improves after |V| rounds, or -1.
int Relax(const OspGraph& g, std::vector<Rat>& dist, std::vector<int>& pred) {
  const std::size_t n = g.vertices.size();
  dist.assign(n, Rat(0));
  pred.assign(n, -1);
  for (std::size_t round = 0; round < n; ++round) {
    bool changed = false;
    for (const OspEdge& e : g.edges) {
      Rat cand = dist[e.from] + e.weight;
      if (cand < dist[e.to]) {
        dist[e.to] = cand;
        pred[e.to] = e.from;
        changed = true;
      }
    }
    if (!changed) return -1;
  }
  for (const OspEdge& e : g.edges) {
    Rat cand = dist[e.from] + e.weight;
    if (cand < dist[e.to]) {
      pred[e.to] = e.from;
      return e.to;
    }
  }
  return -1;
}

Rat EdgeWeight(const OspGraph& g, int from, int to) {
  auto it =
      std::lower_bound(g.edges.begin(), g.edges.end(), std::make_pair(from, to),
                       [](const OspEdge& e, const std::pair<int, int>& key) {
                         return std::make_pair(e.from, e.to) < key;
                       });
  if (it == g.edges.end() || it->from != from || it->to != to) {
    throw std::logic_error("cycle uses a missing edge");
  }
  return it->weight;
}

}  // namespace

std::optional<CycleWitness> has_negative_cycle(const OspGraph& g) {
  std::vector<Rat> dist;
  std::vector<int> pred;
  int v = Relax(g, dist, pred);
  if (v < 0) return std::nullopt;
  for (std::size_t s = 0; s < g.vertices.size(); ++s) {
    v = pred[v];
    if (v < 0) throw std::logic_error("broken predecessor chain");
  }
  std::vector<int> cycle{v};
  for (int w = pred[v]; w != v; w = pred[w]) cycle.push_back(w);
  std::reverse(cycle.begin(), cycle.end());
  // Rotate so the smallest vertex id comes first.
  std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()),
              cycle.end());
  Rat total = 0;
  for (std::size_t s = 0; s < cycle.size(); ++s) {
    total += EdgeWeight(g, cycle[s], cycle[(s + 1) % cycle.size()]);
  }
  if (!(total < Rat(0))) {
    throw std::logic_error("extracted cycle is not negative");
  }
  return CycleWitness{cycle, total};
}

std::vector<Rat> ShortestPathLabels(const OspGraph& g) {
  std::vector<Rat> dist;
  std::vector<int> pred;
  if (Relax(g, dist, pred) >= 0) {
    throw std::logic_error("graph has a negative cycle");
  }
  for (const OspEdge& e : g.edges) {
    if (dist[e.from] + e.weight < dist[e.to]) {
      throw std::logic_error("shortest-path labels violate an edge");
    }
  }
  return dist;
}

PaymentResult synthesize_payments(const ImplementationTree& tree, Horizon k) {
  PaymentResult res;
  if (!HasBinaryOutcomes(tree)) {
    res.error = "outcomes must be 0 or 1";
    return res;
  }
  if (!k.infinite()) {
    KLimitedVerdict lim = is_k_limited(StripPayments(tree), k.k());
    if (!lim.pass) {
      res.agent = lim.agent;
      res.error = "not " + std::to_string(k.k()) + "-limited at node " +
                  std::to_string(lim.node) + ": " + lim.reason;
      return res;
    }
  }
  TreeIndex idx(tree);
  res.tree = tree;
  for (int i = 0; i < idx.agents(); ++i) {
    ClassTable t = BuildClasses(idx, k, i);
    OspGraph g = BuildGraph(idx, t, k, i);
    if (auto cyc = has_negative_cycle(g)) {
      res.agent = i;
      res.cycle = cyc;
      res.error = "negative cycle for agent " + std::to_string(i);
      res.tree = ImplementationTree();
      return res;
    }
    std::vector<Rat> label = ShortestPathLabels(g);
    for (NodeId leaf = 0; leaf < tree.size(); ++leaf) {
      if (!idx.IsLeaf(leaf)) continue;
      const auto& at = idx.ProfilesAt(leaf);
      const Rat& p = label[t.class_of[at.front()]];
      for (int code : at) {
        if (label[t.class_of[code]] != p) {
          res.agent = i;
          res.error = "leaf " + std::to_string(leaf) +
                      " mixes classes with different labels";
          res.tree = ImplementationTree();
          return res;
        }
      }
      res.tree.nodes[leaf].payment[i] = p;
    }
  }
  res.ok = true;
  return res;
}

StickyVerdict sticky_edges_check(const ImplementationTree& tree, Horizon k,
                                 int agent) {
  StickyVerdict v;
  RequireBinary(tree);
  if (!is_k_limited(tree, k).pass) {
    v.skipped = true;
    v.reason = "tree is not k-limited";
    return v;
  }
  TreeIndex idx(tree);
  ClassTable t = BuildClasses(idx, k, agent);
  OspGraph g = BuildGraph(idx, t, k, agent);
  auto divergence = [&](int x, int y) {
    const auto& px = idx.Path(x);
    const auto& py = idx.Path(y);
    std::size_t j = 1;
    while (j < px.size() && j < py.size() && px[j] == py[j]) ++j;
    return px[j - 1];
  };
  for (const OspEdge& e : g.edges) {
    NodeId common = -1;
    for (int x : t.codes[e.from]) {
      for (int y : t.codes[e.to]) {
        NodeId d = divergence(x, y);
        bool bad = idx.IsLeaf(d) || idx.AgentAt(d) != agent ||
                   (common >= 0 && d != common);
        if (common < 0 && !bad) common = d;
        if (bad) {
          v.pass = false;
          v.from = e.from;
          v.to = e.to;
          v.x = idx.ToProfile(x);
          v.x2 = idx.ToProfile(y);
          v.reason = idx.IsLeaf(d) || idx.AgentAt(d) != agent
                         ? "pair not separated by the agent"
                         : "pairs separated at different nodes";
          return v;
        }
      }
    }
  }
  return v;
}

EquivalenceVerdict k_vs_infinity_equivalence(const ImplementationTree& tree,
                                             Horizon k) {
  EquivalenceVerdict v;
  RequireBinary(tree);
  if (!is_k_limited(tree, k).pass) {
    v.skipped = true;
    return v;
  }
  TreeIndex idx(tree);
  for (int i = 0; i < idx.agents(); ++i) {
    bool kc = has_negative_cycle(BuildGraph(idx, BuildClasses(idx, k, i), k, i))
                  .has_value();
    bool ic = has_negative_cycle(
                  BuildGraph(idx, BuildClasses(idx, Horizon::Infinity(), i),
                             Horizon::Infinity(), i))
                  .has_value();
    if (kc != ic) {
      v.agree = false;
      v.agent = i;
      v.k_cycle = kc;
      v.inf_cycle = ic;
      return v;
    }
  }
  return v;
}

json GraphToJson(const OspGraph& g) {
  json doc;
  doc["agent"] = g.agent;
  doc["k"] = g.horizon.ToString();
  json verts = json::array();
  for (std::size_t v = 0; v < g.vertices.size(); ++v) {
    const LambdaClass& c = g.vertices[v];
    json vj;
    vj["id"] = static_cast<int>(v);
    vj["path"] = c.path;
    vj["class"] = c.index.ToString();
    vj["outcome"] = c.outcome_bit;
    json types = json::array();
    for (const Rat& t : c.types) types.push_back(t.ToString());
    vj["types"] = types;
    vj["size"] = c.members.size();
    verts.push_back(vj);
  }
  doc["vertices"] = verts;
  json edges = json::array();
  for (const OspEdge& e : g.edges) {
    edges.push_back({{"from", e.from},
                     {"to", e.to},
                     {"weight", e.weight.ToString()},
                     {"node", e.node}});
  }
  doc["edges"] = edges;
  return doc;
}

}  // namespace ospkit
