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

#include "ospkit/verifier.h"

#include <algorithm>
#include <functional>
#include <map>
#include <tuple>

#include "ospkit/tree_index.h"

namespace ospkit {

NonBinaryOutcomeError::NonBinaryOutcomeError()
    : TreeError("outcomes must be 0 or 1 for this check") {}

TransformError::TransformError(NodeId node, const std::string& msg)
    : TreeError("node " + std::to_string(node) + ": " + msg), node_(node) {}

namespace {

void RequireBinary(const ImplementationTree& tree) {
  if (!HasBinaryOutcomes(tree)) throw NonBinaryOutcomeError();
}

// Codes of profiles available at u with agent i(u) at its lowest available
// type; one per x_{-i}.
std::vector<int> OthersAt(const TreeIndex& idx, NodeId u) {
  const int agent = idx.AgentAt(u);
  const int low = LowBit(idx.Avail(u, agent));
  std::vector<int> out;
  for (int code : idx.ProfilesAt(u)) {
    if (idx.TypeAt(code, agent) == low) out.push_back(code);
  }
  return out;
}

std::vector<int> TypesOf(std::uint64_t mask) {
  std::vector<int> out;
  for (; mask; mask &= mask - 1) out.push_back(LowBit(mask));
  return out;
}

}  // namespace

OspVerdict check_k_step_osp(const ImplementationTree& tree, Horizon k,
                            std::size_t cap) {
  TreeIndex idx(tree);
  OspVerdict verdict;
  for (int i = 0; i < idx.agents(); ++i) {
    for (NodeId u = 0; u < tree.size(); ++u) {
      if (idx.IsLeaf(u) || idx.AgentAt(u) != i) continue;
      std::vector<std::tuple<int, int, Rat, Rat, Rat>> found;
      const auto& at = idx.ProfilesAt(u);
      for (const GammaGroup& g : GammaGroupsAt(idx, u, k)) {
        const Rat& low = idx.type_value(i, g.min_type);
        const Rat& high = idx.type_value(i, g.max_type);
        for (int a : g.members) {
          const Rat& fa = idx.F(a, i);
          const Rat& pa = idx.P(a, i);
          for (int b : at) {
            if (idx.SlotAt(b, u) == g.slot) continue;
            Rat df = idx.F(b, i) - fa;
            const Rat& c = df.sign() >= 0 ? low : high;
            Rat rhs = c * df;
            Rat lhs = idx.P(b, i) - pa;
            if (lhs > rhs) found.emplace_back(a, b, c, lhs, rhs);
          }
        }
      }
      std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
        return std::tie(std::get<0>(x), std::get<1>(x)) <
               std::tie(std::get<0>(y), std::get<1>(y));
      });
      verdict.total_violations += static_cast<std::int64_t>(found.size());
      for (const auto& [a, b, c, lhs, rhs] : found) {
        if (verdict.violations.size() >= cap) break;
        verdict.violations.push_back(
            {i, u, idx.ToProfile(a), idx.ToProfile(b), c, lhs, rhs});
      }
    }
  }
  verdict.pass = verdict.total_violations == 0;
  return verdict;
}

AlmostOrderedVerdict is_almost_ordered(const ImplementationTree& tree,
                                       Horizon k) {
  TreeIndex idx(tree);
  AlmostOrderedVerdict v;
  for (int i = 0; i < idx.agents(); ++i) {
    for (NodeId u = 0; u < tree.size(); ++u) {
      if (idx.IsLeaf(u) || idx.AgentAt(u) != i) continue;
      auto groups = GammaGroupsAt(idx, u, k);
      // Member with the largest and the smallest outcome in each group.
      std::vector<int> top(groups.size()), bottom(groups.size());
      for (std::size_t g = 0; g < groups.size(); ++g) {
        top[g] = bottom[g] = groups[g].members.front();
        for (int x : groups[g].members) {
          if (idx.F(x, i) > idx.F(top[g], i)) top[g] = x;
          if (idx.F(x, i) < idx.F(bottom[g], i)) bottom[g] = x;
        }
      }
      for (std::size_t g = 0; g < groups.size(); ++g) {
        for (std::size_t h = 0; h < groups.size(); ++h) {
          if (groups[g].slot == groups[h].slot) continue;
          if (!(idx.F(top[g], i) > idx.F(bottom[h], i))) continue;
          if (groups[g].max_type < groups[h].min_type) continue;
          v.pass = false;
          v.agent = i;
          v.node = u;
          v.a = idx.ToProfile(top[g]);
          v.b = idx.ToProfile(bottom[h]);
          v.c = idx.type_value(i, groups[g].max_type);
          v.d = idx.type_value(i, groups[h].min_type);
          return v;
        }
      }
    }
  }
  return v;
}

bool QueryClass::OnlyEffective(const Rat& t) const {
  return std::find(only_effective.begin(), only_effective.end(), t) !=
         only_effective.end();
}

bool QueryClass::StronglyOnlyEffective(const Rat& t) const {
  return std::find(strongly_only_effective.begin(),
                   strongly_only_effective.end(),
                   t) != strongly_only_effective.end();
}

QueryClass classify_query(const ImplementationTree& tree, NodeId u) {
  TreeIndex idx(tree);
  return classify_query(idx, u);
}

QueryClass classify_query(const TreeIndex& idx, NodeId u) {
  if (u < 0 || u >= idx.tree().size() || idx.IsLeaf(u)) {
    throw TreeError("node " + std::to_string(u) + " is not a query");
  }
  const Node& nd = idx.tree().node(u);
  const int i = nd.agent;
  QueryClass q;
  q.agent = i;
  const std::uint64_t dom = idx.Avail(u, i);
  const std::vector<int> types = TypesOf(dom);
  q.domain_size = static_cast<int>(types.size());
  q.prefix = idx.IsPrefix(u);
  q.suffix = idx.IsSuffix(u);

  q.revelation = std::all_of(nd.blocks.begin(), nd.blocks.end(),
                             [](const auto& b) { return b.size() == 1; });
  if (nd.blocks.size() == 2) {
    for (const auto& b : nd.blocks) {
      if (b.size() != 1) continue;
      int t = idx.tree().domains[i].IndexOf(b.front());
      if (t == types.front()) q.separates_min = true;
      if (t == types.back()) q.separates_max = true;
    }
    q.extremal = q.separates_min || q.separates_max;
  }

  const std::vector<int> others = OthersAt(idx, u);
  auto same = [&](int x, int y) {
    return idx.F(x, i) == idx.F(y, i) && idx.P(x, i) == idx.P(y, i);
  };
  // Pointwise: for each x_{-i}, all types except `skip` agree.
  auto pointwise = [&](int skip) {
    for (int base : others) {
      int ref = -1;
      for (int t : types) {
        if (t == skip) continue;
        int x = idx.WithType(base, i, t);
        if (ref < 0) {
          ref = x;
        } else if (!same(ref, x)) {
          return false;
        }
      }
    }
    return true;
  };
  // Globally: all profiles with a type other than `skip` agree.
  auto globally = [&](int skip) {
    int ref = -1;
    for (int base : others) {
      for (int t : types) {
        if (t == skip) continue;
        int x = idx.WithType(base, i, t);
        if (ref < 0) {
          ref = x;
        } else if (!same(ref, x)) {
          return false;
        }
      }
    }
    return true;
  };
  auto effective = [&](int t) {
    for (int base : others) {
      int x = idx.WithType(base, i, t);
      for (int s : types) {
        if (s != t && idx.F(idx.WithType(base, i, s), i) != idx.F(x, i)) {
          return true;
        }
      }
    }
    return false;
  };

  q.ineffective = pointwise(-1);
  q.strongly_ineffective = globally(-1);
  for (int t : types) {
    if (!effective(t)) continue;
    if (pointwise(t)) q.only_effective.push_back(idx.type_value(i, t));
    if (globally(t)) q.strongly_only_effective.push_back(idx.type_value(i, t));
  }
  return q;
}

KLimitedVerdict is_k_limited(const ImplementationTree& tree, Horizon k) {
  if (k.infinite()) {
    RequireBinary(tree);
    TreeIndex idx(tree);
    return {};
  }
  return is_k_limited(tree, k.k());
}

KLimitedVerdict is_k_limited(const ImplementationTree& tree, int k) {
  RequireBinary(tree);
  TreeIndex idx(tree);
  std::map<NodeId, QueryClass> memo;
  auto cls = [&](NodeId u) -> const QueryClass& {
    auto it = memo.find(u);
    if (it == memo.end()) it = memo.emplace(u, classify_query(idx, u)).first;
    return it->second;
  };
  for (int i = 0; i < idx.agents(); ++i) {
    for (NodeId leaf : idx.Preorder()) {
      if (!idx.IsLeaf(leaf)) continue;
      const auto& path = idx.Path(idx.ProfilesAt(leaf).front());
      std::vector<NodeId> mine;
      for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        if (idx.AgentAt(path[j]) == i) mine.push_back(path[j]);
      }
      const int q = static_cast<int>(mine.size());
      if (q <= k + 1) continue;
      if (q > k + 2) {
        return {false, i, mine[k + 2], leaf,
                "agent queried " + std::to_string(q) + " times (limit " +
                    std::to_string(k + 2) + ")"};
      }
      NodeId u = mine[k + 1];
      const QueryClass& c = cls(u);
      const Rat hi = idx.type_value(i, HighBit(idx.Avail(u, i)));
      const Rat lo = idx.type_value(i, LowBit(idx.Avail(u, i)));
      bool top_ok = (c.domain_size == 2 || c.prefix) &&
                    ((c.revelation && c.strongly_ineffective) ||
                     (c.revelation && c.StronglyOnlyEffective(hi)) ||
                     (c.extremal && c.separates_max && c.OnlyEffective(hi)));
      bool bottom_ok =
          c.suffix && ((c.revelation && c.strongly_ineffective) ||
                       (c.revelation && c.StronglyOnlyEffective(lo)) ||
                       (c.extremal && c.separates_min && c.OnlyEffective(lo)));
      if (!top_ok && !bottom_ok) {
        return {false, i, u, leaf,
                "last allowed query is not a restricted revelation or "
                "extremal query"};
      }
    }
  }
  return {};
}

std::vector<TaxationViolation> taxation_diagnostics(
    const ImplementationTree& tree, Horizon k) {
  RequireBinary(tree);
  TreeIndex idx(tree);
  std::vector<TaxationViolation> out;
  for (int i = 0; i < idx.agents(); ++i) {
    for (NodeId u = 0; u < tree.size(); ++u) {
      if (idx.IsLeaf(u) || idx.AgentAt(u) != i) continue;
      for (const GammaGroup& g : GammaGroupsAt(idx, u, k)) {
        // Members keyed by x_{-i}; types ascend within each key.
        std::map<int, std::vector<int>> by_others;
        for (int x : g.members) {
          by_others[idx.WithType(x, i, 0)].push_back(x);
        }
        for (const auto& [key, xs] : by_others) {
          const std::size_t m = xs.size();
          for (std::size_t ia = 0; ia < m; ++ia) {
            for (std::size_t ic = ia + 1; ic < m; ++ic) {
              for (std::size_t id = ic + 1; id < m; ++id) {
                const int a = xs[ia], c = xs[ic], d = xs[id];
                const auto& pa = idx.Path(a);
                const auto& pc = idx.Path(c);
                const auto& pd = idx.Path(d);
                // First node where two of the three part ways.
                std::size_t j = idx.Depth(u) + 1;
                while (j < pa.size() && j < pc.size() && j < pd.size() &&
                       pa[j] == pc[j] && pc[j] == pd[j]) {
                  ++j;
                }
                if (j >= pa.size() || j >= pc.size() || j >= pd.size()) {
                  continue;
                }
                const NodeId split = pa[j - 1];
                // Types separated from the trio by i on [u, split).
                int lowest_sep = -1;
                int highest_sep = -1;
                int inner_sep = -1;
                const int ta = idx.TypeAt(a, i), td = idx.TypeAt(d, i);
                for (std::size_t s = idx.Depth(u); s + 1 < j; ++s) {
                  NodeId v = pa[s];
                  if (idx.AgentAt(v) != i) continue;
                  NodeId next = pa[s + 1];
                  std::uint64_t kept = idx.Avail(next, i);
                  for (int t : TypesOf(idx.Avail(v, i) & ~kept)) {
                    if (t < ta && (lowest_sep < 0 || t < lowest_sep)) {
                      lowest_sep = t;
                    }
                    if (t > td && t > highest_sep) highest_sep = t;
                    if (t > ta && t < td && inner_sep < 0) inner_sep = t;
                  }
                }
                auto eq = [&](int x, int y) {
                  return idx.F(x, i) == idx.F(y, i) &&
                         idx.P(x, i) == idx.P(y, i);
                };
                auto report = [&](const char* kind, int bt, int bt2) {
                  TaxationViolation tv;
                  tv.kind = kind;
                  tv.agent = i;
                  tv.node = u;
                  tv.split_node = split;
                  tv.a = idx.ToProfile(a);
                  tv.c = idx.ToProfile(c);
                  tv.d = idx.ToProfile(d);
                  tv.b = idx.ToProfile(idx.WithType(a, i, bt));
                  if (bt2 >= 0) tv.b2 = idx.ToProfile(idx.WithType(a, i, bt2));
                  out.push_back(std::move(tv));
                };
                const bool all_eq = eq(a, c) && eq(c, d);
                if (lowest_sep >= 0 && highest_sep >= 0 && !all_eq) {
                  report("outer-sandwich", lowest_sep, highest_sep);
                }
                if (inner_sep >= 0 && !all_eq) {
                  report("inner-sandwich", inner_sep, -1);
                }
                if (highest_sep >= 0 && !eq(a, c)) {
                  report("top", highest_sep, -1);
                }
                if (lowest_sep >= 0 && !eq(c, d)) {
                  report("bottom", lowest_sep, -1);
                }
              }
            }
          }
        }
      }
    }
  }
  return out;
}

std::vector<IneffectivenessViolation> strong_ineffectiveness_check(
    const ImplementationTree& tree) {
  RequireBinary(tree);
  TreeIndex idx(tree);
  std::vector<IneffectivenessViolation> out;
  for (NodeId u = 0; u < tree.size(); ++u) {
    if (idx.IsLeaf(u)) continue;
    const int i = idx.AgentAt(u);
    const auto types = TypesOf(idx.Avail(u, i));
    const auto others = OthersAt(idx, u);
    for (std::size_t x = 0; x < types.size(); ++x) {
      for (std::size_t y = x + 1; y < types.size(); ++y) {
        const int t = types[x], s = types[y];
        int probe = idx.WithType(others.front(), i, t);
        int probe2 = idx.WithType(others.front(), i, s);
        if (idx.SlotAt(probe, u) == idx.SlotAt(probe2, u)) continue;
        bool pointwise = std::all_of(others.begin(), others.end(), [&](int b) {
          return idx.F(idx.WithType(b, i, t), i) ==
                 idx.F(idx.WithType(b, i, s), i);
        });
        if (!pointwise) continue;
        bool done = false;
        for (int b : others) {
          for (int b2 : others) {
            int z = idx.WithType(b, i, t), z2 = idx.WithType(b2, i, s);
            const char* field = nullptr;
            if (idx.F(z, i) != idx.F(z2, i)) {
              field = "outcome";
            } else if (idx.P(z, i) != idx.P(z2, i)) {
              field = "payment";
            }
            if (field == nullptr) continue;
            out.push_back({i, u, idx.type_value(i, t), idx.type_value(i, s),
                           idx.ToProfile(z), idx.ToProfile(z2), field});
            done = true;
            break;
          }
          if (done) break;
        }
      }
    }
  }
  return out;
}

ImplementationTree StripPayments(const ImplementationTree& tree) {
  ImplementationTree out = tree;
  for (Node& nd : out.nodes) {
    if (nd.leaf) nd.payment.assign(tree.agents, Rat(0));
  }
  return out;
}

namespace {

// Copies the subtree at v into `out`, keeping only the branch of `agent`
// that contains `t` at every query to that agent.
NodeId CopyRestricted(const ImplementationTree& src, NodeId v, int agent,
                      const Rat& t, ImplementationTree& out) {
  const Node& nd = src.node(v);
  if (!nd.leaf && nd.agent == agent) {
    for (std::size_t s = 0; s < nd.blocks.size(); ++s) {
      if (std::find(nd.blocks[s].begin(), nd.blocks[s].end(), t) !=
          nd.blocks[s].end()) {
        return CopyRestricted(src, nd.children[s], agent, t, out);
      }
    }
    throw TreeError("type missing from restricted subtree");
  }
  NodeId mine = out.size();
  out.nodes.push_back(nd);
  out.nodes[mine].id = mine;
  for (std::size_t s = 0; s < nd.children.size(); ++s) {
    NodeId c = CopyRestricted(src, nd.children[s], agent, t, out);
    out.nodes[mine].children[s] = c;
  }
  return mine;
}

}  // namespace

ImplementationTree reveal_at_k2(const ImplementationTree& tree, int k) {
  ImplementationTree cur = Canonicalize(tree);
  for (;;) {
    TreeIndex idx(cur);
    NodeId target = -1;
    for (NodeId u : idx.Preorder()) {
      if (idx.IsLeaf(u)) continue;
      const Node& nd = cur.node(u);
      bool revelation =
          std::all_of(nd.blocks.begin(), nd.blocks.end(),
                      [](const auto& b) { return b.size() == 1; });
      if (revelation) continue;
      int count = 0;
      for (NodeId v = u; v >= 0; v = idx.Parent(v)) {
        if (!idx.IsLeaf(v) && idx.AgentAt(v) == nd.agent) ++count;
      }
      if (count == k + 2) {
        target = u;
        break;
      }
    }
    if (target < 0) return cur;

    const Node& nd = cur.node(target);
    const int i = nd.agent;
    QueryClass c = classify_query(idx, target);
    const Rat hi = idx.type_value(i, HighBit(idx.Avail(target, i)));
    const Rat lo = idx.type_value(i, LowBit(idx.Avail(target, i)));
    if (!c.strongly_ineffective && !c.StronglyOnlyEffective(hi) &&
        !c.StronglyOnlyEffective(lo)) {
      throw TransformError(target,
                           "query is neither strongly ineffective nor "
                           "strongly only-extreme effective");
    }
    // Rebuild: everything outside the target is copied as is.
    ImplementationTree next;
    next.agents = cur.agents;
    next.domains = cur.domains;
    next.root = 0;
    std::function<NodeId(NodeId)> copy = [&](NodeId v) -> NodeId {
      const Node& src = cur.node(v);
      NodeId mine = next.size();
      if (v == target) {
        std::vector<Rat> dom;
        for (const auto& b : src.blocks)
          dom.insert(dom.end(), b.begin(), b.end());
        std::sort(dom.begin(), dom.end());
        Node rev;
        rev.id = mine;
        rev.leaf = false;
        rev.agent = i;
        next.nodes.push_back(rev);
        std::vector<std::vector<Rat>> blocks;
        std::vector<NodeId> children;
        for (const Rat& t : dom) {
          NodeId child = -1;
          for (std::size_t s = 0; s < src.blocks.size(); ++s) {
            if (std::find(src.blocks[s].begin(), src.blocks[s].end(), t) !=
                src.blocks[s].end()) {
              child = CopyRestricted(cur, src.children[s], i, t, next);
            }
          }
          blocks.push_back({t});
          children.push_back(child);
        }
        next.nodes[mine].blocks = std::move(blocks);
        next.nodes[mine].children = std::move(children);
        return mine;
      }
      next.nodes.push_back(src);
      next.nodes[mine].id = mine;
      for (std::size_t s = 0; s < src.children.size(); ++s) {
        NodeId ch = copy(src.children[s]);
        next.nodes[mine].children[s] = ch;
      }
      return mine;
    };
    copy(cur.root);
    cur = Canonicalize(next);
  }
}

}  // namespace ospkit
