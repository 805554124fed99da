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

#include "ospkit/tree.h"

#include <algorithm>
#include <functional>
#include <limits>
#include <set>

#include "ospkit/tree_index.h"

namespace ospkit {

int TypeDomain::IndexOf(const Rat& t) const {
  auto it = std::lower_bound(values.begin(), values.end(), t);
  if (it == values.end() || *it != t) return -1;
  return static_cast<int>(it - values.begin());
}

Horizon Horizon::Finite(int k) {
  if (k < 0) throw std::invalid_argument("horizon must be non-negative");
  Horizon h;
  h.infinite_ = false;
  h.k_ = k;
  return h;
}

Horizon Horizon::Parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Infinity") {
    return Infinity();
  }
  std::size_t pos = 0;
  int k = 0;
  try {
    k = std::stoi(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad horizon \"" + text + "\"");
  }
  if (pos != text.size() || k < 0) {
    throw std::invalid_argument("bad horizon \"" + text + "\"");
  }
  return Finite(k);
}

int Horizon::k() const {
  if (infinite_) throw std::logic_error("infinite horizon has no integer k");
  return k_;
}

std::string Horizon::ToString() const {
  return infinite_ ? "inf" : std::to_string(k_);
}

namespace {

void Add(std::vector<Diagnostic>& out, NodeId node, std::string rule,
         std::string detail = {}) {
  out.push_back({node, std::move(rule), std::move(detail)});
}

}  // namespace

std::vector<Diagnostic> validate_tree(const ImplementationTree& tree) {
  std::vector<Diagnostic> out;
  if (tree.agents < 1) {
    Add(out, -1, "no agents");
    return out;
  }
  if (static_cast<int>(tree.domains.size()) != tree.agents) {
    Add(out, -1, "domain count mismatch",
        std::to_string(tree.domains.size()) + " domains for " +
            std::to_string(tree.agents) + " agents");
    return out;
  }
  for (int i = 0; i < tree.agents; ++i) {
    const auto& v = tree.domains[i].values;
    if (v.empty()) Add(out, -1, "empty domain", "agent " + std::to_string(i));
    for (std::size_t j = 1; j < v.size(); ++j) {
      if (!(v[j - 1] < v[j])) {
        Add(out, -1, "domain not strictly increasing",
            "agent " + std::to_string(i));
        break;
      }
    }
  }
  for (std::size_t j = 0; j < tree.nodes.size(); ++j) {
    if (tree.nodes[j].id != static_cast<NodeId>(j)) {
      Add(out, tree.nodes[j].id, "node ids not dense",
          "node at position " + std::to_string(j));
    }
  }
  if (!out.empty()) return out;
  const int m = tree.size();
  if (tree.root < 0 || tree.root >= m) {
    Add(out, -1, "root out of range");
    return out;
  }

  // Walk the tree carrying the current domain of every agent.
  std::vector<int> seen(m, 0);
  std::vector<std::vector<Rat>> dom(tree.agents);
  for (int i = 0; i < tree.agents; ++i) dom[i] = tree.domains[i].values;
  // Below a malformed node domains are unknown; its subtree is only marked
  // as reached so that it is not also reported as unreachable.
  std::function<void(NodeId)> mark = [&](NodeId id) {
    if (id < 0 || id >= m || seen[id]) return;
    seen[id] = 1;
    for (NodeId c : tree.nodes[id].children) mark(c);
  };
  auto mark_children = [&](const Node& nd) {
    for (NodeId c : nd.children) mark(c);
  };
  std::function<void(NodeId)> visit = [&](NodeId id) {
    if (seen[id]++) {
      Add(out, id, "node reached twice");
      return;
    }
    const Node& nd = tree.nodes[id];
    if (nd.leaf) {
      if (!nd.blocks.empty() || !nd.children.empty()) {
        Add(out, id, "leaf with children");
      }
      if (static_cast<int>(nd.outcome.size()) != tree.agents) {
        Add(out, id, "outcome length mismatch");
      }
      if (static_cast<int>(nd.payment.size()) != tree.agents) {
        Add(out, id, "payment length mismatch");
      }
      return;
    }
    if (nd.agent < 0 || nd.agent >= tree.agents) {
      Add(out, id, "agent out of range");
      mark_children(nd);
      return;
    }
    if (nd.blocks.size() < 2) Add(out, id, "fewer than two blocks");
    if (nd.children.size() != nd.blocks.size()) {
      Add(out, id, "child count mismatch");
      mark_children(nd);
      return;
    }
    const auto& cur = dom[nd.agent];
    std::set<Rat> used;
    bool ok = true;
    for (const auto& b : nd.blocks) {
      if (b.empty()) {
        Add(out, id, "empty block");
        ok = false;
      }
      for (const Rat& t : b) {
        if (!std::binary_search(cur.begin(), cur.end(), t)) {
          Add(out, id, "value outside current domain", t.ToString());
          ok = false;
        } else if (!used.insert(t).second) {
          Add(out, id, "overlapping blocks", t.ToString());
          ok = false;
        }
      }
    }
    if (ok && used.size() != cur.size()) {
      Add(out, id, "non-exhaustive partition");
      ok = false;
    }
    for (NodeId c : nd.children) {
      if (c < 0 || c >= m) {
        Add(out, id, "child out of range", std::to_string(c));
        ok = false;
      }
    }
    if (!ok) {
      mark_children(nd);
      return;
    }
    std::vector<Rat> saved = cur;
    for (std::size_t s = 0; s < nd.blocks.size(); ++s) {
      std::vector<Rat> b = nd.blocks[s];
      std::sort(b.begin(), b.end());
      dom[nd.agent] = std::move(b);
      visit(nd.children[s]);
    }
    dom[nd.agent] = std::move(saved);
  };
  visit(tree.root);
  for (int id = 0; id < m; ++id) {
    if (!seen[id]) Add(out, id, "unreachable node");
  }
  return out;
}

ImplementationTree Canonicalize(const ImplementationTree& tree) {
  ImplementationTree out;
  out.agents = tree.agents;
  out.domains = tree.domains;
  out.root = 0;
  std::function<NodeId(NodeId)> copy = [&](NodeId id) -> NodeId {
    const Node& src = tree.nodes.at(id);
    NodeId mine = out.size();
    out.nodes.push_back(src);
    out.nodes[mine].id = mine;
    for (auto& b : out.nodes[mine].blocks) std::sort(b.begin(), b.end());
    for (std::size_t s = 0; s < src.children.size(); ++s) {
      NodeId c = copy(src.children[s]);
      out.nodes[mine].children[s] = c;
    }
    return mine;
  };
  copy(tree.root);
  return out;
}

bool HasBinaryOutcomes(const ImplementationTree& tree) {
  for (const Node& nd : tree.nodes) {
    if (!nd.leaf) continue;
    for (const Rat& f : nd.outcome) {
      if (f != Rat(0) && f != Rat(1)) return false;
    }
  }
  return true;
}

LeafResult leaf_of(const ImplementationTree& tree, const Profile& b) {
  if (static_cast<int>(b.size()) != tree.agents) {
    throw TreeError("profile has " + std::to_string(b.size()) +
                    " types, expected " + std::to_string(tree.agents));
  }
  for (int i = 0; i < tree.agents; ++i) {
    if (tree.domains[i].IndexOf(b[i]) < 0) {
      throw TreeError("type " + b[i].ToString() + " of agent " +
                      std::to_string(i) + " is outside its domain");
    }
  }
  NodeId cur = tree.root;
  while (!tree.node(cur).leaf) {
    const Node& nd = tree.node(cur);
    NodeId next = -1;
    for (std::size_t s = 0; s < nd.blocks.size() && next < 0; ++s) {
      for (const Rat& t : nd.blocks[s]) {
        if (t == b[nd.agent]) {
          next = nd.children[s];
          break;
        }
      }
    }
    if (next < 0) throw TreeError("profile falls outside the tree");
    cur = next;
  }
  const Node& leaf = tree.node(cur);
  return {cur, leaf.outcome, leaf.payment};
}

int query_count(const ImplementationTree& tree, int agent, NodeId leaf) {
  std::vector<NodeId> parent(tree.size(), -1);
  for (const Node& nd : tree.nodes) {
    for (NodeId c : nd.children) parent.at(c) = nd.id;
  }
  if (leaf < 0 || leaf >= tree.size() || !tree.node(leaf).leaf) {
    throw TreeError("node " + std::to_string(leaf) + " is not a leaf");
  }
  int q = 0;
  for (NodeId v = parent[leaf]; v >= 0; v = parent[v]) {
    if (tree.node(v).agent == agent) ++q;
  }
  return q;
}

Neighborhood k_step_neighborhood(const ImplementationTree& tree, NodeId u,
                                 Horizon k) {
  const Node& top = tree.node(u);
  if (top.leaf) throw TreeError("node " + std::to_string(u) + " is a leaf");
  const int agent = top.agent;
  const long stop = k.infinite() ? std::numeric_limits<long>::max()
                                 : static_cast<long>(k.k()) + 1;
  Neighborhood out;
  std::function<void(NodeId, long)> walk = [&](NodeId v, long seen) {
    const Node& nd = tree.node(v);
    if (nd.leaf) {
      out.limit.push_back(v);
      return;
    }
    if (nd.agent == agent && ++seen == stop) {
      out.limit.push_back(v);
      return;
    }
    out.nodes.push_back(v);
    for (NodeId c : nd.children) walk(c, seen);
  };
  for (NodeId c : top.children) walk(c, 0);
  std::sort(out.nodes.begin(), out.nodes.end());
  std::sort(out.limit.begin(), out.limit.end());
  return out;
}

std::vector<Profile> gamma_class(const ImplementationTree& tree, NodeId u,
                                 const Profile& a, Horizon k) {
  TreeIndex idx(tree);
  if (u < 0 || u >= tree.size()) throw TreeError("node out of range");
  if (idx.IsLeaf(u))
    throw TreeError("node " + std::to_string(u) + " is a leaf");
  int code = idx.FromProfile(a);
  const auto& at = idx.ProfilesAt(u);
  if (!std::binary_search(at.begin(), at.end(), code)) {
    throw TreeError("profile is not available at node " + std::to_string(u));
  }
  NodeId end = idx.HorizonEnd(code, u, k);
  std::vector<Profile> out;
  for (int b : at) {
    if (idx.HorizonEnd(b, u, k) == end) out.push_back(idx.ToProfile(b));
  }
  return out;
}

}  // namespace ospkit
