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

#include "ospkit/greedy.h"

#include <algorithm>
#include <stdexcept>

#include "ospkit/tree_index.h"

namespace ospkit {

Rat ValuationToCost(const Rat& v) { return -v; }

TypeDomain ValuationToCost(const TypeDomain& d) {
  TypeDomain out;
  for (auto it = d.values.rbegin(); it != d.values.rend(); ++it) {
    out.values.push_back(ValuationToCost(*it));
  }
  return out;
}

Profile ValuationToCost(const Profile& v) {
  Profile out;
  out.reserve(v.size());
  for (const Rat& x : v) out.push_back(ValuationToCost(x));
  return out;
}

GreedyState::GreedyState(const PSystem& p, const TypeDomain& d)
    : p_(&p), dom_(p.size(), d.values) {
  if (d.values.empty()) throw PSystemError("empty type domain");
}

int GreedyState::MinAlive() const {
  ElementSet a = alive();
  return a == 0 ? -1 : __builtin_ctz(a);
}

int GreedyState::MaxAlive() const {
  ElementSet a = alive();
  return a == 0 ? -1 : 31 - __builtin_clz(a);
}

void GreedyState::Initialize() {
  s_ = unremovable(0, 0, *p_);
  x_ = removable(0, 0, *p_);
  CheckInvariant();
}

void GreedyState::CheckAsk(int j) const {
  if (j < 0 || j >= p_->size() || !IsAlive(j)) {
    throw PSystemError("element " + std::to_string(j) + " is not alive");
  }
  if (dom_[j].size() < 2) {
    throw PSystemError("element " + std::to_string(j) +
                       " has a single value left");
  }
}

void GreedyState::CheckInvariant() const {
  // Throws when S cannot be extended to a maximal set avoiding X.
  unremovable(s_, x_, *p_);
}

QueryStep GreedyState::BottomQuery(int j, const Profile& truth) {
  CheckAsk(j);
  const Rat t = dom_[j].front();
  const bool yes = truth.at(j) == t;
  trace_.push_back({j, false, t, yes});
  if (!yes) {
    dom_[j].erase(dom_[j].begin());
    return QueryStep::kContinue;
  }
  dom_[j] = {t};
  x_ |= Bit(j);
  s_ |= unremovable(s_, x_, *p_);
  CheckInvariant();
  return Done() ? QueryStep::kDone : QueryStep::kContinue;
}

QueryStep GreedyState::TopQuery(int j, const Profile& truth) {
  CheckAsk(j);
  const Rat t = dom_[j].back();
  const bool yes = truth.at(j) == t;
  trace_.push_back({j, true, t, yes});
  if (!yes) {
    dom_[j].pop_back();
    return QueryStep::kContinue;
  }
  dom_[j] = {t};
  s_ |= Bit(j);
  x_ |= removable(s_, x_, *p_);
  CheckInvariant();
  return Done() ? QueryStep::kDone : QueryStep::kContinue;
}

void GreedyState::Accept(int j) {
  if (j < 0 || !IsAlive(j)) throw PSystemError("accepting a dead element");
  s_ |= Bit(j);
  s_ |= unremovable(s_, x_, *p_);
  CheckInvariant();
}

void GreedyState::Exclude(int j) {
  if (j < 0 || !IsAlive(j)) throw PSystemError("excluding a dead element");
  x_ |= Bit(j);
  s_ |= unremovable(s_, x_, *p_);
  CheckInvariant();
}

GreedyRun run_two_way_greedy(const PSystem& p, const TypeDomain& d,
                             const Profile& truth) {
  const int n = p.size();
  if (static_cast<int>(truth.size()) != n) {
    throw PSystemError("truth has the wrong number of entries");
  }
  for (const Rat& v : truth) {
    if (d.IndexOf(v) < 0) throw PSystemError("truth value outside the domain");
  }
  GreedyState st(p, d);
  GreedyRun run;
  auto finish = [&]() {
    run.solution = st.accepted();
    run.excluded = st.excluded();
    run.trace = st.trace();
    return run;
  };
  auto size = [&](int j) { return static_cast<int>(st.remaining(j).size()); };
  // A query on a single remaining value carries no information; skip it.
  auto bq = [&](int j) {
    return size(j) >= 2 && st.BottomQuery(j, truth) == QueryStep::kDone;
  };
  auto tq = [&](int j) {
    return size(j) >= 2 && st.TopQuery(j, truth) == QueryStep::kDone;
  };
  long steps = 0;
  const long limit = 16L * (n + 1) * (d.size() + 1);
  auto tick = [&]() {
    if (++steps > limit) throw PSystemError("two-way greedy did not settle");
  };

  st.Initialize();
  if (st.alive() == 0) return finish();
  const int b = 1 - d.size() % 2;

  int j = -1;
  while (j != st.MinAlive()) {
    tick();
    if (bq(st.MinAlive())) return finish();
    ++j;
  }

  while (size(st.MinAlive()) > 2 + b || size(st.MaxAlive()) > 1 + b) {
    tick();
    for (int c = 0; c < n; ++c) {
      if (!st.IsAlive(c) || c <= st.MinAlive() || size(c) <= 2) continue;
      if (bq(c)) return finish();
      if (st.IsAlive(c) && bq(c)) return finish();
    }
    j = st.MinAlive();
    if (size(j) > 2 + b) {
      if (bq(j)) return finish();
      if (st.IsAlive(j) && bq(j)) return finish();
      while (j != st.MinAlive()) {
        tick();
        if (bq(st.MinAlive())) return finish();
        ++j;
      }
    }
  }

  if (b == 1) {
    for (int c = 0; c < n; ++c) {
      if (!st.IsAlive(c) || c <= st.MinAlive()) continue;
      if (tq(c)) return finish();
    }
  }
  if (bq(st.MinAlive())) return finish();
  st.Accept(st.MinAlive());

  // Whatever is still undecided has a revealed type; finish by reverse
  // greedy over those elements.
  while (st.alive() != 0) {
    int pick = -1;
    for (int e : Elements(st.alive())) {
      if (st.remaining(e).size() != 1) {
        throw std::logic_error("undecided element with unrevealed type");
      }
      if (pick < 0 || st.remaining(e).front() <= st.remaining(pick).front()) {
        pick = e;
      }
    }
    run.completed |= Bit(pick);
    st.Exclude(pick);
  }
  return finish();
}

namespace {

struct TrieNode {
  bool set = false;
  bool leaf = false;
  int agent = -1;
  bool top = false;
  Rat asked;
  int yes = -1;
  int no = -1;
  ElementSet outcome = 0;
};

class TreeBuilder {
 public:
  TreeBuilder(const PSystem& p, const TypeDomain& d) : p_(p), d_(d) {
    trie_.emplace_back();
  }

  void Add(const GreedyRun& run) {
    int cur = 0;
    for (const GreedyQuery& q : run.trace) {
      TrieNode& nd = trie_[cur];
      if (!nd.set) {
        nd.set = true;
        nd.agent = q.agent;
        nd.top = q.top;
        nd.asked = q.asked;
      } else if (nd.leaf || nd.agent != q.agent || nd.top != q.top ||
                 nd.asked != q.asked) {
        throw std::logic_error("greedy runs disagree on the next query");
      }
      int next = q.yes ? nd.yes : nd.no;
      if (next < 0) {
        next = static_cast<int>(trie_.size());
        (q.yes ? trie_[cur].yes : trie_[cur].no) = next;
        trie_.emplace_back();
      }
      cur = next;
    }
    TrieNode& nd = trie_[cur];
    if (!nd.set) {
      nd.set = true;
      nd.leaf = true;
      nd.outcome = run.solution;
    } else if (!nd.leaf || nd.outcome != run.solution) {
      throw std::logic_error("greedy runs disagree on the outcome");
    }
  }

  ImplementationTree Build() {
    ImplementationTree t;
    t.agents = p_.size();
    t.domains.assign(p_.size(), ValuationToCost(d_));
    std::vector<std::vector<Rat>> rem(p_.size(), d_.values);
    t.root = Emit(0, rem, t);
    return Canonicalize(t);
  }

 private:
  NodeId Emit(int v, std::vector<std::vector<Rat>>& rem,
              ImplementationTree& t) {
    const TrieNode& nd = trie_[v];
    Node out;
    out.id = t.size();
    t.nodes.emplace_back();
    if (!nd.set) throw std::logic_error("unreached branch in greedy tree");
    if (nd.leaf) {
      out.leaf = true;
      for (int e = 0; e < p_.size(); ++e) {
        out.outcome.push_back(Rat(Has(nd.outcome, e) ? 1 : 0));
        out.payment.push_back(Rat(0));
      }
      t.nodes[out.id] = out;
      return out.id;
    }
    const int i = nd.agent;
    std::vector<Rat> saved = rem[i];
    std::vector<Rat> rest;
    for (const Rat& v2 : saved) {
      if (v2 != nd.asked) rest.push_back(v2);
    }
    std::vector<Rat> yes_block = {ValuationToCost(nd.asked)};
    std::vector<Rat> no_block;
    for (auto it = rest.rbegin(); it != rest.rend(); ++it) {
      no_block.push_back(ValuationToCost(*it));
    }
    rem[i] = {nd.asked};
    NodeId yes = Emit(nd.yes, rem, t);
    rem[i] = rest;
    NodeId no = Emit(nd.no, rem, t);
    rem[i] = saved;
    out.leaf = false;
    out.agent = i;
    // The largest valuation is the smallest cost.
    if (nd.top) {
      out.blocks = {yes_block, no_block};
      out.children = {yes, no};
    } else {
      out.blocks = {no_block, yes_block};
      out.children = {no, yes};
    }
    t.nodes[out.id] = out;
    return out.id;
  }

  const PSystem& p_;
  const TypeDomain& d_;
  std::vector<TrieNode> trie_;
};

// Calls `fn` on every profile over `d`^n, agent 0 most significant.
template <typename Fn>
void ForEachProfile(int n, const TypeDomain& d, Fn fn) {
  std::int64_t count = 1;
  for (int i = 0; i < n; ++i) {
    count *= d.size();
    CheckScale(count, "profiles");
  }
  std::vector<int> idx(n, 0);
  Profile prof(n, d.values.front());
  for (std::int64_t c = 0; c < count; ++c) {
    for (int i = 0; i < n; ++i) prof[i] = d.values[idx[i]];
    fn(prof);
    for (int i = n - 1; i >= 0; --i) {
      if (++idx[i] < d.size()) break;
      idx[i] = 0;
    }
  }
}

}  // namespace

ImplementationTree extract_tree(const PSystem& p, const TypeDomain& d) {
  TreeBuilder builder(p, d);
  std::vector<std::pair<Profile, ElementSet>> runs;
  ForEachProfile(p.size(), d, [&](const Profile& v) {
    GreedyRun r = run_two_way_greedy(p, d, v);
    builder.Add(r);
    runs.emplace_back(v, r.solution);
  });
  ImplementationTree tree = builder.Build();
  for (const auto& [v, sol] : runs) {
    LeafResult lr = leaf_of(tree, ValuationToCost(v));
    for (int e = 0; e < p.size(); ++e) {
      if (lr.outcome[e] != Rat(Has(sol, e) ? 1 : 0)) {
        throw std::logic_error("extracted tree disagrees with the greedy run");
      }
    }
  }
  return tree;
}

namespace {

class AuctionBuilder {
 public:
  AuctionBuilder(int n, const TypeDomain& d) : n_(n), d_(d) {
    tree_.agents = n;
    tree_.domains.assign(n, ValuationToCost(d));
  }

  ImplementationTree Run() {
    tree_.root = Build((1u << n_) - 1, 0, n_ - 1);
    return Canonicalize(tree_);
  }

 private:
  NodeId Leaf(unsigned avail, const Rat& price) {
    Node nd;
    nd.id = tree_.size();
    const int winner = __builtin_ctz(avail);
    for (int i = 0; i < n_; ++i) {
      nd.outcome.push_back(Rat(i == winner ? 1 : 0));
      nd.payment.push_back(i == winner ? ValuationToCost(price) : Rat(0));
    }
    tree_.nodes.push_back(nd);
    return nd.id;
  }

  // Round r asks agents at or below `pos`; agents above it already
  // answered no in this round.
  NodeId Build(unsigned avail, int r, int pos) {
    if (r >= d_.size() - 1) {
      return Leaf(avail, d_.values[std::max(0, d_.size() - 2)]);
    }
    int a = pos;
    while (a >= 0 && !((avail >> a) & 1u)) --a;
    if (a < 0) return Build(avail, r + 1, n_ - 1);

    NodeId id = tree_.size();
    tree_.nodes.emplace_back();
    const unsigned after = avail & ~(1u << a);
    NodeId yes = __builtin_popcount(after) == 1 ? Leaf(after, d_.values[r])
                                                : Build(after, r, a - 1);
    NodeId no = Build(avail, r, a - 1);
    Node nd;
    nd.id = id;
    nd.leaf = false;
    nd.agent = a;
    std::vector<Rat> rest;
    for (int t = d_.size() - 1; t > r; --t) {
      rest.push_back(ValuationToCost(d_.values[t]));
    }
    nd.blocks = {rest, {ValuationToCost(d_.values[r])}};
    nd.children = {no, yes};
    tree_.nodes[id] = nd;
    return id;
  }

  int n_;
  const TypeDomain& d_;
  ImplementationTree tree_;
};

}  // namespace

ImplementationTree english_auction_tree(int n, const TypeDomain& d) {
  if (n < 2 || n > 16) throw TreeError("auction needs 2..16 agents");
  if (d.values.empty()) throw TreeError("empty type domain");
  return AuctionBuilder(n, d).Run();
}

Rat approx_ratio(const PSystem& p, const ImplementationTree& tree) {
  if (!HasBinaryOutcomes(tree)) throw TreeError("outcomes must be 0 or 1");
  if (tree.agents != p.size()) {
    throw PSystemError("tree and p-system sizes differ");
  }
  TreeIndex idx(tree);
  Rat worst(1);
  std::vector<Rat> weights(p.size());
  for (int code = 0; code < idx.num_profiles(); ++code) {
    ElementSet s = 0;
    for (int i = 0; i < p.size(); ++i) {
      weights[i] = ValuationToCost(idx.type_value(i, idx.TypeAt(code, i)));
      if (idx.F(code, i) == Rat(1)) s |= Bit(i);
    }
    if (!p.Feasible(s)) {
      throw PSystemError("tree outcome " + SetToString(s) + " is infeasible");
    }
    const Rat opt = Optimum(p, weights);
    const Rat got = Weight(s, weights);
    const Rat ratio = opt.is_zero() ? Rat(1) : got / opt;
    worst = Min(worst, ratio);
  }
  return worst;
}

}  // namespace ospkit
