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

#include "ospkit/search.h"

#include <array>
#include <stdexcept>
#include <unordered_map>

#include "ospkit/greedy.h"
#include "ospkit/tree_index.h"
#include "ospkit/tree_transform.h"

namespace ospkit {

namespace {

constexpr int kAgents = 2;
constexpr int kGreedySide = 1;   // top type singleton, outcome 1
constexpr int kReverseSide = 2;  // bottom type singleton, outcome 0

// Phase of an agent's last permitted run of queries.
enum Phase : int { kOpen = 0, kMustReveal = 1, kClosed = 2 };

struct State {
  std::array<int, kAgents> lo{}, hi{};  // valuation indices
  std::array<int, kAgents> sides{};
  std::array<int, kAgents> runs{};
  std::array<int, kAgents> phase{};
  int last = -1;

  std::uint32_t Key() const {
    std::uint32_t key = 0;
    for (int i = 0; i < kAgents; ++i) {
      key = key * 4 + lo[i];
      key = key * 4 + hi[i];
      key = key * 4 + sides[i];
      key = key * 8 + std::min(runs[i], 7);
      key = key * 4 + phase[i];
    }
    return key * 4 + (last + 1);
  }
};

// Outcome function: accepted set per profile, code = v0 * d + v1.
using Outcomes = std::vector<ElementSet>;

class Solver {
 public:
  Solver(int d, int k, const Outcomes& f) : d_(d), k_(k), f_(f) {}

  bool Solve(const State& s) {
    const std::uint32_t key = s.Key();
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second.ok;
    Choice best;
    if (IsLeaf(s)) {
      best = {true, -1, 0, kOpen};
    } else {
      for (int i = 0; i < kAgents && !best.ok; ++i) {
        for (int dir = 0; dir < 2 && !best.ok; ++dir) {
          for (int phase : {kClosed, kMustReveal, kOpen}) {
            State yes, no;
            if (!Step(s, i, dir, phase, yes, no)) continue;
            if (Solve(yes) && Solve(no)) {
              best = {true, i, dir, phase};
              break;
            }
          }
        }
      }
    }
    memo_[key] = best;
    return best.ok;
  }

  std::size_t states() const { return memo_.size(); }

  ImplementationTree Build(const State& root, const TypeDomain& d) {
    ImplementationTree t;
    t.agents = kAgents;
    t.domains.assign(kAgents, ValuationToCost(d));
    t.root = Emit(root, d, t);
    return Canonicalize(t);
  }

 private:
  struct Choice {
    bool ok = false;
    int agent = -1;  // -1 for a leaf
    int dir = 0;     // 0 asks the bottom type, 1 the top type
    int phase = kOpen;
  };

  int F(int v0, int v1, int i) const {
    return Has(f_[v0 * d_ + v1], i) ? 1 : 0;
  }
  int FAt(int i, int t, int other, int agent) const {
    return agent == 0 ? F(t, other, i) : F(other, t, i);
  }

  bool IsLeaf(const State& s) const {
    for (int i = 0; i < kAgents; ++i) {
      if (s.phase[i] == kMustReveal && s.lo[i] < s.hi[i]) return false;
    }
    const ElementSet first = f_[s.lo[0] * d_ + s.lo[1]];
    for (int a = s.lo[0]; a <= s.hi[0]; ++a) {
      for (int b = s.lo[1]; b <= s.hi[1]; ++b) {
        if (f_[a * d_ + b] != first) return false;
      }
    }
    return true;
  }

  // Agent i's outcome over the box of `s`, as (own type, other's type).
  template <typename Pred>
  bool All(const State& s, int i, Pred pred) const {
    const int o = 1 - i;
    for (int t = s.lo[i]; t <= s.hi[i]; ++t) {
      for (int y = s.lo[o]; y <= s.hi[o]; ++y) {
        if (!pred(t, y, FAt(i, t, y, i))) return false;
      }
    }
    return true;
  }

  // Restrictions on agent i's last permitted compressed query at `s`.
  struct LastQuery {
    bool reveal = false;  // as a full revelation
    bool bottom = false;  // as a single query on the bottom type
    bool top = false;     // as a single query on the top type
  };

  LastQuery LastAllowed(const State& s, int i) const {
    const int o = 1 - i;
    const int lo = s.lo[i], hi = s.hi[i];
    auto pointwise = [&](int skip) {
      for (int y = s.lo[o]; y <= s.hi[o]; ++y) {
        int ref = -1;
        for (int t = lo; t <= hi; ++t) {
          if (t == skip) continue;
          int v = FAt(i, t, y, i);
          if (ref < 0)
            ref = v;
          else if (ref != v)
            return false;
        }
      }
      return true;
    };
    auto globally = [&](int skip) {
      int ref = -1;
      for (int y = s.lo[o]; y <= s.hi[o]; ++y) {
        for (int t = lo; t <= hi; ++t) {
          if (t == skip) continue;
          int v = FAt(i, t, y, i);
          if (ref < 0)
            ref = v;
          else if (ref != v)
            return false;
        }
      }
      return true;
    };
    auto effective = [&](int t) {
      for (int y = s.lo[o]; y <= s.hi[o]; ++y) {
        for (int u = lo; u <= hi; ++u) {
          if (u != t && FAt(i, u, y, i) != FAt(i, t, y, i)) return true;
        }
      }
      return false;
    };
    // The bottom valuation is the top cost and vice versa.
    const bool cost_prefix_side = hi - lo == 1 || hi == d_ - 1;
    const bool cost_suffix_side = lo == 0;
    const bool si = globally(-1);
    LastQuery q;
    q.reveal = (cost_prefix_side && (si || (effective(lo) && globally(lo)))) ||
               (cost_suffix_side && (si || (effective(hi) && globally(hi))));
    q.bottom = cost_prefix_side && effective(lo) && pointwise(lo);
    q.top = cost_suffix_side && effective(hi) && pointwise(hi);
    return q;
  }

  bool Step(const State& s, int i, int dir, int phase, State& yes,
            State& no) const {
    const int lo = s.lo[i], hi = s.hi[i];
    if (lo == hi || s.phase[i] == kClosed) return false;
    const bool pair = hi - lo == 1;
    if (pair && dir == 1) return false;  // same split as dir 0
    for (int j = 0; j < kAgents; ++j) {
      if (j != i && s.phase[j] == kMustReveal && s.lo[j] < s.hi[j]) {
        return false;
      }
    }

    int sides = 0;
    if ((dir == 0 || pair) &&
        All(s, i, [&](int t, int, int v) { return t != lo || v == 0; })) {
      sides |= kReverseSide;
    }
    if ((dir == 1 || pair) &&
        All(s, i, [&](int t, int, int v) { return t != hi || v == 1; })) {
      sides |= kGreedySide;
    }
    if (sides == 0) return false;
    const bool revealable =
        All(s, i, [&](int t, int, int v) { return t == hi || v == 1; }) ||
        All(s, i, [&](int t, int, int v) { return t == lo || v == 0; });
    State base = s;
    if (!revealable) {
      base.sides[i] &= sides;
      if (base.sides[i] == 0) return false;
    }

    const bool continuing = s.last == i;
    if (continuing) {
      if (phase != kOpen) return false;
    } else {
      const int run = s.runs[i] + 1;
      if (run > k_ + 2) return false;
      base.runs[i] = run;
      if (run < k_ + 2) {
        if (phase != kOpen) return false;
        base.phase[i] = kOpen;
      } else {
        LastQuery q = LastAllowed(s, i);
        if (pair) {
          if (phase != kOpen || !(q.reveal || q.bottom || q.top)) return false;
          base.phase[i] = kClosed;
        } else if (phase == kClosed) {
          if (!(dir == 0 ? q.bottom : q.top)) return false;
          base.phase[i] = kClosed;
        } else if (phase == kMustReveal) {
          if (!q.reveal) return false;
          base.phase[i] = kMustReveal;
        } else {
          return false;
        }
      }
    }
    base.last = i;
    yes = base;
    no = base;
    if (dir == 0) {
      yes.hi[i] = lo;
      no.lo[i] = lo + 1;
    } else {
      yes.lo[i] = hi;
      no.hi[i] = hi - 1;
    }
    return true;
  }

  NodeId Emit(const State& s, const TypeDomain& d, ImplementationTree& t) {
    const Choice& c = memo_.at(s.Key());
    Node nd;
    nd.id = t.size();
    t.nodes.emplace_back();
    if (c.agent < 0) {
      const ElementSet out = f_[s.lo[0] * d_ + s.lo[1]];
      for (int i = 0; i < kAgents; ++i) {
        nd.outcome.push_back(Rat(Has(out, i) ? 1 : 0));
        nd.payment.push_back(Rat(0));
      }
      t.nodes[nd.id] = nd;
      return nd.id;
    }
    State yes, no;
    if (!Step(s, c.agent, c.dir, c.phase, yes, no)) {
      throw std::logic_error("search replay diverged");
    }
    const NodeId yes_id = Emit(yes, d, t);
    const NodeId no_id = Emit(no, d, t);
    const int i = c.agent;
    auto costs = [&](int from, int to) {
      std::vector<Rat> out;
      for (int v = to; v >= from; --v)
        out.push_back(ValuationToCost(d.values[v]));
      return out;
    };
    nd.leaf = false;
    nd.agent = i;
    if (c.dir == 0) {
      nd.blocks = {costs(no.lo[i], no.hi[i]), costs(yes.lo[i], yes.hi[i])};
      nd.children = {no_id, yes_id};
    } else {
      nd.blocks = {costs(yes.lo[i], yes.hi[i]), costs(no.lo[i], no.hi[i])};
      nd.children = {yes_id, no_id};
    }
    t.nodes[nd.id] = nd;
    return nd.id;
  }

  int d_;
  int k_;
  const Outcomes& f_;
  std::unordered_map<std::uint32_t, Choice> memo_;
};

}  // namespace

SearchResult search_two_way_greedy(const PSystem& p, const TypeDomain& d, int k,
                                   const Rat& target, bool forward_only) {
  if (p.size() != kAgents || d.size() > 4 || d.size() < 1) {
    throw TreeError("scale guard: search needs 2 elements and 1..4 types");
  }
  if (k < 0) throw TreeError("k must be non-negative");
  const int dn = d.size();
  const int profiles = dn * dn;

  // Outcomes allowed at each profile, smallest sets first.
  std::vector<std::vector<ElementSet>> allowed(profiles);
  for (int code = 0; code < profiles; ++code) {
    std::vector<Rat> w = {d.values[code / dn], d.values[code % dn]};
    const Rat opt = Optimum(p, w);
    for (int size = 0; size <= kAgents; ++size) {
      for (ElementSet s = 0; s <= p.Ground(); ++s) {
        if (__builtin_popcount(s) != size || !p.Feasible(s)) continue;
        const Rat got = Weight(s, w);
        const Rat ratio = opt.is_zero() ? Rat(1) : got / opt;
        if (ratio >= target) allowed[code].push_back(s);
      }
    }
    if (allowed[code].empty()) return {};
  }

  SearchResult result;
  std::vector<int> pick(profiles, 0);
  Outcomes f(profiles);
  State root;
  for (int i = 0; i < kAgents; ++i) {
    root.lo[i] = 0;
    root.hi[i] = dn - 1;
    root.sides[i] = forward_only ? kGreedySide : kGreedySide | kReverseSide;
  }
  for (;;) {
    ++result.functions_tried;
    CheckScale(result.functions_tried, "candidate outcome functions");
    for (int c = 0; c < profiles; ++c) f[c] = allowed[c][pick[c]];
    Solver solver(dn, k, f);
    const bool ok = solver.Solve(root);
    result.states += static_cast<std::int64_t>(solver.states());
    if (ok) {
      result.found = true;
      result.tree = solver.Build(root, d);
      TwoWayVerdict tw = is_two_way_greedy(result.tree);
      KLimitedVerdict kl = is_k_limitable(result.tree, k);
      if (!tw.pass || !kl.pass || approx_ratio(p, result.tree) < target) {
        throw std::logic_error("search produced a tree failing its checks: " +
                               tw.reason + kl.reason);
      }
      return result;
    }
    int c = profiles - 1;
    while (c >= 0 && ++pick[c] == static_cast<int>(allowed[c].size())) {
      pick[c] = 0;
      --c;
    }
    if (c < 0) return result;
  }
}

}  // namespace ospkit
