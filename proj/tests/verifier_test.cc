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

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "ospkit/cmon.h"
#include "ospkit/fixtures.h"
#include "ospkit/greedy.h"
#include "ospkit/tree_transform.h"
#include "support.h"

namespace ospkit {
namespace {

using testing::AllProfiles;
using testing::Hand;
using testing::Rats;

// Adds `delta` to the payment of every leaf entry whose quantity is `level`.
ImplementationTree ShiftLevel(ImplementationTree t, int level, int delta) {
  for (Node& n : t.nodes) {
    if (!n.leaf) continue;
    for (int i = 0; i < t.agents; ++i) {
      if (n.outcome[i] == Rat(level)) n.payment[i] += Rat(delta);
    }
  }
  return t;
}

ImplementationTree ConstantTree() {
  Hand h(2, {{Rats({1, 2, 3})}, {Rats({1, 2})}});
  NodeId a = h.Leaf(Rats({1, 0}));
  NodeId b = h.Leaf(Rats({1, 0}));
  NodeId c = h.Leaf(Rats({1, 0}));
  NodeId q = h.Ask(1, {Rats({1}), Rats({2})}, {b, c});
  return h.Done(h.Ask(0, {Rats({1}), Rats({2, 3})}, {a, q}));
}

TEST(CheckOsp, ChainFixtureIsStronglyObvious) {
  const auto t = appendix_b_tree();
  EXPECT_TRUE(check_k_step_osp(t, Horizon::Finite(0)).pass);
  EXPECT_TRUE(testing::OracleOsp(t, Horizon::Finite(0)));
}

TEST(CheckOsp, ChainFixturePaymentShiftsFail) {
  const auto t = appendix_b_tree();
  for (int level = 0; level <= 3; ++level) {
    for (int delta : {-1, 1}) {
      const auto m = ShiftLevel(t, level, delta);
      OspVerdict v = check_k_step_osp(m, Horizon::Finite(0));
      EXPECT_FALSE(v.pass) << level << " " << delta;
      ASSERT_FALSE(v.violations.empty());
      const Constraint& c = v.violations.front();
      // The witness must be a genuine violation of the printed inequality.
      const auto fa = leaf_of(m, c.a), fb = leaf_of(m, c.b);
      EXPECT_EQ(c.lhs, fb.payment[c.agent] - fa.payment[c.agent]);
      EXPECT_EQ(c.rhs, c.c * (fb.outcome[c.agent] - fa.outcome[c.agent]));
      EXPECT_GT(c.lhs, c.rhs);
      EXPECT_FALSE(testing::OracleOsp(m, Horizon::Finite(0)));
    }
  }
}

TEST(CheckOsp, ConstantTreePassesEverywhere) {
  const auto t = ConstantTree();
  for (Horizon k :
       {Horizon::Finite(0), Horizon::Finite(1), Horizon::Infinity()}) {
    EXPECT_TRUE(check_k_step_osp(t, k).pass);
  }
}

TEST(CheckOsp, ClockAuctionHorizons) {
  const auto t = english_tree(3, 5);
  EXPECT_TRUE(check_k_step_osp(t, Horizon::Infinity()).pass);
  EXPECT_TRUE(check_k_step_osp(t, Horizon::Finite(2)).pass);
  OspVerdict v = check_k_step_osp(t, Horizon::Finite(1));
  EXPECT_FALSE(v.pass);
  EXPECT_GT(v.total_violations, 0);
}

TEST(CheckOsp, ClockAuctionAgreesWithOracle) {
  const auto t = english_tree(2, 4);
  for (int k = 0; k <= 2; ++k) {
    EXPECT_EQ(check_k_step_osp(t, Horizon::Finite(k)).pass,
              testing::OracleOsp(t, Horizon::Finite(k)))
        << k;
  }
  EXPECT_TRUE(testing::OracleOsp(t, Horizon::Infinity()));
}

TEST(CheckOsp, AgreesWithOracleOnRandomMechanisms) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> pay(-3, 3);
  int passes = 0, fails = 0;
  for (int it = 0; it < 60; ++it) {
    ImplementationTree t = (it % 2) ? testing::RandomExtremalTree(rng, 2, 3, 8)
                                    : testing::RandomBinaryTree(rng, 2, 3, 6);
    if (it % 3 == 0) {
      PaymentResult r = synthesize_payments(t, Horizon::Infinity());
      if (r.ok) t = r.tree;
    } else {
      for (Node& n : t.nodes) {
        if (!n.leaf) continue;
        for (Rat& p : n.payment) p = Rat(pay(rng));
      }
    }
    for (Horizon k :
         {Horizon::Finite(0), Horizon::Finite(1), Horizon::Infinity()}) {
      const bool mine = check_k_step_osp(t, k).pass;
      EXPECT_EQ(mine, testing::OracleOsp(t, k)) << "iteration " << it;
      (mine ? passes : fails)++;
    }
  }
  EXPECT_GT(passes, 10);
  EXPECT_GT(fails, 10);
}

TEST(CheckOsp, MonotoneInHorizon) {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 40; ++it) {
    ImplementationTree t = testing::RandomExtremalTree(rng, 2, 4, 10);
    PaymentResult r = synthesize_payments(t, Horizon::Infinity());
    if (r.ok) t = r.tree;
    bool passed = false;
    for (int k = 0; k <= 4; ++k) {
      const bool now = check_k_step_osp(t, Horizon::Finite(k)).pass;
      if (passed) EXPECT_TRUE(now);
      passed = passed || now;
    }
    if (passed) EXPECT_TRUE(check_k_step_osp(t, Horizon::Infinity()).pass);
  }
}

TEST(CheckOsp, InvalidTreeIsRejected) {
  ImplementationTree t = ConstantTree();
  t.nodes[1].payment.pop_back();
  EXPECT_THROW(check_k_step_osp(t, Horizon::Finite(0)), TreeError);
}

// One effective agent plus a dummy; the root puts 1 and 3 together.
ImplementationTree Unordered() {
  Hand h(2, {{Rats({1, 2, 3})}, {Rats({1})}});
  NodeId split = h.Leaf(Rats({1, 0}));
  NodeId three = h.Leaf(Rats({1, 0}));
  NodeId one = h.Leaf(Rats({1, 0}));
  NodeId two = h.Leaf(Rats({0, 0}));
  (void)split;
  NodeId inner = h.Ask(0, {Rats({1}), Rats({3})}, {one, three});
  return h.Done(h.Ask(0, {Rats({1, 3}), Rats({2})}, {inner, two}));
}

TEST(AlmostOrdered, UnorderedSplitFails) {
  auto v = is_almost_ordered(Unordered(), Horizon::Infinity());
  EXPECT_FALSE(v.pass);
  EXPECT_EQ(v.c, Rat(3));
  EXPECT_EQ(v.d, Rat(2));
  EXPECT_EQ(v.agent, 0);
}

TEST(AlmostOrdered, MonotoneExtremalSingleAgentPasses) {
  std::mt19937_64 rng(31);
  for (int it = 0; it < 30; ++it) {
    const auto t = testing::RandomExtremalTree(rng, 1, 5, 10);
    for (Horizon k :
         {Horizon::Finite(0), Horizon::Finite(2), Horizon::Infinity()}) {
      EXPECT_TRUE(is_almost_ordered(t, k).pass);
    }
  }
}

TEST(AlmostOrdered, ImpliedByOsp) {
  std::mt19937_64 rng(37);
  for (int it = 0; it < 40; ++it) {
    ImplementationTree t = testing::RandomExtremalTree(rng, 2, 3, 8);
    PaymentResult r = synthesize_payments(t, Horizon::Infinity());
    if (r.ok) t = r.tree;
    for (Horizon k :
         {Horizon::Finite(0), Horizon::Finite(1), Horizon::Infinity()}) {
      if (check_k_step_osp(t, k).pass)
        EXPECT_TRUE(is_almost_ordered(t, k).pass);
    }
  }
}

NodeId NthQueryOf(const ImplementationTree& t, const Profile& x, int agent,
                  int nth) {
  for (NodeId v : testing::Walk(t, x)) {
    if (!t.node(v).leaf && t.node(v).agent == agent && --nth == 0) return v;
  }
  return -1;
}

TEST(ClassifyQuery, ChainFixtureThirdQueryIsExtremalAndEffective) {
  const auto t = appendix_b_tree();
  const NodeId u = NthQueryOf(t, Rats({1, 1}), 0, 3);
  ASSERT_GE(u, 0);
  QueryClass c = classify_query(t, u);
  EXPECT_TRUE(c.extremal);
  EXPECT_TRUE(c.revelation);  // two types left
  EXPECT_FALSE(c.ineffective);
  EXPECT_FALSE(c.strongly_ineffective);
  EXPECT_EQ(c.domain_size, 2);
}

TEST(ClassifyQuery, ClockAuctionLastQueryOnlyTopEffective) {
  // Valuations {4,5} are costs {-5,-4}; the lowest valuation is the top cost.
  const auto t = english_tree(3, 5);
  const NodeId u = NthQueryOf(t, Rats({-5, -5, -5}), 0, 4);
  ASSERT_GE(u, 0);
  QueryClass c = classify_query(t, u);
  EXPECT_EQ(c.domain_size, 2);
  EXPECT_TRUE(c.revelation);
  EXPECT_TRUE(c.OnlyEffective(Rat(-4)));
  EXPECT_TRUE(c.StronglyOnlyEffective(Rat(-4)));
  // With two types left both extremes separate the outcome.
  EXPECT_TRUE(c.OnlyEffective(Rat(-5)));
}

TEST(ClassifyQuery, ConstantSubtreeIsStronglyIneffective) {
  const auto t = ConstantTree();
  QueryClass c = classify_query(t, t.root);
  EXPECT_TRUE(c.ineffective);
  EXPECT_TRUE(c.strongly_ineffective);
  EXPECT_THROW(classify_query(t, t.node(t.root).children[0]), TreeError);
}

TEST(ClassifyQuery, StrongFormsImplyWeakForms) {
  std::mt19937_64 rng(41);
  for (int it = 0; it < 40; ++it) {
    const auto t = testing::RandomBinaryTree(rng, 2, 4, 6);
    for (const Node& n : t.nodes) {
      if (n.leaf) continue;
      QueryClass c = classify_query(t, n.id);
      if (c.strongly_ineffective) EXPECT_TRUE(c.ineffective);
      for (const Rat& x : c.strongly_only_effective) {
        EXPECT_TRUE(c.OnlyEffective(x));
      }
      const bool singletons =
          std::all_of(n.blocks.begin(), n.blocks.end(),
                      [](const auto& b) { return b.size() == 1; });
      EXPECT_EQ(c.revelation, singletons);
    }
  }
}

TEST(KLimited, ClockAuction) {
  const auto t = english_tree(3, 5);
  EXPECT_TRUE(is_k_limited(t, 2).pass);
  KLimitedVerdict v = is_k_limited(t, 1);
  EXPECT_FALSE(v.pass);
  EXPECT_GE(v.node, 0);
  EXPECT_GE(v.leaf, 0);
}

TEST(KLimited, CompressedGreedyTreeAtFourTypes) {
  const auto t = extract_tree(PSystem::SingleItem(2), IntegerDomain(4));
  EXPECT_TRUE(is_k_limited(compress(t), 0).pass);
}

TEST(KLimited, OneQueryPerAgentPasses) {
  EXPECT_TRUE(is_k_limited(ConstantTree(), 0).pass);
  std::mt19937_64 rng(43);
  for (int it = 0; it < 30; ++it) {
    const auto t = testing::RandomBinaryTree(rng, 2, 3, 6);
    bool single = true;
    for (const Node& n : t.nodes) {
      if (!n.leaf) continue;
      for (int i = 0; i < 2; ++i)
        single = single && query_count(t, i, n.id) <= 1;
    }
    if (single) EXPECT_TRUE(is_k_limited(t, 0).pass);
  }
}

TEST(KLimited, NonBinaryIsRejected) {
  EXPECT_THROW(is_k_limited(appendix_b_tree(), 0), NonBinaryOutcomeError);
}

TEST(KLimited, TooManyQueriesFail) {
  // Agent 0 is asked three times at k = 0.
  Hand h(1, {{Rats({1, 2, 3, 4})}});
  NodeId l1 = h.Leaf(Rats({1})), l2 = h.Leaf(Rats({1})), l3 = h.Leaf(Rats({0})),
         l4 = h.Leaf(Rats({0}));
  NodeId q3 = h.Ask(0, {Rats({2}), Rats({3})}, {l2, l3});
  NodeId q2 = h.Ask(0, {Rats({2, 3}), Rats({4})}, {q3, l4});
  const auto t = h.Done(h.Ask(0, {Rats({1}), Rats({2, 3, 4})}, {l1, q2}));
  EXPECT_FALSE(is_k_limited(t, 0).pass);
  EXPECT_TRUE(is_k_limited(t, 1).pass);
}

// Four types: the root peels the top type, the next query parts 1 from
// {2, 3} while the outcome differs between 1 and 2.
ImplementationTree TopSeparated() {
  Hand h(1, {{Rats({1, 2, 3, 4})}});
  NodeId one = h.Leaf(Rats({1})), rest = h.Leaf(Rats({0})),
         four = h.Leaf(Rats({0}));
  NodeId inner = h.Ask(0, {Rats({1}), Rats({2, 3})}, {one, rest});
  return h.Done(h.Ask(0, {Rats({1, 2, 3}), Rats({4})}, {inner, four}));
}

TEST(Taxation, TopSeparationIsReported) {
  auto v = taxation_diagnostics(TopSeparated(), Horizon::Finite(0));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, "top");
  EXPECT_EQ(v[0].a, Rats({1}));
  EXPECT_EQ(v[0].c, Rats({2}));
  EXPECT_EQ(v[0].d, Rats({3}));
  EXPECT_EQ(v[0].b, Rats({4}));
}

TEST(Taxation, NoTripleNoViolation) {
  EXPECT_TRUE(taxation_diagnostics(ConstantTree(), Horizon::Finite(0)).empty());
  EXPECT_TRUE(
      taxation_diagnostics(english_tree(2, 2), Horizon::Finite(0)).empty());
}

TEST(Taxation, ImpliedByOsp) {
  std::mt19937_64 rng(47);
  int checked = 0;
  for (int it = 0; it < 150; ++it) {
    const ImplementationTree base = testing::RandomExtremalTree(rng, 2, 4, 10);
    for (int k = 0; k <= 1; ++k) {
      PaymentResult r = synthesize_payments(base, Horizon::Finite(k));
      if (!r.ok) continue;
      const ImplementationTree& t = r.tree;
      if (!check_k_step_osp(t, Horizon::Finite(k)).pass) continue;
      ++checked;
      EXPECT_TRUE(taxation_diagnostics(t, Horizon::Finite(k)).empty());
    }
  }
  EXPECT_GT(checked, 5);
}

TEST(StrongIneffectiveness, PaymentDriftIsReported) {
  Hand h(2, {{Rats({1, 2})}, {Rats({1, 2})}});
  NodeId low = h.Leaf(Rats({0, 0}), Rats({0, 0}));
  NodeId hi1 = h.Leaf(Rats({0, 0}), Rats({0, 0}));
  NodeId hi2 = h.Leaf(Rats({0, 1}), Rats({1, 0}));
  NodeId q = h.Ask(1, {Rats({1}), Rats({2})}, {hi1, hi2});
  const auto t = h.Done(h.Ask(0, {Rats({1}), Rats({2})}, {low, q}));
  auto v = strong_ineffectiveness_check(t);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v[0].agent, 0);
  EXPECT_EQ(v[0].field, "payment");
}

TEST(StrongIneffectiveness, ClockAuctionAndSingleAgentAreClean) {
  EXPECT_TRUE(strong_ineffectiveness_check(english_tree(3, 4)).empty());
  Hand h(1, {{Rats({1, 2})}});
  NodeId a = h.Leaf(Rats({1}), Rats({5}));
  NodeId b = h.Leaf(Rats({1}), Rats({5}));
  EXPECT_TRUE(strong_ineffectiveness_check(
                  h.Done(h.Ask(0, {Rats({1}), Rats({2})}, {a, b})))
                  .empty());
}

TEST(StrongIneffectiveness, ImpliedByOsp) {
  std::mt19937_64 rng(53);
  for (int it = 0; it < 40; ++it) {
    ImplementationTree t = testing::RandomExtremalTree(rng, 2, 3, 8);
    PaymentResult r = synthesize_payments(t, Horizon::Infinity());
    if (r.ok) t = r.tree;
    if (check_k_step_osp(t, Horizon::Finite(0)).pass) {
      EXPECT_TRUE(strong_ineffectiveness_check(t).empty());
    }
  }
}

TEST(RevealAtK2, RevelationTreeIsUnchanged) {
  Hand h(1, {{Rats({1, 2, 3})}});
  NodeId one = h.Leaf(Rats({1})), two = h.Leaf(Rats({0})),
         three = h.Leaf(Rats({0}));
  NodeId q = h.Ask(0, {Rats({2}), Rats({3})}, {two, three});
  const auto t = h.Done(h.Ask(0, {Rats({1}), Rats({2, 3})}, {one, q}));
  EXPECT_EQ(reveal_at_k2(t, 0), t);
}

TEST(RevealAtK2, IneffectiveChainKeepsEveryLeafValue) {
  Hand h(2, {{Rats({1, 2, 3, 4})}, {Rats({1, 2, 3, 4})}});
  NodeId top0 = h.Leaf(Rats({0, 0}));
  NodeId top1 = h.Leaf(Rats({0, 0}));
  NodeId a = h.Leaf(Rats({0, 1}), Rats({2, 3}));
  NodeId b = h.Leaf(Rats({0, 0}), Rats({2, 0}));
  NodeId c = h.Leaf(Rats({0, 1}), Rats({2, 1}));
  NodeId low = h.Ask(1, {Rats({1}), Rats({2, 3})}, {a, b});
  NodeId second = h.Ask(0, {Rats({1, 2}), Rats({3})}, {low, c});
  NodeId q1 = h.Ask(1, {Rats({1, 2, 3}), Rats({4})}, {second, top1});
  const auto t = h.Done(h.Ask(0, {Rats({1, 2, 3}), Rats({4})}, {q1, top0}));
  // Payments of agent 0 are constant below its second query only if the
  // leaves agree; make them agree.
  const auto out = reveal_at_k2(t, 0);
  EXPECT_TRUE(validate_tree(out).empty());
  for (const Profile& x : AllProfiles(t.domains)) {
    EXPECT_EQ(leaf_of(out, x).outcome, leaf_of(t, x).outcome);
    EXPECT_EQ(leaf_of(out, x).payment, leaf_of(t, x).payment);
  }
  const NodeId rewritten = NthQueryOf(out, Rats({1, 1}), 0, 2);
  EXPECT_EQ(out.node(rewritten).blocks.size(), 3u);
}

TEST(RevealAtK2, ClockAuctionStaysObvious) {
  const auto out = reveal_at_k2(english_tree(3, 5), 2);
  EXPECT_TRUE(check_k_step_osp(out, Horizon::Finite(2)).pass);
}

TEST(RevealAtK2, PreconditionViolationNamesTheNode) {
  const auto t = english_tree(2, 5);
  try {
    reveal_at_k2(t, 0);
    FAIL() << "expected a precondition failure";
  } catch (const TransformError& e) {
    EXPECT_GE(e.node(), 0);
    EXPECT_FALSE(t.node(e.node()).leaf);
  }
}

TEST(RevealAtK2, PreservesLeavesOnRandomTrees) {
  std::mt19937_64 rng(59);
  int rewritten = 0;
  for (int it = 0; it < 300; ++it) {
    const auto t = testing::RandomExtremalTree(rng, 2, 4, 10);
    ImplementationTree out;
    try {
      out = reveal_at_k2(t, 0);
    } catch (const TransformError&) {
      continue;
    }
    rewritten += !(out == t);
    for (const Profile& x : AllProfiles(t.domains)) {
      EXPECT_EQ(leaf_of(out, x).outcome, leaf_of(t, x).outcome);
      EXPECT_EQ(leaf_of(out, x).payment, leaf_of(t, x).payment);
    }
  }
  EXPECT_GT(rewritten, 0);
}

}  // namespace
}  // namespace ospkit
