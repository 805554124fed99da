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

#ifndef OSPKIT_TESTS_SUPPORT_H_
#define OSPKIT_TESTS_SUPPORT_H_

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "ospkit/psystem.h"
#include "ospkit/tree.h"

namespace ospkit::testing {

std::vector<Rat> Rats(std::initializer_list<std::int64_t> xs);

// Builds trees node by node. Ids are renumbered by Canonicalize in Done.
class Hand {
 public:
  Hand(int agents, std::vector<TypeDomain> domains);
  NodeId Leaf(std::vector<Rat> outcome, std::vector<Rat> payment);
  // Zero payments.
  NodeId Leaf(std::vector<Rat> outcome);
  NodeId Ask(int agent, std::vector<std::vector<Rat>> blocks,
             std::vector<NodeId> children);
  ImplementationTree Done(NodeId root);

 private:
  ImplementationTree t_;
};

// Every profile of the domain box, agent 0 most significant.
std::vector<Profile> AllProfiles(const std::vector<TypeDomain>& domains);

// Root-to-leaf node sequence, found by block membership.
std::vector<NodeId> Walk(const ImplementationTree& t, const Profile& x);

// Profiles whose path passes through u.
std::vector<Profile> AvailableAt(const ImplementationTree& t, NodeId u);

// Whether a and b are separated at u or inside its horizon of k further
// queries to i(u). Both must be available at u.
bool SeparatedWithin(const ImplementationTree& t, NodeId u, const Profile& a,
                     const Profile& b, Horizon k);

std::vector<Profile> OracleGamma(const ImplementationTree& t, NodeId u,
                                 const Profile& a, Horizon k);

// k-step OSP straight from the utility definition.
bool OracleOsp(const ImplementationTree& t, Horizon k);

// Feasibility predicates written independently of PSystem.
using Feasible = std::function<bool(ElementSet)>;
Feasible SizeCap(int cap);
Feasible TriangleForest();
Feasible OracleFor(const PSystem& p);

Rat OracleOptimum(int n, const Feasible& f, const std::vector<Rat>& w);
std::vector<ElementSet> OracleMaximal(int n, const Feasible& f);
// Deletes the cheapest element (larger index first on ties) whenever the
// rest still holds a maximal feasible set.
ElementSet OracleReverseGreedy(int n, const Feasible& f,
                               const std::vector<Rat>& w);

// Random valid tree with 0/1 outcomes: queries split the asked agent's
// domain into 2 or 3 blocks, leaves get random bits and zero payments.
ImplementationTree RandomBinaryTree(std::mt19937_64& rng, int n, int d,
                                    int max_depth);

// Random tree whose queries are binary and extremal and whose outcomes
// are a random monotone (non-increasing in cost) function.
ImplementationTree RandomExtremalTree(std::mt19937_64& rng, int n, int d,
                                      int max_depth);

// A p-system drawn from a fixed menu by the seed.
PSystem RandomPSystem(std::mt19937_64& rng);

}  // namespace ospkit::testing

#endif  // OSPKIT_TESTS_SUPPORT_H_
