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

#ifndef OSPKIT_GREEDY_H_
#define OSPKIT_GREEDY_H_

#include <string>
#include <vector>

#include "ospkit/psystem.h"
#include "ospkit/tree.h"

namespace ospkit {

// Valuations v become cost types -v and a price becomes payment -price.
// Every place that moves between the two sign conventions goes through here.
Rat ValuationToCost(const Rat& v);
TypeDomain ValuationToCost(const TypeDomain& d);
Profile ValuationToCost(const Profile& v);

struct GreedyQuery {
  int agent = 0;
  bool top = false;  // asked "is your type the largest left?"
  Rat asked;
  bool yes = false;
};

enum class QueryStep { kContinue, kDone };

// Accepted set S, excluded set X and the remaining valuation domain of each
// element. Alive elements are those in neither set.
class GreedyState {
 public:
  GreedyState(const PSystem& p, const TypeDomain& d);

  const PSystem& system() const { return *p_; }
  ElementSet accepted() const { return s_; }
  ElementSet excluded() const { return x_; }
  ElementSet alive() const { return p_->Ground() & ~(s_ | x_); }
  bool IsAlive(int j) const { return Has(alive(), j); }
  int MinAlive() const;  // -1 when none
  int MaxAlive() const;
  const std::vector<Rat>& remaining(int j) const { return dom_.at(j); }
  const std::vector<GreedyQuery>& trace() const { return trace_; }

  // S = unremovable(S, X), then X = removable(S, X).
  void Initialize();
  // Ask j whether its type is the smallest left; on yes exclude j and accept
  // every element that became unremovable. Requires j alive with at least
  // two values left.
  QueryStep BottomQuery(int j, const Profile& truth);
  // Ask j whether its type is the largest left; on yes accept j and exclude
  // every element that became removable.
  QueryStep TopQuery(int j, const Profile& truth);
  // Adds an alive element to S and closes S under unremovable.
  void Accept(int j);
  // Adds an alive element to X and closes S under unremovable.
  void Exclude(int j);

 private:
  void CheckAsk(int j) const;
  void CheckInvariant() const;
  bool Done() const { return (s_ | x_) == p_->Ground(); }

  const PSystem* p_;
  ElementSet s_ = 0;
  ElementSet x_ = 0;
  std::vector<std::vector<Rat>> dom_;
  std::vector<GreedyQuery> trace_;
};

struct GreedyRun {
  ElementSet solution = 0;
  ElementSet excluded = 0;
  std::vector<GreedyQuery> trace;
  // Elements decided after the last query by reverse greedy over the
  // revealed alive elements.
  ElementSet completed = 0;
};

// The k-limitable two-way greedy algorithm on valuations `truth`, every
// element drawing from the common domain `d`.
GreedyRun run_two_way_greedy(const PSystem& p, const TypeDomain& d,
                             const Profile& truth);

// Decision tree of run_two_way_greedy over every profile, in the cost
// convention with zero payments. Checked against the run on every profile.
ImplementationTree extract_tree(const PSystem& p, const TypeDomain& d);

// Ascending clock in cost convention: in each round, still-available agents
// are asked in decreasing index order whether their valuation equals the
// clock; yes drops out. The smallest index among the last survivors wins
// and pays the clock value at the last drop, or the top valuation.
ImplementationTree english_auction_tree(int n, const TypeDomain& d);

// Minimum over all profiles of the accepted weight over the optimum, with
// 0/0 read as 1. The tree is in cost convention; weights are -types.
Rat approx_ratio(const PSystem& p, const ImplementationTree& tree);

}  // namespace ospkit

#endif  // OSPKIT_GREEDY_H_
