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

#ifndef OSPKIT_PSYSTEM_H_
#define OSPKIT_PSYSTEM_H_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "ospkit/rational.h"
#include "ospkit/tree.h"

namespace ospkit {

// Subset of the ground set {0..n-1}, bit e set iff element e is present.
using ElementSet = std::uint32_t;

inline bool Has(ElementSet s, int e) { return (s >> e) & 1u; }
inline ElementSet Bit(int e) { return ElementSet{1} << e; }
std::vector<int> Elements(ElementSet s);
std::string SetToString(ElementSet s);

// Raised when an operation reaches a state with no surviving maximal
// feasible solution, or is given malformed sets.
class PSystemError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Downward-closed set system over a small ground set. Immutable and safe to
// share across threads once built.
class PSystem {
 public:
  enum class Kind { kSingleItem, kUniform, kGraphic, kExplicit };

  static PSystem SingleItem(int n);
  static PSystem Uniform(int n, int rank);
  // Ground set = edges; feasible = acyclic edge sets.
  static PSystem Graphic(int vertices, std::vector<std::pair<int, int>> edges);
  // Feasible = subsets of a listed maximal set.
  static PSystem Explicit(int n, std::vector<std::vector<int>> maximal);

  Kind kind() const { return kind_; }
  std::string KindName() const;
  int size() const { return n_; }
  ElementSet Ground() const { return n_ == 32 ? ~ElementSet{0} : Bit(n_) - 1; }
  int rank_param() const { return rank_; }
  int vertices() const { return vertices_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<ElementSet>& listed() const { return listed_; }

  bool Feasible(ElementSet s) const { return feasible_[s]; }
  // Maximal feasible subsets of the whole ground set, ascending.
  const std::vector<ElementSet>& Maximal() const { return maximal_; }
  // Maximal feasible subsets of `within`, ascending.
  std::vector<ElementSet> MaximalWithin(ElementSet within) const;
  bool IsMaximal(ElementSet s) const;

 private:
  PSystem() = default;
  void Build();
  bool Compute(ElementSet s) const;

  Kind kind_ = Kind::kSingleItem;
  int n_ = 0;
  int rank_ = 1;
  int vertices_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<ElementSet> listed_;
  std::vector<bool> feasible_;
  std::vector<ElementSet> maximal_;
};

// Elements outside X and S lying in every maximal feasible T within E\X
// that contains S.
ElementSet unremovable(ElementSet s, ElementSet x, const PSystem& p);
// Elements outside X and S lying in no such T.
ElementSet removable(ElementSet s, ElementSet x, const PSystem& p);

struct RankProfile {
  int lower = 0;  // smallest maximal feasible subset of S
  int upper = 0;  // largest one
};

RankProfile rank_profile(const PSystem& p, ElementSet s);
// min lr(S)/ur(S) over S with ur(S) != 0; 1 when no such S.
Rat rank_quotient(const PSystem& p);

Rat Weight(ElementSet s, const std::vector<Rat>& weights);
// Maximum-weight feasible set value.
Rat Optimum(const PSystem& p, const std::vector<Rat>& weights);

// Classic reverse greedy: elements by increasing weight, larger index first
// on ties; each drops every maximal set containing it unless none is left.
ElementSet reverse_greedy(const PSystem& p, const std::vector<Rat>& weights);

// A p-system together with the common valuation domain of its elements.
struct Instance {
  PSystem system = PSystem::SingleItem(1);
  TypeDomain domain;
};

// {kind, n, params, domain}. Throws ParseError.
Instance ParseInstance(const std::string& text);
Instance ReadInstanceFile(const std::string& path);
nlohmann::json InstanceToJson(const Instance& inst);

}  // namespace ospkit

#endif  // OSPKIT_PSYSTEM_H_
