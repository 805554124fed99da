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

#ifndef OSPKIT_VERIFIER_H_
#define OSPKIT_VERIFIER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "ospkit/tree.h"

namespace ospkit {

class TreeIndex;

// Raised by checks that are only defined for 0/1 outcomes.
class NonBinaryOutcomeError : public TreeError {
 public:
  NonBinaryOutcomeError();
};

// One violated instance of p_i(b) - p_i(a) <= c * (f_i(b) - f_i(a)).
struct Constraint {
  int agent = 0;
  NodeId node = 0;
  Profile a;
  Profile b;
  Rat c;
  Rat lhs;
  Rat rhs;
};

struct OspVerdict {
  bool pass = true;
  std::vector<Constraint> violations;  // first `cap` in canonical order
  std::int64_t total_violations = 0;
};

// Checks every k-step OSP constraint. For each violated pair (a, b) the
// reported c is the type of a's class that makes the bound tightest.
OspVerdict check_k_step_osp(const ImplementationTree& tree, Horizon k,
                            std::size_t cap = 1000);

struct AlmostOrderedVerdict {
  bool pass = true;
  int agent = -1;
  NodeId node = -1;
  Profile a;
  Profile b;
  Rat c;  // largest type in the class of a
  Rat d;  // smallest type in the class of b
};

AlmostOrderedVerdict is_almost_ordered(const ImplementationTree& tree,
                                       Horizon k);

struct QueryClass {
  int agent = -1;
  int domain_size = 0;
  bool revelation = false;
  bool extremal = false;
  bool separates_min = false;  // extremal with {min} as a block
  bool separates_max = false;  // extremal with {max} as a block
  bool ineffective = false;
  bool strongly_ineffective = false;
  std::vector<Rat> only_effective;           // every t that is only-t effective
  std::vector<Rat> strongly_only_effective;  // every t, strong form
  bool prefix = false;
  bool suffix = false;

  bool OnlyEffective(const Rat& t) const;
  bool StronglyOnlyEffective(const Rat& t) const;
};

QueryClass classify_query(const ImplementationTree& tree, NodeId u);
QueryClass classify_query(const TreeIndex& idx, NodeId u);

struct KLimitedVerdict {
  bool pass = true;
  int agent = -1;
  NodeId node = -1;  // offending query, -1 if none
  NodeId leaf = -1;  // end of the offending path
  std::string reason;
};

// Literal k-limited test, payments included. Requires 0/1 outcomes.
KLimitedVerdict is_k_limited(const ImplementationTree& tree, int k);
KLimitedVerdict is_k_limited(const ImplementationTree& tree, Horizon k);

struct TaxationViolation {
  std::string kind;  // "outer-sandwich", "inner-sandwich", "top", "bottom"
  int agent = 0;
  NodeId node = 0;        // u
  NodeId split_node = 0;  // first node separating two of the triple
  Profile a;
  Profile c;
  Profile d;
  Profile b;   // separated witness (b_i, a_{-i}); lower witness for outer
  Profile b2;  // upper witness for outer-sandwich, empty otherwise
};

std::vector<TaxationViolation> taxation_diagnostics(
    const ImplementationTree& tree, Horizon k);

struct IneffectivenessViolation {
  int agent = 0;
  NodeId node = 0;
  Rat t;
  Rat t2;
  Profile x;          // (t, x_{-i})
  Profile x2;         // (t2, x'_{-i})
  std::string field;  // "outcome" or "payment"
};

std::vector<IneffectivenessViolation> strong_ineffectiveness_check(
    const ImplementationTree& tree);

// Raised by reveal_at_k2 when a targeted query fails the precondition.
class TransformError : public TreeError {
 public:
  TransformError(NodeId node, const std::string& msg);
  NodeId node() const { return node_; }

 private:
  NodeId node_;
};

// Replaces each non-revelation (k+2)-th query by a revelation query whose
// children are copies of the old subtrees restricted to one type of the
// queried agent.
ImplementationTree reveal_at_k2(const ImplementationTree& tree, int k);

// Same tree with every payment set to zero.
ImplementationTree StripPayments(const ImplementationTree& tree);

}  // namespace ospkit

#endif  // OSPKIT_VERIFIER_H_
