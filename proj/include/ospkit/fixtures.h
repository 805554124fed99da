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

#ifndef OSPKIT_FIXTURES_H_
#define OSPKIT_FIXTURES_H_

#include <string>

#include "json.hpp"
#include "ospkit/psystem.h"
#include "ospkit/tree.h"

namespace ospkit {

// {1, 2, ..., d}.
TypeDomain IntegerDomain(int d);
// {1, ratio, ratio^2, ...} with d values.
TypeDomain GeometricDomain(int d, int ratio);

// Two agents with cost types {1,2,3,4}. Outcomes are quantities 0..3, and
// each agent is paid 0, 4, 7 or 9 for quantity 0, 1, 2 or 3. Every agent
// is asked three single-type questions that cannot be merged.
ImplementationTree appendix_b_tree();
// Payment the mechanism above attaches to a quantity.
Rat AppendixBPayment(int quantity);

// Clock auction on valuations {1..d} with clock payments.
ImplementationTree english_tree(int n, int d);

Instance single_item_instance(int n, int d);
Instance uniform_instance(int n, int rank, int d);
// Graphic matroid of the triangle K3 (3 edges, rank 2).
Instance triangle_graphic_instance(int d);

// A named fixture: appendix_b, english(n,d), single_item(n,d),
// uniform(n,r,d) or triangle_graphic(d).
struct Fixture {
  std::string name;  // canonical spelling
  bool is_mechanism = false;
  ImplementationTree tree;  // when is_mechanism
  Instance instance;        // otherwise
};

// Throws std::invalid_argument on an unknown or malformed name.
Fixture MakeFixture(const std::string& name);

// Canonical file text of a fixture.
std::string EmitFixture(const Fixture& f);

}  // namespace ospkit

#endif  // OSPKIT_FIXTURES_H_
