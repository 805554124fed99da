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

#include "ospkit/fixtures.h"

#include <regex>
#include <stdexcept>
#include <utility>

#include "ospkit/greedy.h"
#include "ospkit/mechanism_io.h"

namespace ospkit {

TypeDomain IntegerDomain(int d) {
  if (d < 1) throw std::invalid_argument("domain size must be positive");
  TypeDomain out;
  for (int i = 1; i <= d; ++i) out.values.push_back(Rat(i));
  return out;
}

TypeDomain GeometricDomain(int d, int ratio) {
  if (d < 1 || ratio < 2) {
    throw std::invalid_argument("geometric domain needs d >= 1, ratio >= 2");
  }
  TypeDomain out;
  std::int64_t v = 1;
  for (int i = 0; i < d; ++i, v *= ratio) out.values.push_back(Rat(v));
  return out;
}

Rat AppendixBPayment(int quantity) {
  static const int kPay[] = {0, 4, 7, 9};
  if (quantity < 0 || quantity > 3) {
    throw std::out_of_range("quantity must be in 0..3");
  }
  return Rat(kPay[quantity]);
}

namespace {

NodeId AddNode(ImplementationTree& t, Node n) {
  n.id = t.size();
  t.nodes.push_back(std::move(n));
  return t.size() - 1;
}

NodeId QuantityLeaf(ImplementationTree& t, int q0, int q1) {
  Node n;
  n.outcome = {Rat(q0), Rat(q1)};
  n.payment = {AppendixBPayment(q0), AppendixBPayment(q1)};
  return AddNode(t, n);
}

// Step s asks agent s % 2 whether its type is 4 - s / 2. Both agents still
// hold {1, .., 4 - s / 2} at that point.
NodeId AppendixBStep(ImplementationTree& t, int s) {
  if (s == 6) return QuantityLeaf(t, 3, 2);
  const int agent = s % 2;
  const int round = s / 2 + 1;
  const int top = 5 - round;
  NodeId yes = round == 1 ? QuantityLeaf(t, 0, 0)
                          : QuantityLeaf(t, round - 1,
                                         agent == 0 ? round - 2 : round - 1);
  NodeId no = AppendixBStep(t, s + 1);
  Node n;
  n.leaf = false;
  n.agent = agent;
  std::vector<Rat> rest;
  for (int v = 1; v < top; ++v) rest.push_back(Rat(v));
  n.blocks = {rest, {Rat(top)}};
  n.children = {no, yes};
  return AddNode(t, n);
}

}  // namespace

ImplementationTree appendix_b_tree() {
  ImplementationTree t;
  t.agents = 2;
  t.domains = {IntegerDomain(4), IntegerDomain(4)};
  t.root = AppendixBStep(t, 0);
  return Canonicalize(t);
}

ImplementationTree english_tree(int n, int d) {
  return english_auction_tree(n, IntegerDomain(d));
}

Instance single_item_instance(int n, int d) {
  return {PSystem::SingleItem(n), IntegerDomain(d)};
}

Instance uniform_instance(int n, int rank, int d) {
  return {PSystem::Uniform(n, rank), IntegerDomain(d)};
}

Instance triangle_graphic_instance(int d) {
  return {PSystem::Graphic(3, {{0, 1}, {1, 2}, {0, 2}}), IntegerDomain(d)};
}

namespace {

std::vector<int> NameArgs(const std::smatch& m) {
  std::vector<int> out;
  for (std::size_t i = 2; i < m.size(); ++i) {
    if (m[i].matched && m[i].length() > 0) out.push_back(std::stoi(m[i]));
  }
  return out;
}

std::string Spell(const std::string& head, const std::vector<int>& args) {
  if (args.empty()) return head;
  std::string s = head + "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(args[i]);
  }
  return s + ")";
}

}  // namespace

Fixture MakeFixture(const std::string& name) {
  static const std::regex kName(
      R"(\s*([a-z_]+)\s*(?:\(\s*(\d{1,4})\s*(?:,\s*(\d{1,4})\s*)?(?:,\s*(\d{1,4})\s*)?\))?\s*)");
  std::smatch m;
  if (!std::regex_match(name, m, kName)) {
    throw std::invalid_argument("malformed fixture name: " + name);
  }
  const std::string head = m[1];
  const std::vector<int> a = NameArgs(m);
  auto need = [&](std::size_t count) {
    if (a.size() != count) {
      throw std::invalid_argument(head + " takes " + std::to_string(count) +
                                  " arguments");
    }
  };
  Fixture f;
  f.name = Spell(head, a);
  if (head == "appendix_b") {
    need(0);
    f.is_mechanism = true;
    f.tree = appendix_b_tree();
  } else if (head == "english") {
    need(2);
    if (a[0] < 2) throw std::invalid_argument("english needs n >= 2");
    f.is_mechanism = true;
    f.tree = english_tree(a[0], a[1]);
  } else if (head == "single_item") {
    need(2);
    f.instance = single_item_instance(a[0], a[1]);
  } else if (head == "uniform") {
    need(3);
    f.instance = uniform_instance(a[0], a[1], a[2]);
  } else if (head == "triangle_graphic") {
    need(1);
    f.instance = triangle_graphic_instance(a[0]);
  } else {
    throw std::invalid_argument("unknown fixture: " + head);
  }
  return f;
}

std::string EmitFixture(const Fixture& f) {
  if (f.is_mechanism) return EmitMechanism(f.tree);
  return InstanceToJson(f.instance).dump(2) + "\n";
}

}  // namespace ospkit
