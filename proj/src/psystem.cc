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

#include "ospkit/psystem.h"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ospkit/mechanism_io.h"
#include "ospkit/tree_index.h"

namespace ospkit {

using nlohmann::json;

std::vector<int> Elements(ElementSet s) {
  std::vector<int> out;
  for (int e = 0; s != 0; ++e, s >>= 1) {
    if (s & 1u) out.push_back(e);
  }
  return out;
}

std::string SetToString(ElementSet s) {
  std::ostringstream os;
  os << '{';
  bool first = true;
  for (int e : Elements(s)) {
    if (!first) os << ',';
    os << e;
    first = false;
  }
  os << '}';
  return os.str();
}

PSystem PSystem::SingleItem(int n) {
  PSystem p;
  p.kind_ = Kind::kSingleItem;
  p.n_ = n;
  p.Build();
  return p;
}

PSystem PSystem::Uniform(int n, int rank) {
  if (rank < 0) throw PSystemError("uniform rank must be non-negative");
  PSystem p;
  p.kind_ = Kind::kUniform;
  p.n_ = n;
  p.rank_ = rank;
  p.Build();
  return p;
}

PSystem PSystem::Graphic(int vertices, std::vector<std::pair<int, int>> edges) {
  if (vertices < 1) throw PSystemError("graphic system needs a vertex");
  for (auto [a, b] : edges) {
    if (a < 0 || b < 0 || a >= vertices || b >= vertices) {
      throw PSystemError("edge endpoint out of range");
    }
  }
  PSystem p;
  p.kind_ = Kind::kGraphic;
  p.n_ = static_cast<int>(edges.size());
  p.vertices_ = vertices;
  p.edges_ = std::move(edges);
  p.Build();
  return p;
}

PSystem PSystem::Explicit(int n, std::vector<std::vector<int>> maximal) {
  PSystem p;
  p.kind_ = Kind::kExplicit;
  p.n_ = n;
  for (const auto& set : maximal) {
    ElementSet m = 0;
    for (int e : set) {
      if (e < 0 || e >= n) throw PSystemError("listed element out of range");
      m |= Bit(e);
    }
    p.listed_.push_back(m);
  }
  std::sort(p.listed_.begin(), p.listed_.end());
  p.listed_.erase(std::unique(p.listed_.begin(), p.listed_.end()),
                  p.listed_.end());
  p.Build();
  return p;
}

std::string PSystem::KindName() const {
  switch (kind_) {
    case Kind::kSingleItem:
      return "single_item";
    case Kind::kUniform:
      return "uniform";
    case Kind::kGraphic:
      return "graphic";
    case Kind::kExplicit:
      return "explicit";
  }
  return "";
}

bool PSystem::Compute(ElementSet s) const {
  int size = __builtin_popcount(s);
  switch (kind_) {
    case Kind::kSingleItem:
      return size <= 1;
    case Kind::kUniform:
      return size <= rank_;
    case Kind::kGraphic: {
      std::vector<int> parent(vertices_);
      std::iota(parent.begin(), parent.end(), 0);
      auto find = [&](int v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
      };
      for (int e : Elements(s)) {
        int a = find(edges_[e].first);
        int b = find(edges_[e].second);
        if (a == b) return false;
        parent[a] = b;
      }
      return true;
    }
    case Kind::kExplicit:
      for (ElementSet m : listed_) {
        if ((s & ~m) == 0) return true;
      }
      return s == 0;
  }
  return false;
}

void PSystem::Build() {
  if (n_ < 1 || n_ > 20) throw PSystemError("ground set size must be 1..20");
  CheckScale(std::int64_t{1} << n_, "ground-set subsets");
  feasible_.assign(std::size_t{1} << n_, false);
  for (ElementSet s = 0; s < (ElementSet{1} << n_); ++s) {
    feasible_[s] = Compute(s);
  }
  maximal_ = MaximalWithin(Ground());
}

std::vector<ElementSet> PSystem::MaximalWithin(ElementSet within) const {
  within &= Ground();
  std::vector<ElementSet> out;
  // Enumerate submasks of `within` in increasing order.
  ElementSet t = 0;
  while (true) {
    if (feasible_[t]) {
      bool maximal = true;
      for (ElementSet rest = within & ~t; rest != 0; rest &= rest - 1) {
        if (feasible_[t | (rest & -rest)]) {
          maximal = false;
          break;
        }
      }
      if (maximal) out.push_back(t);
    }
    if (t == within) break;
    t = (t - within) & within;
  }
  return out;
}

bool PSystem::IsMaximal(ElementSet s) const {
  if (!Feasible(s)) return false;
  for (int e = 0; e < n_; ++e) {
    if (!Has(s, e) && Feasible(s | Bit(e))) return false;
  }
  return true;
}

namespace {

std::vector<ElementSet> Surviving(ElementSet s, ElementSet x,
                                  const PSystem& p) {
  if ((s & x) != 0) throw PSystemError("accepted and excluded sets overlap");
  if (((s | x) & ~p.Ground()) != 0) {
    throw PSystemError("set outside the ground set");
  }
  std::vector<ElementSet> out;
  for (ElementSet t : p.MaximalWithin(p.Ground() & ~x)) {
    if ((s & ~t) == 0) out.push_back(t);
  }
  if (out.empty()) {
    throw PSystemError("no surviving maximal solution for S=" + SetToString(s) +
                       " X=" + SetToString(x));
  }
  return out;
}

}  // namespace

ElementSet unremovable(ElementSet s, ElementSet x, const PSystem& p) {
  ElementSet all = p.Ground();
  for (ElementSet t : Surviving(s, x, p)) all &= t;
  return all & ~(s | x);
}

ElementSet removable(ElementSet s, ElementSet x, const PSystem& p) {
  ElementSet any = 0;
  for (ElementSet t : Surviving(s, x, p)) any |= t;
  return p.Ground() & ~any & ~(s | x);
}

RankProfile rank_profile(const PSystem& p, ElementSet s) {
  RankProfile r;
  bool first = true;
  for (ElementSet t : p.MaximalWithin(s)) {
    int size = __builtin_popcount(t);
    if (first) {
      r.lower = r.upper = size;
      first = false;
    }
    r.lower = std::min(r.lower, size);
    r.upper = std::max(r.upper, size);
  }
  return r;
}

Rat rank_quotient(const PSystem& p) {
  Rat q(1);
  for (ElementSet s = 1; s <= p.Ground(); ++s) {
    RankProfile r = rank_profile(p, s);
    if (r.upper != 0) q = Min(q, Rat(r.lower, r.upper));
    if (s == p.Ground()) break;
  }
  return q;
}

Rat Weight(ElementSet s, const std::vector<Rat>& weights) {
  Rat w(0);
  for (int e : Elements(s)) w = w + weights.at(e);
  return w;
}

Rat Optimum(const PSystem& p, const std::vector<Rat>& weights) {
  Rat best(0);
  for (ElementSet s = 0; s <= p.Ground(); ++s) {
    if (p.Feasible(s)) best = Max(best, Weight(s, weights));
    if (s == p.Ground()) break;
  }
  return best;
}

ElementSet reverse_greedy(const PSystem& p, const std::vector<Rat>& weights) {
  if (static_cast<int>(weights.size()) != p.size()) {
    throw PSystemError("weight count does not match the ground set");
  }
  std::vector<int> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (weights[a] != weights[b]) return weights[a] < weights[b];
    return a > b;
  });
  std::vector<ElementSet> sets = p.Maximal();
  for (int e : order) {
    std::vector<ElementSet> rest;
    for (ElementSet t : sets) {
      if (!Has(t, e)) rest.push_back(t);
    }
    if (!rest.empty()) sets = std::move(rest);
  }
  return sets.front();
}

namespace {

int IntAt(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer()) {
    throw ParseError(0,
                     std::string("instance: missing integer \"") + key + "\"");
  }
  return it->get<int>();
}

Rat RatAt(const json& v) {
  if (v.is_number_integer()) return Rat(v.get<std::int64_t>());
  if (!v.is_string()) throw ParseError(0, "domain: expected rational strings");
  try {
    return Rat::Parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ParseError(0, std::string("domain: ") + e.what());
  }
}

}  // namespace

Instance ParseInstance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(0, std::string("instance: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(0, "instance: expected an object");
  auto kind_it = doc.find("kind");
  if (kind_it == doc.end() || !kind_it->is_string()) {
    throw ParseError(0, "instance: missing string \"kind\"");
  }
  std::string kind = kind_it->get<std::string>();
  int n = IntAt(doc, "n");
  json params = doc.value("params", json::object());
  if (!params.is_object())
    throw ParseError(0, "instance: params not an object");
  Instance inst;
  try {
    if (kind == "single_item") {
      inst.system = PSystem::SingleItem(n);
    } else if (kind == "uniform") {
      inst.system = PSystem::Uniform(n, IntAt(params, "rank"));
    } else if (kind == "graphic") {
      int vertices = IntAt(params, "vertices");
      auto edges_it = params.find("edges");
      if (edges_it == params.end() || !edges_it->is_array()) {
        throw ParseError(0, "instance: graphic params need \"edges\"");
      }
      std::vector<std::pair<int, int>> edges;
      for (const auto& e : *edges_it) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
            !e[1].is_number_integer()) {
          throw ParseError(0, "instance: edge must be a pair of integers");
        }
        edges.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
      if (static_cast<int>(edges.size()) != n) {
        throw ParseError(0, "instance: n must equal the edge count");
      }
      inst.system = PSystem::Graphic(vertices, std::move(edges));
    } else if (kind == "explicit") {
      auto it = params.find("maximal");
      if (it == params.end() || !it->is_array()) {
        throw ParseError(0, "instance: explicit params need \"maximal\"");
      }
      std::vector<std::vector<int>> sets;
      for (const auto& s : *it) {
        if (!s.is_array()) throw ParseError(0, "instance: bad maximal set");
        std::vector<int> set;
        for (const auto& e : s) {
          if (!e.is_number_integer()) {
            throw ParseError(0, "instance: bad maximal set element");
          }
          set.push_back(e.get<int>());
        }
        sets.push_back(std::move(set));
      }
      inst.system = PSystem::Explicit(n, std::move(sets));
    } else {
      throw ParseError(0, "instance: unknown kind \"" + kind + "\"");
    }
  } catch (const PSystemError& e) {
    throw ParseError(0, std::string("instance: ") + e.what());
  }
  auto dom_it = doc.find("domain");
  if (dom_it == doc.end() || !dom_it->is_array() || dom_it->empty()) {
    throw ParseError(0, "instance: missing non-empty \"domain\"");
  }
  for (const auto& v : *dom_it) inst.domain.values.push_back(RatAt(v));
  for (std::size_t i = 1; i < inst.domain.values.size(); ++i) {
    if (!(inst.domain.values[i - 1] < inst.domain.values[i])) {
      throw ParseError(0, "instance: domain not strictly increasing");
    }
  }
  return inst;
}

Instance ReadInstanceFile(const std::string& path) {
  return ParseInstance(ReadTextFile(path));
}

json InstanceToJson(const Instance& inst) {
  const PSystem& p = inst.system;
  json doc;
  doc["kind"] = p.KindName();
  doc["n"] = p.size();
  json params = json::object();
  switch (p.kind()) {
    case PSystem::Kind::kSingleItem:
      break;
    case PSystem::Kind::kUniform:
      params["rank"] = p.rank_param();
      break;
    case PSystem::Kind::kGraphic: {
      params["vertices"] = p.vertices();
      json edges = json::array();
      for (auto [a, b] : p.edges()) edges.push_back({a, b});
      params["edges"] = edges;
      break;
    }
    case PSystem::Kind::kExplicit: {
      json sets = json::array();
      for (ElementSet m : p.listed()) sets.push_back(Elements(m));
      params["maximal"] = sets;
      break;
    }
  }
  doc["params"] = params;
  json dom = json::array();
  for (const Rat& r : inst.domain.values) dom.push_back(r.ToString());
  doc["domain"] = dom;
  return doc;
}

}  // namespace ospkit
