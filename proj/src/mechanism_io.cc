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

#include "ospkit/mechanism_io.h"

#include <fstream>
#include <map>
#include <sstream>

namespace ospkit {

using nlohmann::json;

ParseError::ParseError(int line, const std::string& msg)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg
                                  : msg),
      line_(line) {}

namespace {

// Line numbers of top-level keys and of each element of the top-level
// "nodes" array, recovered by a bracket-aware scan of the raw text.
struct LineMap {
  std::map<std::string, int> keys;
  std::vector<int> nodes;

  int Key(const std::string& k) const {
    auto it = keys.find(k);
    return it == keys.end() ? 0 : it->second;
  }
  int Node(std::size_t j) const { return j < nodes.size() ? nodes[j] : 0; }
};

LineMap ScanLines(const std::string& text) {
  LineMap lm;
  int line = 1;
  int depth = 0;
  bool in_nodes = false;
  std::string last_string;
  int last_string_line = 0;
  for (std::size_t p = 0; p < text.size(); ++p) {
    char ch = text[p];
    if (ch == '\n') {
      ++line;
    } else if (ch == '"') {
      std::string s;
      for (++p; p < text.size() && text[p] != '"'; ++p) {
        if (text[p] == '\\' && p + 1 < text.size()) ++p;
        if (text[p] == '\n') ++line;
        s.push_back(text[p]);
      }
      last_string = std::move(s);
      last_string_line = line;
    } else if (ch == ':') {
      if (depth == 1) {
        lm.keys.emplace(last_string, last_string_line);
        in_nodes = last_string == "nodes";
      }
    } else if (ch == '{' || ch == '[') {
      if (ch == '{' && depth == 2 && in_nodes) lm.nodes.push_back(line);
      ++depth;
    } else if (ch == '}' || ch == ']') {
      --depth;
      if (depth == 1) in_nodes = false;
    }
  }
  return lm;
}

Rat RatField(const json& v, int line, const std::string& what) {
  if (v.is_string()) {
    try {
      return Rat::Parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw ParseError(line, what + ": " + e.what());
    }
  }
  if (v.is_number_integer()) return Rat(v.get<std::int64_t>());
  throw ParseError(line, what + ": expected a rational string");
}

std::vector<Rat> RatList(const json& v, int line, const std::string& what) {
  if (!v.is_array()) throw ParseError(line, what + ": expected an array");
  std::vector<Rat> out;
  for (const auto& e : v) out.push_back(RatField(e, line, what));
  return out;
}

const json& Need(const json& obj, const char* key, int line,
                 const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(line, where + ": missing field \"" + key + "\"");
  }
  return *it;
}

int IntField(const json& v, int line, const std::string& what) {
  if (!v.is_number_integer()) {
    throw ParseError(line, what + ": expected an integer");
  }
  return v.get<int>();
}

json RatArray(const std::vector<Rat>& v) {
  json a = json::array();
  for (const Rat& r : v) a.push_back(r.ToString());
  return a;
}

}  // namespace

ImplementationTree ParseMechanism(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    int line = 1;
    for (std::size_t p = 0; p < e.byte && p < text.size(); ++p) {
      if (text[p] == '\n') ++line;
    }
    throw ParseError(line, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError(1, "top level must be an object");
  LineMap lm = ScanLines(text);

  ImplementationTree tree;
  tree.agents =
      IntField(Need(doc, "agents", 1, "mechanism"), lm.Key("agents"), "agents");
  const json& doms = Need(doc, "domains", 1, "mechanism");
  if (!doms.is_array()) {
    throw ParseError(lm.Key("domains"), "domains: expected an array");
  }
  for (const auto& d : doms) {
    tree.domains.push_back({RatList(d, lm.Key("domains"), "domains")});
  }
  tree.root =
      IntField(Need(doc, "root", 1, "mechanism"), lm.Key("root"), "root");
  const json& nodes = Need(doc, "nodes", 1, "mechanism");
  if (!nodes.is_array()) {
    throw ParseError(lm.Key("nodes"), "nodes: expected an array");
  }
  std::map<NodeId, int> line_of_id;
  std::vector<Node> parsed;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const json& nj = nodes[j];
    int line = lm.Node(j);
    std::string where = "node #" + std::to_string(j);
    if (!nj.is_object()) throw ParseError(line, where + ": expected an object");
    Node nd;
    nd.id = IntField(Need(nj, "id", line, where), line, where + " id");
    where = "node " + std::to_string(nd.id);
    const json& kind = Need(nj, "kind", line, where);
    if (kind == "leaf") {
      nd.leaf = true;
      nd.outcome =
          RatList(Need(nj, "outcome", line, where), line, where + " outcome");
      nd.payment =
          RatList(Need(nj, "payment", line, where), line, where + " payment");
    } else if (kind == "query") {
      nd.leaf = false;
      nd.agent =
          IntField(Need(nj, "agent", line, where), line, where + " agent");
      const json& blocks = Need(nj, "blocks", line, where);
      if (!blocks.is_array()) {
        throw ParseError(line, where + " blocks: expected an array");
      }
      for (const auto& b : blocks) {
        nd.blocks.push_back(RatList(b, line, where + " blocks"));
      }
      const json& ch = Need(nj, "children", line, where);
      if (!ch.is_array()) {
        throw ParseError(line, where + " children: expected an array");
      }
      for (const auto& c : ch) {
        nd.children.push_back(IntField(c, line, where + " children"));
      }
    } else {
      throw ParseError(line, where + ": kind must be \"query\" or \"leaf\"");
    }
    if (!line_of_id.emplace(nd.id, line).second) {
      throw ParseError(line, where + ": duplicate id");
    }
    parsed.push_back(std::move(nd));
  }
  // Store by id so that nodes[id].id == id; gaps are reported below.
  int max_id = -1;
  for (const Node& nd : parsed) max_id = std::max(max_id, nd.id);
  for (const Node& nd : parsed) {
    if (nd.id < 0) {
      throw ParseError(line_of_id[nd.id], "negative node id");
    }
  }
  if (max_id + 1 != static_cast<int>(parsed.size())) {
    throw ParseError(lm.Key("nodes"), "node ids must be exactly 0.." +
                                          std::to_string(parsed.size() - 1));
  }
  tree.nodes.resize(parsed.size());
  for (Node& nd : parsed) tree.nodes[nd.id] = std::move(nd);

  auto diags = validate_tree(tree);
  if (!diags.empty()) {
    const Diagnostic& d = diags.front();
    int line = d.node >= 0 && line_of_id.count(d.node) ? line_of_id[d.node]
                                                       : lm.Key("domains");
    std::string msg = (d.node >= 0 ? "node " + std::to_string(d.node) + ": "
                                   : std::string()) +
                      d.rule + (d.detail.empty() ? "" : " (" + d.detail + ")");
    throw ParseError(line, msg);
  }
  return tree;
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(0, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

ImplementationTree ReadMechanismFile(const std::string& path) {
  std::string text = ReadTextFile(path);
  try {
    return ParseMechanism(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

json MechanismToJson(const ImplementationTree& tree) {
  json doc;
  doc["agents"] = tree.agents;
  json doms = json::array();
  for (const auto& d : tree.domains) doms.push_back(RatArray(d.values));
  doc["domains"] = doms;
  doc["root"] = tree.root;
  json nodes = json::array();
  for (const Node& nd : tree.nodes) {
    json nj;
    nj["id"] = nd.id;
    if (nd.leaf) {
      nj["kind"] = "leaf";
      nj["outcome"] = RatArray(nd.outcome);
      nj["payment"] = RatArray(nd.payment);
    } else {
      nj["kind"] = "query";
      nj["agent"] = nd.agent;
      json blocks = json::array();
      for (const auto& b : nd.blocks) blocks.push_back(RatArray(b));
      nj["blocks"] = blocks;
      nj["children"] = nd.children;
    }
    nodes.push_back(nj);
  }
  doc["nodes"] = nodes;
  return doc;
}

std::string EmitMechanism(const ImplementationTree& tree) {
  return MechanismToJson(tree).dump(2) + "\n";
}

}  // namespace ospkit
