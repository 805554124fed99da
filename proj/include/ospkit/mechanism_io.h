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

#ifndef OSPKIT_MECHANISM_IO_H_
#define OSPKIT_MECHANISM_IO_H_

#include <stdexcept>
#include <string>

#include "json.hpp"
#include "ospkit/tree.h"

namespace ospkit {

// Malformed mechanism or instance text. `line` is 1-based, 0 if unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg);
  int line() const { return line_; }

 private:
  int line_;
};

ImplementationTree ParseMechanism(const std::string& text);
ImplementationTree ReadMechanismFile(const std::string& path);

nlohmann::json MechanismToJson(const ImplementationTree& tree);
// Canonical text: sorted keys, two-space indent, trailing newline.
std::string EmitMechanism(const ImplementationTree& tree);

std::string ReadTextFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& text);

}  // namespace ospkit

#endif  // OSPKIT_MECHANISM_IO_H_
