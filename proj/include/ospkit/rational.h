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

#ifndef OSPKIT_RATIONAL_H_
#define OSPKIT_RATIONAL_H_

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ospkit {

// Thrown when an exact rational operation would leave the 64-bit range.
class RationalOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

// Exact rational number in canonical form: den > 0 and gcd(|num|, den) = 1.
// Intermediate products are computed in 128 bits and checked on narrowing,
// so arithmetic either is exact or throws RationalOverflow.
class Rat {
 public:
  constexpr Rat() = default;
  constexpr Rat(std::int64_t n) : num_(n), den_(1) {}  // NOLINT: implicit
  Rat(std::int64_t n, std::int64_t d);

  // Accepts "p", "-p", "p/q" with optional surrounding whitespace.
  static Rat Parse(std::string_view text);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_integer() const { return den_ == 1; }
  bool is_zero() const { return num_ == 0; }
  int sign() const { return num_ > 0 ? 1 : (num_ < 0 ? -1 : 0); }

  // "p" for integers, "p/q" otherwise.
  std::string ToString() const;

  Rat operator-() const;
  Rat& operator+=(const Rat& o);
  Rat& operator-=(const Rat& o);
  Rat& operator*=(const Rat& o);
  Rat& operator/=(const Rat& o);

  friend Rat operator+(Rat a, const Rat& b) { return a += b; }
  friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
  friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
  friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

  friend bool operator==(const Rat& a, const Rat& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Rat& a, const Rat& b);

 private:
  static Rat FromWide(__int128 n, __int128 d);

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

std::ostream& operator<<(std::ostream& os, const Rat& r);

Rat Min(const Rat& a, const Rat& b);
Rat Max(const Rat& a, const Rat& b);

}  // namespace ospkit

template <>
struct std::hash<ospkit::Rat> {
  std::size_t operator()(const ospkit::Rat& r) const noexcept {
    std::size_t h = std::hash<std::int64_t>{}(r.num());
    return h ^ (std::hash<std::int64_t>{}(r.den()) + 0x9e3779b97f4a7c15ULL +
                (h << 6) + (h >> 2));
  }
};

#endif  // OSPKIT_RATIONAL_H_
