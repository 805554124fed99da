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

#include "ospkit/rational.h"

#include <charconv>
#include <limits>

namespace ospkit {
namespace {

__int128 Gcd(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::int64_t Narrow(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < std::numeric_limits<std::int64_t>::min()) {
    throw RationalOverflow("rational value exceeds 64-bit range");
  }
  return static_cast<std::int64_t>(v);
}

std::int64_t ParseInt(std::string_view s, std::string_view whole) {
  std::int64_t v = 0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("not a rational: \"" + std::string(whole) +
                                "\"");
  }
  return v;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

}  // namespace

Rat::Rat(std::int64_t n, std::int64_t d) {
  if (d == 0) throw std::domain_error("rational with zero denominator");
  *this = FromWide(n, d);
}

Rat Rat::FromWide(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("division by zero");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = Gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  Rat r;
  r.num_ = Narrow(n);
  r.den_ = Narrow(d);
  return r;
}

Rat Rat::Parse(std::string_view text) {
  std::string_view s = Trim(text);
  auto slash = s.find('/');
  if (slash == std::string_view::npos) return Rat(ParseInt(s, text));
  std::int64_t n = ParseInt(Trim(s.substr(0, slash)), text);
  std::int64_t d = ParseInt(Trim(s.substr(slash + 1)), text);
  if (d == 0) {
    throw std::invalid_argument("zero denominator in \"" + std::string(text) +
                                "\"");
  }
  return Rat(n, d);
}

std::string Rat::ToString() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rat Rat::operator-() const {
  return FromWide(-static_cast<__int128>(num_), den_);
}

Rat& Rat::operator+=(const Rat& o) {
  if (den_ == 1 && o.den_ == 1) {
    num_ = Narrow(static_cast<__int128>(num_) + o.num_);
    return *this;
  }
  __int128 n = static_cast<__int128>(num_) * o.den_ +
               static_cast<__int128>(o.num_) * den_;
  __int128 d = static_cast<__int128>(den_) * o.den_;
  return *this = FromWide(n, d);
}

Rat& Rat::operator-=(const Rat& o) { return *this += -o; }

Rat& Rat::operator*=(const Rat& o) {
  if (den_ == 1 && o.den_ == 1) {
    num_ = Narrow(static_cast<__int128>(num_) * o.num_);
    return *this;
  }
  return *this = FromWide(static_cast<__int128>(num_) * o.num_,
                          static_cast<__int128>(den_) * o.den_);
}

Rat& Rat::operator/=(const Rat& o) {
  if (o.num_ == 0) throw std::domain_error("division by zero");
  return *this = FromWide(static_cast<__int128>(num_) * o.den_,
                          static_cast<__int128>(den_) * o.num_);
}

std::strong_ordering operator<=>(const Rat& a, const Rat& b) {
  __int128 l = static_cast<__int128>(a.num_) * b.den_;
  __int128 r = static_cast<__int128>(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rat& r) {
  return os << r.ToString();
}

Rat Min(const Rat& a, const Rat& b) { return b < a ? b : a; }
Rat Max(const Rat& a, const Rat& b) { return a < b ? b : a; }

}  // namespace ospkit
