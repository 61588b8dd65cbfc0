#pragma once

#include <boost/rational.hpp>

#include <charconv>
#include <string>
#include <string_view>

#include "arith.hpp"

namespace weilrep {

using Rational = boost::rational<i64>;

inline i64 floor(const Rational &q) {
  const i64 n = q.numerator(), d = q.denominator();
  return n >= 0 ? n / d : -((-n + d - 1) / d);
}

/// Representative of q mod 1 in [0, 1).
inline Rational frac(const Rational &q) { return q - Rational(floor(q)); }

inline bool is_integer(const Rational &q) { return q.denominator() == 1; }

inline std::string to_string(const Rational &q) {
  if (q.denominator() == 1)
    return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

namespace detail {
inline i64 parse_i64(std::string_view s) {
  while (!s.empty() && s.front() == ' ')
    s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ')
    s.remove_suffix(1);
  if (!s.empty() && s.front() == '+')
    s.remove_prefix(1);
  i64 v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
    throw precondition_error("weilrep: malformed integer '" + std::string(s) +
                             "'");
  return v;
}
} // namespace detail

/// Parses "a", "a/b" or "-a/b".
inline Rational parse_rational(std::string_view s) {
  const auto slash = s.find('/');
  if (slash == std::string_view::npos)
    return Rational(detail::parse_i64(s));
  const i64 den = detail::parse_i64(s.substr(slash + 1));
  if (den == 0)
    throw precondition_error("weilrep: zero denominator in '" +
                             std::string(s) + "'");
  return Rational(detail::parse_i64(s.substr(0, slash)), den);
}

} // namespace weilrep
