#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace weilrep {

using i64 = std::int64_t;

// Checked 64-bit arithmetic; every exact routine in the library funnels
// through these so that overflow surfaces as an exception, never as a
// silently wrong answer.
inline i64 checked_add(i64 a, i64 b) {
  i64 r;
  if (__builtin_add_overflow(a, b, &r))
    throw std::overflow_error("weilrep: 64-bit overflow in addition");
  return r;
}

inline i64 checked_sub(i64 a, i64 b) {
  i64 r;
  if (__builtin_sub_overflow(a, b, &r))
    throw std::overflow_error("weilrep: 64-bit overflow in subtraction");
  return r;
}

inline i64 checked_mul(i64 a, i64 b) {
  i64 r;
  if (__builtin_mul_overflow(a, b, &r))
    throw std::overflow_error("weilrep: 64-bit overflow in multiplication");
  return r;
}

/// Non-negative residue of a modulo m (m > 0).
constexpr i64 mod(i64 a, i64 m) {
  i64 r = a % m;
  return r < 0 ? r + m : r;
}

inline i64 gcd(i64 a, i64 b) { return std::gcd(a, b); }

inline i64 lcm(i64 a, i64 b) {
  if (a == 0 || b == 0)
    return 0;
  const i64 r = checked_mul(a / std::gcd(a, b), b);
  return r < 0 ? -r : r;
}

struct ExtendedGcd {
  i64 g;
  i64 x;
  i64 y;
};

/// g = gcd(a, b) >= 0 with a*x + b*y = g.
inline ExtendedGcd extended_gcd(i64 a, i64 b) {
  i64 old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const i64 q = old_r / r;
    old_r = std::exchange(r, old_r - q * r);
    old_s = std::exchange(s, old_s - q * s);
    old_t = std::exchange(t, old_t - q * t);
  }
  if (old_r < 0)
    return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

/// Inverse of r modulo n; throws if gcd(r, n) != 1.
inline i64 inverse_mod(i64 r, i64 n) {
  const auto [g, x, y] = extended_gcd(mod(r, n), n);
  (void)y;
  if (g != 1)
    throw precondition_error("weilrep: element not invertible modulo " +
                             std::to_string(n));
  return mod(x, n);
}

inline i64 ipow(i64 base, unsigned exp) {
  i64 r = 1;
  while (exp-- > 0)
    r = checked_mul(r, base);
  return r;
}

/// Prime factorisation as (prime, exponent) pairs in increasing order.
inline std::vector<std::pair<i64, int>> factorize(i64 n) {
  std::vector<std::pair<i64, int>> out;
  if (n < 0)
    n = -n;
  for (i64 p = 2; p * p <= n; ++p) {
    if (n % p != 0)
      continue;
    int e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1)
    out.emplace_back(n, 1);
  return out;
}

inline bool is_prime(i64 n) {
  if (n < 2)
    return false;
  const auto f = factorize(n);
  return f.size() == 1 && f[0].second == 1;
}

/// Positive divisors of n in increasing order.
inline std::vector<i64> divisors(i64 n) {
  std::vector<i64> out{1};
  for (const auto &[p, e] : factorize(n)) {
    const std::size_t base = out.size();
    i64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i)
        out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of prime factors counted with multiplicity.
inline int big_omega(i64 n) {
  int total = 0;
  for (const auto &[p, e] : factorize(n))
    total += e;
  return total;
}

inline int moebius(i64 n) {
  int sign = 1;
  for (const auto &[p, e] : factorize(n)) {
    if (e > 1)
      return 0;
    sign = -sign;
  }
  return sign;
}

inline i64 euler_phi(i64 n) {
  i64 r = n;
  for (const auto &[p, e] : factorize(n))
    r = r / p * (p - 1);
  return r;
}

} // namespace weilrep
