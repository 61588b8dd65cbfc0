#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "rational.hpp"

namespace weilrep {

namespace detail {

/// Coefficients of the M-th cyclotomic polynomial, constant term first.
/// Built from Phi_M = prod_{d | M} (x^d - 1)^{mu(M/d)}.
inline std::vector<i64> compute_cyclotomic_polynomial(i64 m) {
  std::vector<i64> poly{1};
  std::vector<i64> dividing;
  for (i64 d : divisors(m)) {
    const int mu = moebius(m / d);
    if (mu == 1) {
      std::vector<i64> next(poly.size() + d, 0);
      for (std::size_t i = 0; i < poly.size(); ++i) {
        next[i + d] = checked_add(next[i + d], poly[i]);
        next[i] = checked_sub(next[i], poly[i]);
      }
      poly = std::move(next);
    } else if (mu == -1) {
      dividing.push_back(d);
    }
  }
  for (i64 d : dividing) {
    const std::size_t deg = poly.size() - 1;
    std::vector<i64> q(deg - d + 1, 0);
    for (std::size_t k = deg; k >= static_cast<std::size_t>(d); --k) {
      const i64 upper = k < q.size() ? q[k] : 0;
      q[k - d] = checked_add(poly[k], upper);
    }
    poly = std::move(q);
  }
  return poly;
}

inline const std::vector<i64> &cyclotomic_polynomial(i64 m) {
  thread_local std::unordered_map<i64, std::vector<i64>> cache;
  auto it = cache.find(m);
  if (it == cache.end())
    it = cache.emplace(m, compute_cyclotomic_polynomial(m)).first;
  return it->second;
}

} // namespace detail

/// Exact element of Q(zeta_M) stored in the group ring Q[x]/(x^M - 1) as
/// (1/den) * sum num_j x^j. The representation is not unique; equality and
/// rendering go through reduction modulo the cyclotomic polynomial.
class CyclotomicNumber {
public:
  using Term = std::pair<i64, i64>; // (exponent, numerator)

  CyclotomicNumber() = default;
  CyclotomicNumber(i64 n) {
    if (n != 0)
      terms_.emplace_back(0, n);
  }
  CyclotomicNumber(int n) : CyclotomicNumber(static_cast<i64>(n)) {}
  CyclotomicNumber(const Rational &q) : den_(q.denominator()) {
    if (q.numerator() != 0)
      terms_.emplace_back(0, q.numerator());
    else
      den_ = 1;
  }

  /// zeta_M^k.
  static CyclotomicNumber root_of_unity(i64 k, i64 m) {
    if (m <= 0)
      throw precondition_error("weilrep: root of unity needs modulus > 0");
    CyclotomicNumber z;
    z.modulus_ = m;
    z.terms_.emplace_back(mod(k, m), 1);
    return z;
  }

  /// Builds (1/den) * sum num x^exp; exponents are reduced mod m and merged.
  static CyclotomicNumber from_terms(i64 m, i64 den, std::vector<Term> terms) {
    if (m <= 0 || den == 0)
      throw precondition_error("weilrep: invalid cyclotomic data");
    std::map<i64, i64> merged;
    for (const auto &[e, c] : terms)
      merged[mod(e, m)] = checked_add(merged[mod(e, m)], c);
    CyclotomicNumber z;
    z.modulus_ = m;
    z.den_ = den;
    for (const auto &[e, c] : merged)
      if (c != 0)
        z.terms_.emplace_back(e, c);
    z.normalize();
    return z;
  }

  /// As from_terms, for exponents already in [0, m), strictly increasing,
  /// with non-zero numerators.
  static CyclotomicNumber from_sorted_terms(i64 m, i64 den, std::vector<Term> terms) {
    CyclotomicNumber z;
    z.modulus_ = m;
    z.den_ = den;
    z.terms_ = std::move(terms);
    z.normalize();
    return z;
  }

  i64 modulus() const noexcept { return modulus_; }
  i64 denominator() const noexcept { return den_; }
  const std::vector<Term> &terms() const noexcept { return terms_; }

  /// True when the stored representative has no terms (sufficient, not
  /// necessary, for the value to be zero).
  bool trivially_zero() const noexcept { return terms_.empty(); }

  /// Exact zero test. Rather than dividing by Phi_M, eliminate the relations
  /// sum_t zeta^{j + t M/p} = 0 prime by prime; the survivors form a basis
  /// (tensor product of the prime-power bases), so the result is canonical.
  /// Linear in M per prime.
  bool is_zero() const {
    if (terms_.empty())
      return true;
    if (modulus_ == 1)
      return false;
    std::vector<i64> c(static_cast<std::size_t>(modulus_), 0);
    for (const auto &[e, v] : terms_)
      c[static_cast<std::size_t>(e)] = v;
    for (const auto &[p, e] : factorize(modulus_)) {
      const i64 pe = ipow(p, static_cast<unsigned>(e));
      const i64 top = pe / p;
      const i64 step = modulus_ / p;
      for (i64 j = 0; j < modulus_; ++j) {
        const i64 v = c[static_cast<std::size_t>(j)];
        if (v == 0 || (j % pe) / top != p - 1)
          continue;
        c[static_cast<std::size_t>(j)] = 0;
        for (i64 t = 1; t < p; ++t) {
          auto &slot = c[static_cast<std::size_t>((j + t * step) % modulus_)];
          slot = checked_sub(slot, v);
        }
      }
    }
    return std::all_of(c.begin(), c.end(), [](i64 v) { return v == 0; });
  }

  /// Same value written over Q(zeta_m) for a multiple m of modulus().
  CyclotomicNumber promoted(i64 m) const {
    if (m % modulus_ != 0)
      throw precondition_error("weilrep: cannot promote modulus " +
                               std::to_string(modulus_) + " to " +
                               std::to_string(m));
    CyclotomicNumber z;
    z.modulus_ = m;
    z.den_ = den_;
    const i64 step = m / modulus_;
    z.terms_.reserve(terms_.size());
    for (const auto &[e, c] : terms_)
      z.terms_.emplace_back(e * step, c);
    return z;
  }

  /// Canonical representative: remainder modulo Phi_M, so exponents are
  /// below phi(M). Two values over the same modulus are equal iff their
  /// reductions coincide.
  CyclotomicNumber reduced() const {
    if (modulus_ == 1 || terms_.empty())
      return *this;
    const auto &phi = detail::cyclotomic_polynomial(modulus_);
    const std::size_t deg = phi.size() - 1;
    if (terms_.back().first < static_cast<i64>(deg))
      return *this;
    std::vector<i64> p(static_cast<std::size_t>(modulus_), 0);
    for (const auto &[e, c] : terms_)
      p[e] = c;
    for (std::size_t k = p.size() - 1; k >= deg; --k) {
      const i64 c = p[k];
      if (c == 0)
        continue;
      for (std::size_t i = 0; i <= deg; ++i)
        if (phi[i] != 0)
          p[k - deg + i] = checked_sub(p[k - deg + i], checked_mul(c, phi[i]));
    }
    CyclotomicNumber z;
    z.modulus_ = modulus_;
    z.den_ = den_;
    for (std::size_t k = 0; k < deg; ++k)
      if (p[k] != 0)
        z.terms_.emplace_back(static_cast<i64>(k), p[k]);
    z.normalize();
    return z;
  }

  /// The value as a rational number, if it is one.
  std::optional<Rational> as_rational() const {
    const CyclotomicNumber r = reduced();
    if (r.terms_.empty())
      return Rational(0);
    if (r.terms_.size() == 1 && r.terms_[0].first == 0)
      return Rational(r.terms_[0].second, r.den_);
    return std::nullopt;
  }

  CyclotomicNumber conj() const {
    CyclotomicNumber z = *this;
    for (auto &t : z.terms_)
      t.first = mod(-t.first, modulus_);
    std::sort(z.terms_.begin(), z.terms_.end());
    return z;
  }

  std::complex<double> to_complex() const {
    std::complex<long double> s = 0;
    for (const auto &[e, c] : terms_) {
      const long double angle =
          2.0L * std::numbers::pi_v<long double> * static_cast<long double>(e) /
          static_cast<long double>(modulus_);
      s += static_cast<long double>(c) * std::polar(1.0L, angle);
    }
    s /= static_cast<long double>(den_);
    return {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  }

  /// Inverse for elements whose norm x * conj(x) is rational: roots of unity,
  /// rationals, Gauss-sum square roots and their products.
  CyclotomicNumber inverse() const {
    const CyclotomicNumber c = conj();
    const auto norm = (*this * c).as_rational();
    if (!norm)
      throw precondition_error(
          "weilrep: inverse only supported when x * conj(x) is rational");
    if (*norm == Rational(0))
      throw precondition_error("weilrep: inverse of zero");
    return c * Rational(1) / *norm;
  }

  CyclotomicNumber operator-() const {
    CyclotomicNumber z = *this;
    for (auto &t : z.terms_)
      t.second = -t.second;
    return z;
  }

  friend CyclotomicNumber operator+(const CyclotomicNumber &a,
                                    const CyclotomicNumber &b) {
    const i64 m = lcm(a.modulus_, b.modulus_);
    const CyclotomicNumber x = a.promoted(m), y = b.promoted(m);
    const i64 den = lcm(x.den_, y.den_);
    const i64 fx = den / x.den_, fy = den / y.den_;
    std::vector<Term> out;
    out.reserve(x.terms_.size() + y.terms_.size());
    auto ix = x.terms_.begin(), iy = y.terms_.begin();
    while (ix != x.terms_.end() || iy != y.terms_.end()) {
      if (iy == y.terms_.end() ||
          (ix != x.terms_.end() && ix->first < iy->first)) {
        out.emplace_back(ix->first, checked_mul(ix->second, fx));
        ++ix;
      } else if (ix == x.terms_.end() || iy->first < ix->first) {
        out.emplace_back(iy->first, checked_mul(iy->second, fy));
        ++iy;
      } else {
        const i64 c = checked_add(checked_mul(ix->second, fx),
                                  checked_mul(iy->second, fy));
        if (c != 0)
          out.emplace_back(ix->first, c);
        ++ix;
        ++iy;
      }
    }
    CyclotomicNumber z;
    z.modulus_ = m;
    z.den_ = den;
    z.terms_ = std::move(out);
    z.normalize();
    return z;
  }

  friend CyclotomicNumber operator-(const CyclotomicNumber &a,
                                    const CyclotomicNumber &b) {
    return a + (-b);
  }

  friend CyclotomicNumber operator*(const CyclotomicNumber &a,
                                    const CyclotomicNumber &b) {
    if (a.terms_.empty() || b.terms_.empty())
      return {};
    const i64 m = lcm(a.modulus_, b.modulus_);
    const CyclotomicNumber x = a.promoted(m), y = b.promoted(m);
    CyclotomicNumber z;
    z.modulus_ = m;
    z.den_ = checked_mul(x.den_, y.den_);
    if (x.terms_.size() == 1 || y.terms_.size() == 1) {
      const auto &single = x.terms_.size() == 1 ? x : y;
      const auto &other = x.terms_.size() == 1 ? y : x;
      const auto [se, sc] = single.terms_[0];
      z.terms_.reserve(other.terms_.size());
      for (const auto &[e, c] : other.terms_)
        z.terms_.emplace_back((e + se) % m, checked_mul(c, sc));
      std::sort(z.terms_.begin(), z.terms_.end());
    } else {
      std::vector<i64> buf(static_cast<std::size_t>(m), 0);
      for (const auto &[e1, c1] : x.terms_)
        for (const auto &[e2, c2] : y.terms_) {
          auto &slot = buf[(e1 + e2) % m];
          slot = checked_add(slot, checked_mul(c1, c2));
        }
      for (std::size_t k = 0; k < buf.size(); ++k)
        if (buf[k] != 0)
          z.terms_.emplace_back(static_cast<i64>(k), buf[k]);
    }
    z.normalize();
    return z;
  }

  friend CyclotomicNumber operator*(const CyclotomicNumber &a,
                                    const Rational &q) {
    if (q.numerator() == 0 || a.terms_.empty())
      return {};
    CyclotomicNumber z = a;
    z.den_ = checked_mul(z.den_, q.denominator());
    for (auto &t : z.terms_)
      t.second = checked_mul(t.second, q.numerator());
    z.normalize();
    return z;
  }

  friend CyclotomicNumber operator/(const CyclotomicNumber &a,
                                    const Rational &q) {
    if (q.numerator() == 0)
      throw precondition_error("weilrep: division by zero");
    return a * Rational(q.denominator(), q.numerator());
  }

  CyclotomicNumber &operator+=(const CyclotomicNumber &b) {
    return *this = *this + b;
  }
  CyclotomicNumber &operator-=(const CyclotomicNumber &b) {
    return *this = *this - b;
  }
  CyclotomicNumber &operator*=(const CyclotomicNumber &b) {
    return *this = *this * b;
  }

  /// Field equality (not representation equality).
  friend bool operator==(const CyclotomicNumber &a, const CyclotomicNumber &b) {
    return (a - b).is_zero();
  }

  /// Canonical text: rational "a/b" when the value is rational, otherwise
  /// "c_j * z{M}^j + ..." of the reduced representative.
  std::string to_string() const {
    const CyclotomicNumber r = reduced();
    if (auto q = r.as_rational())
      return weilrep::to_string(*q);
    std::string out;
    for (const auto &[e, c] : r.terms_) {
      if (!out.empty())
        out += " + ";
      out += weilrep::to_string(Rational(c, r.den_)) + " * z{" +
             std::to_string(r.modulus_) + "}^" + std::to_string(e);
    }
    return out;
  }

private:
  void normalize() {
    if (den_ < 0) {
      den_ = -den_;
      for (auto &t : terms_)
        t.second = -t.second;
    }
    if (terms_.empty()) {
      den_ = 1;
      return;
    }
    i64 g = den_;
    for (const auto &t : terms_)
      g = gcd(g, t.second);
    if (g > 1) {
      den_ /= g;
      for (auto &t : terms_)
        t.second /= g;
    }
  }

  i64 modulus_ = 1;
  i64 den_ = 1;
  std::vector<Term> terms_; // sorted by exponent, non-zero numerators
};

/// Dense scratch buffer for summing many terms over one modulus; used by
/// Gauss sums and matrix products.
class CyclotomicAccumulator {
public:
  explicit CyclotomicAccumulator(i64 m) : m_(m), buf_(static_cast<std::size_t>(m), 0) {}

  i64 modulus() const noexcept { return m_; }

  void clear() {
    std::fill(buf_.begin(), buf_.end(), 0);
    den_ = 1;
  }

  /// += coeff * zeta_M^k
  void add_root(i64 k, i64 coeff = 1) {
    auto &slot = buf_[static_cast<std::size_t>(mod(k, m_))];
    slot = checked_add(slot, checked_mul(coeff, den_));
  }

  void add(const CyclotomicNumber &x) {
    if (x.trivially_zero())
      return;
    if (m_ % x.modulus() != 0)
      throw precondition_error("weilrep: accumulator modulus mismatch");
    const i64 scale = align(x.denominator());
    const i64 step = m_ / x.modulus();
    for (const auto &[e, c] : x.terms()) {
      auto &slot = buf_[static_cast<std::size_t>(e * step)];
      slot = checked_add(slot, checked_mul(c, scale));
    }
  }

  /// += x * y
  void add_product(const CyclotomicNumber &x, const CyclotomicNumber &y) {
    if (x.trivially_zero() || y.trivially_zero())
      return;
    if (m_ % x.modulus() != 0 || m_ % y.modulus() != 0)
      throw precondition_error("weilrep: accumulator modulus mismatch");
    const i64 scale = align(checked_mul(x.denominator(), y.denominator()));
    const i64 sx = m_ / x.modulus(), sy = m_ / y.modulus();
    for (const auto &[e1, c1] : x.terms()) {
      const i64 c1s = checked_mul(c1, scale);
      for (const auto &[e2, c2] : y.terms()) {
        auto &slot = buf_[static_cast<std::size_t>((e1 * sx + e2 * sy) % m_)];
        slot = checked_add(slot, checked_mul(c1s, c2));
      }
    }
  }

  CyclotomicNumber finish() const {
    std::vector<CyclotomicNumber::Term> terms;
    for (std::size_t k = 0; k < buf_.size(); ++k)
      if (buf_[k] != 0)
        terms.emplace_back(static_cast<i64>(k), buf_[k]);
    return CyclotomicNumber::from_sorted_terms(m_, den_, std::move(terms));
  }

  /// Raw access for tight kernels; values are numerators over denominator().
  i64 denominator() const noexcept { return den_; }
  std::vector<i64> &buffer() noexcept { return buf_; }

private:
  // Brings the buffer to a denominator divisible by d and returns the factor
  // by which numerators over d must be multiplied.
  i64 align(i64 d) {
    if (den_ % d != 0) {
      const i64 l = lcm(den_, d);
      const i64 f = l / den_;
      for (auto &v : buf_)
        v = checked_mul(v, f);
      den_ = l;
    }
    return den_ / d;
  }

  i64 m_;
  i64 den_ = 1;
  std::vector<i64> buf_;
};

/// e(q) = exp(2 pi i q), written over the reduced denominator of q.
inline CyclotomicNumber e_frac(const Rational &q) {
  return CyclotomicNumber::root_of_unity(q.numerator(), q.denominator());
}

/// Exact square root of a positive integer via quadratic Gauss sums:
/// sqrt(p) = sum_a e(a^2/p) for p = 1 mod 4, -i * sum_a e(a^2/p) for
/// p = 3 mod 4, and sqrt(2) = z8 + z8^7.
inline CyclotomicNumber sqrt_integer(i64 n) {
  if (n <= 0)
    throw precondition_error("weilrep: sqrt_integer needs n > 0");
  CyclotomicNumber out(1);
  for (const auto &[p, e] : factorize(n)) {
    out = out * Rational(ipow(p, static_cast<unsigned>(e / 2)));
    if (e % 2 == 0)
      continue;
    if (p == 2) {
      out *= CyclotomicNumber::root_of_unity(1, 8) +
             CyclotomicNumber::root_of_unity(7, 8);
      continue;
    }
    CyclotomicAccumulator acc(p);
    for (i64 a = 0; a < p; ++a)
      acc.add_root(a * a % p);
    CyclotomicNumber g = acc.finish();
    if (p % 4 == 3)
      g *= CyclotomicNumber::root_of_unity(3, 4);
    out *= g;
  }
  return out;
}

/// Parses the text produced by CyclotomicNumber::to_string.
inline CyclotomicNumber parse_cyclotomic(std::string_view text) {
  CyclotomicNumber out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(" + ", pos);
    const std::string_view part =
        text.substr(pos, next == std::string_view::npos ? text.npos : next - pos);
    const std::size_t star = part.find('*');
    if (star == std::string_view::npos) {
      out += CyclotomicNumber(parse_rational(part));
    } else {
      const Rational c = parse_rational(part.substr(0, star));
      const std::size_t open = part.find("z{"), close = part.find("}^");
      if (open == std::string_view::npos || close == std::string_view::npos)
        throw precondition_error("weilrep: malformed cyclotomic term '" +
                                 std::string(part) + "'");
      const i64 m = detail::parse_i64(part.substr(open + 2, close - open - 2));
      const i64 e = detail::parse_i64(part.substr(close + 2));
      out += CyclotomicNumber::root_of_unity(e, m) * c;
    }
    if (next == std::string_view::npos)
      break;
    pos = next + 3;
  }
  return out;
}

} // namespace weilrep
