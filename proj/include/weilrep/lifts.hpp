#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"
#include "fqm.hpp"
#include "rational.hpp"
#include "series.hpp"

namespace weilrep {

/// q^shift * sum_l a(l) q^l, l <= truncation. shift lies in [0, 1) and is
/// only nonzero for raw eta products.
struct ScalarQSeries {
  Rational weight;
  i64 level = 1;
  Rational shift;
  i64 truncation = 0;
  std::map<i64, Rational> coeffs;

  Rational operator[](i64 l) const {
    if (l > truncation)
      throw precondition_error("weilrep: coefficient " + std::to_string(l) +
                               " beyond truncation " + std::to_string(truncation));
    const auto it = coeffs.find(l);
    return it == coeffs.end() ? Rational(0) : it->second;
  }

  void set(i64 l, const Rational &c) {
    if (c == Rational(0))
      coeffs.erase(l);
    else
      coeffs[l] = c;
  }

  bool is_zero() const { return coeffs.empty(); }

  ScalarQSeries scaled(const Rational &s) const {
    ScalarQSeries out = *this;
    out.coeffs.clear();
    for (const auto &[l, c] : coeffs)
      out.set(l, c * s);
    return out;
  }
};

namespace detail {

/// In-place multiplication of the power series c (degrees 0..T) by
/// (1 - q^m)^r.
inline void multiply_binomial(std::vector<i64> &c, i64 m, i64 r) {
  const i64 t = static_cast<i64>(c.size()) - 1;
  for (i64 k = 0; k < r; ++k)
    for (i64 d = t; d >= m; --d)
      c[d] = checked_sub(c[d], c[d - m]);
  for (i64 k = 0; k < -r; ++k)
    for (i64 d = m; d <= t; ++d)
      c[d] = checked_add(c[d], c[d - m]);
}

} // namespace detail

/// prod_delta eta(delta tau)^{r_delta} up to q^truncation (integer part of
/// the exponent).
inline ScalarQSeries eta_quotient(const std::map<i64, i64> &exponents, i64 truncation) {
  Rational lead(0), weight(0);
  for (const auto &[d, r] : exponents) {
    if (d <= 0)
      throw precondition_error("weilrep: eta quotient needs positive delta");
    lead += Rational(d * r, 24);
    weight += Rational(r, 2);
  }
  const i64 base = floor(lead);
  ScalarQSeries out;
  out.weight = weight;
  out.shift = frac(lead);
  out.truncation = truncation;
  i64 level = 1;
  for (const auto &[d, r] : exponents)
    if (r != 0)
      level = lcm(level, d);
  out.level = level;
  if (truncation < base)
    return out;
  std::vector<i64> c(static_cast<std::size_t>(truncation - base + 1), 0);
  c[0] = 1;
  for (const auto &[d, r] : exponents)
    for (i64 n = 1; d * n <= truncation - base; ++n)
      detail::multiply_binomial(c, d * n, r);
  for (std::size_t i = 0; i < c.size(); ++i)
    out.set(base + static_cast<i64>(i), Rational(c[i]));
  return out;
}

inline ScalarQSeries eta_qexp(i64 truncation) { return eta_quotient({{1, 1}}, truncation); }

/// Parses "c,d1:r1,d2:r2,..." where c is an integer prefactor and each
/// d:r contributes eta(d tau)^r.
inline std::pair<i64, std::map<i64, i64>> parse_eta_spec(const std::string &text) {
  std::stringstream ss(text);
  std::string tok;
  std::optional<i64> scale;
  std::map<i64, i64> ex;
  while (std::getline(ss, tok, ',')) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) {
      if (scale)
        throw precondition_error("weilrep: eta spec has two prefactors");
      scale = detail::parse_i64(tok);
      continue;
    }
    ex[detail::parse_i64(tok.substr(0, colon))] += detail::parse_i64(tok.substr(colon + 1));
  }
  if (ex.empty())
    throw precondition_error("weilrep: eta spec '" + text + "' has no factors");
  return {scale.value_or(1), ex};
}

/// g | U_p = sum_l a(pl) q^l.
inline ScalarQSeries U_p(const ScalarQSeries &f, i64 p) {
  if (p <= 0)
    throw precondition_error("weilrep: U_p needs p > 0");
  if (f.shift != Rational(0))
    throw precondition_error("weilrep: U_p needs integral exponents");
  ScalarQSeries out = f;
  out.coeffs.clear();
  out.truncation = f.truncation >= 0 ? f.truncation / p : -((-f.truncation + p - 1) / p);
  for (const auto &[l, c] : f.coeffs)
    if (mod(l, p) == 0)
      out.set(l / p, c);
  return out;
}

inline void write_scalar_series(std::ostream &os, const ScalarQSeries &f) {
  for (const auto &[l, c] : f.coeffs)
    os << l << " " << to_string(c) << "\n";
}

inline ScalarQSeries read_scalar_series(std::istream &is, const Rational &weight, i64 level,
                                        i64 truncation) {
  ScalarQSeries f{weight, level, Rational(0), truncation, {}};
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    std::stringstream ls(line);
    std::string l, c;
    if (!(ls >> l >> c))
      throw precondition_error("weilrep: malformed scalar series line '" + line + "'");
    const i64 li = detail::parse_i64(l);
    if (li > truncation)
      throw precondition_error("weilrep: scalar coefficient beyond truncation");
    f.set(li, parse_rational(c));
  }
  return f;
}

/// p^e for e in (1/2)Z, exactly.
inline CyclotomicNumber prime_power(i64 p, const Rational &e) {
  if ((e * Rational(2)).denominator() != 1)
    throw precondition_error("weilrep: exponent " + to_string(e) + " is not in Z/2");
  const i64 twice = (e * Rational(2)).numerator();
  const i64 whole = twice >= 0 ? twice / 2 : -((-twice + 1) / 2);
  Rational r(1);
  for (i64 i = 0; i < (whole >= 0 ? whole : -whole); ++i)
    r *= Rational(p);
  if (whole < 0)
    r = Rational(1) / r;
  CyclotomicNumber out(r);
  if (twice % 2 != 0)
    out = out * sqrt_integer(p);
  return out;
}

/// A scalar newform with its Fricke eigenvalue: g | W_p = epsilon g.
struct NewformData {
  ScalarQSeries g;
  int epsilon = 1;
  i64 p = 2;

  const Rational &weight() const noexcept { return g.weight; }

  /// First l (pl <= truncation, l >= 1) where a(pl) != -epsilon p^{k/2-1} a(l).
  std::optional<i64> first_up_violation() const {
    const CyclotomicNumber factor =
        prime_power(p, g.weight / Rational(2) - Rational(1)) * Rational(-epsilon);
    for (i64 l = 1; p * l <= g.truncation; ++l)
      if (!(CyclotomicNumber(g[p * l]) == factor * CyclotomicNumber(g[l])))
        return l;
    return std::nullopt;
  }

  void validate() const {
    if (!is_prime(p))
      throw precondition_error("weilrep: level must be prime");
    if (epsilon != 1 && epsilon != -1)
      throw precondition_error("weilrep: Fricke eigenvalue must be +-1");
    if (g.shift != Rational(0))
      throw precondition_error("weilrep: newform must have integral exponents");
    if (g.is_zero())
      throw precondition_error("weilrep: zero series is not a newform");
    if (!g.coeffs.empty() && g.coeffs.begin()->first < 1)
      throw precondition_error("weilrep: newform must be a cusp form");
    if (const auto l = first_up_violation())
      throw precondition_error("weilrep: U_p consistency fails at l = " + std::to_string(*l));
  }
};

/// The closed Fourier expansion of the lift:
///   c(m, mu) = p^{-k/2-n/2} at(pm) + [mu = 0] a(m).
inline VectorValuedQSeries vector_lift_closed(const ScalarQSeries &a, const ScalarQSeries &at,
                                              const FiniteQuadraticModule &A, const Rational &k,
                                              i64 p, i64 n, const Rational &truncation) {
  if (!is_prime(p))
    throw precondition_error("weilrep: lift needs a prime level");
  if (static_cast<i64>(A.rank()) != n + 2)
    throw precondition_error("weilrep: module rank must be n + 2");
  for (i64 d : A.orders())
    if (d != p)
      throw precondition_error("weilrep: module must be an F_p vector space");
  if (mod(A.signature(), 8) != 0)
    throw precondition_error("weilrep: only signature 0 mod 8 is supported");
  if (a.shift != Rational(0) || at.shift != Rational(0))
    throw precondition_error("weilrep: scalar inputs must have integral exponents");
  A.require_enumerable();
  if (Rational(a.truncation) < truncation || Rational(at.truncation) < truncation * Rational(p))
    throw precondition_error("weilrep: scalar inputs are truncated too early");
  const CyclotomicNumber scale = prime_power(p, -k / Rational(2) - Rational(n, 2));
  i64 low = 0;
  if (!a.coeffs.empty())
    low = std::min(low, a.coeffs.begin()->first);
  if (!at.coeffs.empty())
    low = std::min(low, at.coeffs.begin()->first / p - 1);

  VectorValuedQSeries out(A, k, truncation);
  const auto elems = A.elements();
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const Rational q = A.Q(elems[i]);
    for (Rational m = q + Rational(low); m <= truncation; m += Rational(1)) {
      const Rational pm = m * Rational(p);
      CyclotomicNumber c = scale * CyclotomicNumber(at[pm.numerator()]);
      if (i == 0 && pm.denominator() == 1)
        c += CyclotomicNumber(a[m.numerator()]);
      out.add(i, m, c);
    }
  }
  return out;
}

struct KernelReport {
  bool condition_holds = false;
  std::optional<i64> first_violation;
  i64 checked_up_to = 0;
  std::optional<std::pair<std::size_t, Rational>> nonzero_witness;
};

/// vec g for a newform g satisfying g | U_p = -p^{k/2-1} g | W_p, with
/// A = F_p^{n+2} the discriminant form of the lattice.
inline std::pair<VectorValuedQSeries, KernelReport>
kernel_element(const NewformData &nf, const FiniteQuadraticModule &A, i64 n,
               const Rational &truncation) {
  nf.validate();
  KernelReport rep;
  rep.checked_up_to = nf.g.truncation / nf.p;
  rep.first_violation = nf.first_up_violation();
  rep.condition_holds = !rep.first_violation;
  if (!rep.condition_holds)
    throw precondition_error("weilrep: U_p condition fails at l = " +
                             std::to_string(*rep.first_violation));
  const ScalarQSeries at = nf.g.scaled(Rational(nf.epsilon));
  VectorValuedQSeries v = vector_lift_closed(nf.g, at, A, nf.weight(), nf.p, n, truncation);
  for (const auto &[mu, comp] : v.components()) {
    for (const auto &[m, c] : comp)
      if (!c.is_zero()) {
        rep.nonzero_witness = {mu, m};
        break;
      }
    if (rep.nonzero_witness)
      break;
  }
  if (!rep.nonzero_witness)
    throw consistency_error("weilrep: lift of a nonzero newform vanished");
  return {std::move(v), rep};
}

/// f composed with a permutation of A: component mu moves to h(mu).
inline VectorValuedQSeries permuted(const VectorValuedQSeries &f, const Automorphism &h) {
  VectorValuedQSeries out = f.empty_like();
  for (const auto &[mu, comp] : f.components())
    for (const auto &[m, c] : comp)
      out.add(h.image.at(mu), m, c);
  return out;
}

} // namespace weilrep
