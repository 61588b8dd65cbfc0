#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"
#include "fqm.hpp"
#include "matrix.hpp"

namespace weilrep {

/// Full-matrix operations refuse groups larger than this.
inline constexpr i64 kMaxWeilDimension = 4096;

// --- metaplectic group -----------------------------------------------------

/// (M, phi) with phi(tau) = sign * principal sqrt(c tau + d).
struct MetaplecticElement {
  std::array<i64, 4> m{1, 0, 0, 1}; // a, b, c, d
  int sign = 1;

  i64 a() const { return m[0]; }
  i64 b() const { return m[1]; }
  i64 c() const { return m[2]; }
  i64 d() const { return m[3]; }

  static MetaplecticElement identity() { return {}; }
  static MetaplecticElement T(i64 n = 1) { return {{1, n, 0, 1}, 1}; }
  static MetaplecticElement S() { return {{0, -1, 1, 0}, 1}; }
  static MetaplecticElement Z() { return {{-1, 0, 0, -1}, 1}; }

  /// Accepts any det-1 matrix; sign picks the branch of phi.
  static MetaplecticElement from_matrix(i64 a, i64 b, i64 c, i64 d, int sign = 1) {
    if (checked_sub(checked_mul(a, d), checked_mul(b, c)) != 1)
      throw precondition_error("weilrep: metaplectic matrix must have det 1");
    if (sign != 1 && sign != -1)
      throw precondition_error("weilrep: metaplectic sign must be +1 or -1");
    return {{a, b, c, d}, sign};
  }

  std::complex<double> moebius(std::complex<double> tau) const {
    return (static_cast<double>(a()) * tau + static_cast<double>(b())) /
           (static_cast<double>(c()) * tau + static_cast<double>(d()));
  }

  std::complex<double> phi(std::complex<double> tau) const {
    return static_cast<double>(sign) *
           std::sqrt(static_cast<double>(c()) * tau + static_cast<double>(d()));
  }

  /// (M, phi)(M', phi') = (M M', phi(M' tau) phi'(tau)).
  friend MetaplecticElement operator*(const MetaplecticElement &x,
                                      const MetaplecticElement &y) {
    MetaplecticElement z;
    z.m = {checked_add(checked_mul(x.a(), y.a()), checked_mul(x.b(), y.c())),
           checked_add(checked_mul(x.a(), y.b()), checked_mul(x.b(), y.d())),
           checked_add(checked_mul(x.c(), y.a()), checked_mul(x.d(), y.c())),
           checked_add(checked_mul(x.c(), y.b()), checked_mul(x.d(), y.d()))};
    // The product of the two square roots is +-sqrt(c'' tau + d''); the sign
    // is constant on H, so one generic point decides it.
    const std::complex<double> tau(0.3183, 1.1716);
    const std::complex<double> lhs = x.phi(y.moebius(tau)) * y.phi(tau);
    const std::complex<double> rhs = z.phi(tau);
    z.sign = std::abs(lhs - rhs) < std::abs(lhs + rhs) ? 1 : -1;
    return z;
  }

  friend bool operator==(const MetaplecticElement &x, const MetaplecticElement &y) {
    return x.m == y.m && x.sign == y.sign;
  }
};

/// Word letters: ('T', n) = T^n, ('S', 1) = S, ('Z', k) = Z^k.
using MetaplecticWord = std::vector<std::pair<char, i64>>;

inline MetaplecticElement evaluate_word(const MetaplecticWord &w) {
  MetaplecticElement g;
  for (const auto &[letter, n] : w) {
    switch (letter) {
    case 'T':
      g = g * MetaplecticElement::T(n);
      break;
    case 'S':
      for (i64 i = 0; i < mod(n, 8); ++i)
        g = g * MetaplecticElement::S();
      break;
    case 'Z':
      for (i64 i = 0; i < mod(n, 4); ++i)
        g = g * MetaplecticElement::Z();
      break;
    default:
      throw precondition_error("weilrep: unknown word letter");
    }
  }
  return g;
}

/// Column continued-fraction decomposition: M = T^{q1} S T^{q2} S ... up to
/// a final Z-power correcting the branch of phi.
inline MetaplecticWord decompose(const MetaplecticElement &g) {
  i64 a = g.a(), b = g.b(), c = g.c(), d = g.d();
  MetaplecticWord word;
  while (c != 0) {
    // M = T^q S M' with M' = S^{-1} T^{-q} M
    const i64 q = static_cast<i64>(std::floor(static_cast<long double>(a) /
                                              static_cast<long double>(c)));
    const i64 a1 = a - q * c, b1 = b - q * d;
    word.emplace_back('T', q);
    word.emplace_back('S', 1);
    a = c;
    b = d;
    c = -a1;
    d = -b1;
  }
  // now [[a, b], [0, d]] with a = d = +-1
  if (a == 1) {
    word.emplace_back('T', b);
  } else {
    word.emplace_back('Z', 1); // -I
    word.emplace_back('T', -b);
  }
  const MetaplecticElement h = evaluate_word(word);
  if (h.m != g.m)
    throw consistency_error("weilrep: word decomposition failed");
  if (h.sign != g.sign)
    word.emplace_back('Z', 2);
  return word;
}

// --- Weil matrices ---------------------------------------------------------

/// scale * sqrt|A|^sqrt_power * entries, where sqrt|A| is the exact
/// Milgram root (real, positive). Keeping the root symbolic keeps entries
/// as integer combinations of roots of unity.
struct WeilMatrix {
  Matrix<CyclotomicNumber> entries;
  CyclotomicNumber scale{1};
  int sqrt_power = 0;

  std::size_t dim() const { return entries.rows(); }
};

namespace detail {

inline i64 common_modulus(const Matrix<CyclotomicNumber> &m) {
  i64 mm = 1;
  for (const auto &x : m.data())
    mm = lcm(mm, x.modulus());
  return mm;
}

inline bool is_diagonal(const Matrix<CyclotomicNumber> &m) {
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j)
      if (i != j && !m(i, j).trivially_zero())
        return false;
  return true;
}

} // namespace detail

/// Exact product of cyclotomic matrices using dense row accumulators.
inline Matrix<CyclotomicNumber> multiply(const Matrix<CyclotomicNumber> &a,
                                         const Matrix<CyclotomicNumber> &b) {
  if (a.cols() != b.rows())
    throw precondition_error("weilrep: matrix dimension mismatch");
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  Matrix<CyclotomicNumber> c(n, m);
  if (detail::is_diagonal(b)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!a(i, j).trivially_zero())
          c(i, j) = a(i, j) * b(j, j);
    return c;
  }
  if (detail::is_diagonal(a)) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (!b(i, j).trivially_zero())
          c(i, j) = a(i, i) * b(i, j);
    return c;
  }
  const i64 mod_all = lcm(detail::common_modulus(a), detail::common_modulus(b));
  // Flatten both operands to integer terms over mod_all; entries with a
  // denominator take the generic accumulator path.
  struct Flat {
    std::vector<std::uint32_t> start;
    std::vector<std::pair<i64, i64>> terms;
    bool integral = true;
  };
  auto flatten = [&](const Matrix<CyclotomicNumber> &x) {
    Flat f;
    f.start.reserve(x.data().size() + 1);
    for (const auto &v : x.data()) {
      f.start.push_back(static_cast<std::uint32_t>(f.terms.size()));
      if (v.denominator() != 1)
        f.integral = false;
      const i64 step = mod_all / v.modulus();
      for (const auto &[e, c] : v.terms())
        f.terms.emplace_back(e * step, c);
    }
    f.start.push_back(static_cast<std::uint32_t>(f.terms.size()));
    return f;
  };
  const Flat fa = flatten(a), fb = flatten(b);
  if (fa.integral && fb.integral) {
    const std::size_t mm = static_cast<std::size_t>(mod_all);
    std::vector<i64> buf(m * mm);
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(buf.begin(), buf.end(), 0);
      for (std::size_t t = 0; t < k; ++t) {
        const std::size_t ia = i * k + t;
        for (auto p = fa.start[ia]; p < fa.start[ia + 1]; ++p) {
          const auto [e1, c1] = fa.terms[p];
          for (std::size_t j = 0; j < m; ++j) {
            const std::size_t ib = t * m + j;
            i64 *slot = buf.data() + j * mm;
            for (auto q = fb.start[ib]; q < fb.start[ib + 1]; ++q) {
              const auto [e2, c2] = fb.terms[q];
              i64 e = e1 + e2;
              if (e >= mod_all)
                e -= mod_all;
              slot[e] = checked_add(slot[e], checked_mul(c1, c2));
            }
          }
        }
      }
      for (std::size_t j = 0; j < m; ++j) {
        std::vector<CyclotomicNumber::Term> terms;
        const i64 *slot = buf.data() + j * mm;
        for (std::size_t e = 0; e < mm; ++e)
          if (slot[e] != 0)
            terms.emplace_back(static_cast<i64>(e), slot[e]);
        if (!terms.empty())
          c(i, j) = CyclotomicNumber::from_sorted_terms(mod_all, 1, std::move(terms));
      }
    }
    return c;
  }
  std::vector<CyclotomicAccumulator> row(m, CyclotomicAccumulator(mod_all));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto &acc : row)
      acc.clear();
    for (std::size_t t = 0; t < k; ++t) {
      const auto &ait = a(i, t);
      if (ait.trivially_zero())
        continue;
      for (std::size_t j = 0; j < m; ++j)
        row[j].add_product(ait, b(t, j));
    }
    for (std::size_t j = 0; j < m; ++j)
      c(i, j) = row[j].finish();
  }
  return c;
}

inline Matrix<CyclotomicNumber> conjugate_transpose(const Matrix<CyclotomicNumber> &a) {
  Matrix<CyclotomicNumber> t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      t(j, i) = a(i, j).conj();
  return t;
}

inline bool equal_entries(const Matrix<CyclotomicNumber> &a,
                          const Matrix<CyclotomicNumber> &b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    return false;
  for (std::size_t i = 0; i < a.data().size(); ++i)
    if (!(a.data()[i] - b.data()[i]).is_zero())
      return false;
  return true;
}

/// Weil representation of one fixed module. Holds sqrt|A| and the element
/// enumeration; all matrices are indexed by FiniteQuadraticModule::index.
class WeilRepresentation {
public:
  explicit WeilRepresentation(FiniteQuadraticModule a) : a_(std::move(a)) {
    if (a_.order() > kMaxWeilDimension)
      throw precondition_error("weilrep: |A| = " + std::to_string(a_.order()) +
                               " exceeds the dense Weil-matrix bound " +
                               std::to_string(kMaxWeilDimension));
    n_ = static_cast<std::size_t>(a_.order());
    sqrt_card_ = a_.sqrt_card();
    elements_ = a_.elements();
  }

  const FiniteQuadraticModule &module() const noexcept { return a_; }
  std::size_t dim() const noexcept { return n_; }
  const CyclotomicNumber &sqrt_card() const noexcept { return sqrt_card_; }

  WeilMatrix identity() const {
    return {Matrix<CyclotomicNumber>::identity(n_, CyclotomicNumber(1)), 1, 0};
  }

  /// rho(T)^n: diagonal e(n Q(lambda)).
  WeilMatrix rho_T(i64 power = 1) const {
    Matrix<CyclotomicNumber> e(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      e(i, i) = CyclotomicNumber::root_of_unity(
          checked_mul(mod(power, a_.level()), a_.q_num(elements_[i])), a_.level());
    return {std::move(e), 1, 0};
  }

  /// rho(S): entry (mu, lambda) = e(-sig/8)/sqrt|A| * e(-(lambda, mu)).
  /// 1/sqrt|A| is stored as sqrt|A| / |A|.
  WeilMatrix rho_S() const {
    Matrix<CyclotomicNumber> e(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j)
        e(i, j) = CyclotomicNumber::root_of_unity(
            -a_.b_num(elements_[i], elements_[j]), a_.level());
    return {std::move(e),
            e_frac(Rational(-a_.signature(), 8)) * Rational(1, a_.order()), 1};
  }

  /// rho(Z): e_lambda -> e(-sig/4) e_{-lambda}.
  WeilMatrix rho_Z() const {
    Matrix<CyclotomicNumber> e(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      e(a_.index(a_.neg(elements_[i])), i) = CyclotomicNumber(1);
    return {std::move(e), e_frac(Rational(-a_.signature(), 4)), 0};
  }

  WeilMatrix multiply(const WeilMatrix &x, const WeilMatrix &y) const {
    WeilMatrix z{weilrep::multiply(x.entries, y.entries), x.scale * y.scale,
                 x.sqrt_power + y.sqrt_power};
    if (z.sqrt_power >= 2) {
      z.scale = z.scale * Rational(a_.order());
      z.sqrt_power -= 2;
    }
    return z;
  }

  WeilMatrix power(const WeilMatrix &x, unsigned k) const {
    WeilMatrix r = identity();
    for (unsigned i = 0; i < k; ++i)
      r = multiply(r, x);
    return r;
  }

  WeilMatrix conjugate_transpose(const WeilMatrix &x) const {
    return {weilrep::conjugate_transpose(x.entries), x.scale.conj(), x.sqrt_power};
  }

  /// Explicit entries (scale and root multiplied in).
  Matrix<CyclotomicNumber> materialize(const WeilMatrix &x) const {
    CyclotomicNumber f = x.scale;
    if (x.sqrt_power == 1)
      f = f * sqrt_card_;
    Matrix<CyclotomicNumber> out(x.entries.rows(), x.entries.cols());
    for (std::size_t i = 0; i < out.data().size(); ++i) {
      const auto &v = x.entries.data()[i];
      if (!v.trivially_zero())
        out(i / out.cols(), i % out.cols()) = v * f;
    }
    return out;
  }

  bool equal(const WeilMatrix &x, const WeilMatrix &y) const {
    if (x.entries.rows() != y.entries.rows() ||
        x.entries.cols() != y.entries.cols())
      return false;
    // scale_x sqrt^px E_x == scale_y sqrt^py E_y, entry by entry; the
    // factors are non-zero, so a zero entry only needs a zero test.
    CyclotomicNumber fx = x.scale, fy = y.scale;
    if (x.sqrt_power > y.sqrt_power)
      fx = fx * sqrt_card_;
    else if (y.sqrt_power > x.sqrt_power)
      fy = fy * sqrt_card_;
    for (std::size_t i = 0; i < x.entries.data().size(); ++i) {
      const auto &u = x.entries.data()[i];
      const auto &v = y.entries.data()[i];
      if (u.trivially_zero() && v.trivially_zero())
        continue;
      if (v.trivially_zero()) {
        if (!u.is_zero())
          return false;
      } else if (u.trivially_zero()) {
        if (!v.is_zero())
          return false;
      } else if (!(u * fx - v * fy).is_zero()) {
        return false;
      }
    }
    return true;
  }

  bool is_identity(const WeilMatrix &x) const { return equal(x, identity()); }

  bool is_unitary(const WeilMatrix &x) const {
    return is_identity(multiply(x, conjugate_transpose(x)));
  }

  /// rho of an arbitrary metaplectic element via its S/T word.
  WeilMatrix rho_of(const MetaplecticElement &g) const {
    return rho_of_word(decompose(g));
  }

  WeilMatrix rho_of_word(const MetaplecticWord &w) const {
    WeilMatrix r = identity();
    for (const auto &[letter, n] : w) {
      switch (letter) {
      case 'T':
        r = multiply(r, rho_T(n));
        break;
      case 'S':
        for (i64 i = 0; i < mod(n, 8); ++i)
          r = multiply(r, rho_S());
        break;
      case 'Z':
        for (i64 i = 0; i < mod(n, 4); ++i)
          r = multiply(r, rho_Z());
        break;
      default:
        throw precondition_error("weilrep: unknown word letter");
      }
    }
    return r;
  }

  /// e_lambda -> e_{h lambda}; rejects maps that do not preserve Q.
  WeilMatrix aut_matrix(const Automorphism &h) const {
    if (!preserves_form(a_, h))
      throw precondition_error("weilrep: map is not an automorphism of A");
    Matrix<CyclotomicNumber> e(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
      e(h.image[i], i) = CyclotomicNumber(1);
    return {std::move(e), 1, 0};
  }

  std::string dump(const WeilMatrix &x) const {
    const auto m = materialize(x);
    std::string out;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (j)
          out += "\t";
        out += m(i, j).to_string();
      }
      out += "\n";
    }
    return out;
  }

private:
  FiniteQuadraticModule a_;
  std::size_t n_ = 0;
  CyclotomicNumber sqrt_card_;
  std::vector<Element> elements_;
};

// --- the symmetric subspace ------------------------------------------------

/// W = span{e_g + e_{-g}} with one representative per orbit of +-1
/// (the smaller index); e_g alone when 2g = 0.
struct PlusSubspace {
  std::vector<std::size_t> representatives; // A-indices
  std::vector<std::size_t> partner;         // index of -g
  std::vector<int> norm2;                   // |v_g|^2: 1 or 2
  WeilMatrix T, S, ST;
};

inline void check_weight_parity(const FiniteQuadraticModule &a, const Rational &k) {
  const Rational twice = k * Rational(2);
  if (!is_integer(twice) || mod(twice.numerator() - a.signature(), 4) != 0)
    throw precondition_error("weilrep: weight " + to_string(k) +
                             " violates 2k = sig(A) mod 4 (sig = " +
                             std::to_string(a.signature()) + ")");
}

/// Orbit representatives of A / +-1 in index order.
inline std::vector<std::size_t> plus_orbit_representatives(const FiniteQuadraticModule &a) {
  a.require_enumerable();
  std::vector<std::size_t> reps;
  for (std::size_t i = 0; i < static_cast<std::size_t>(a.order()); ++i)
    if (a.index(a.neg(a.element(i))) >= i)
      reps.push_back(i);
  return reps;
}

/// Matrix of rho(g) on W in the basis v_g: column g holds the e_d
/// coefficients (d a representative) of rho(g) v_g.
inline WeilMatrix restrict_to_plus(const WeilMatrix &full,
                                   const std::vector<std::size_t> &reps,
                                   const std::vector<std::size_t> &partner) {
  const std::size_t d = reps.size();
  Matrix<CyclotomicNumber> r(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      CyclotomicNumber v = full.entries(reps[i], reps[j]);
      if (partner[j] != reps[j])
        v = v + full.entries(reps[i], partner[j]);
      r(i, j) = std::move(v);
    }
  return {std::move(r), full.scale, full.sqrt_power};
}

inline PlusSubspace plus_subspace(const WeilRepresentation &rep, const Rational &k) {
  const auto &a = rep.module();
  check_weight_parity(a, k);
  PlusSubspace w;
  w.representatives = plus_orbit_representatives(a);
  for (std::size_t i : w.representatives) {
    w.partner.push_back(a.index(a.neg(a.element(i))));
    w.norm2.push_back(w.partner.back() == i ? 1 : 2);
  }
  const WeilMatrix t = rep.rho_T(), s = rep.rho_S();
  w.T = restrict_to_plus(t, w.representatives, w.partner);
  w.S = restrict_to_plus(s, w.representatives, w.partner);
  w.ST = restrict_to_plus(rep.multiply(s, t), w.representatives, w.partner);
  return w;
}

/// Unitarity on W with respect to the basis Gram matrix D = diag(|v_g|^2):
/// R D^{-1} R^H = D^{-1}.
inline bool plus_unitary(const WeilRepresentation &rep, const PlusSubspace &w,
                         const WeilMatrix &r) {
  const std::size_t d = w.representatives.size();
  Matrix<CyclotomicNumber> dinv(d, d);
  for (std::size_t i = 0; i < d; ++i)
    dinv(i, i) = CyclotomicNumber(Rational(1, w.norm2[i]));
  const WeilMatrix scaled{multiply(r.entries, dinv), r.scale, r.sqrt_power};
  const WeilMatrix lhs = rep.multiply(scaled, rep.conjugate_transpose(r));
  return rep.equal(lhs, WeilMatrix{dinv, 1, 0});
}

// --- relation suite ----------------------------------------------------------

struct RelationReport {
  bool s_squared = false;      // rho(S)^2 = rho(Z)
  bool st_cubed = false;       // (rho(S) rho(T))^3 = rho(Z)
  bool z_action = false;       // rho(S)^2 e_l = e(-sig/4) e_{-l}, built from scratch
  bool unitary = false;        // rho(S), rho(T)
  i64 automorphisms = 0;       // how many were tested
  bool aut_commute = false;    // with rho(S) and rho(T)
  bool all() const { return s_squared && st_cubed && z_action && unitary && aut_commute; }
};

/// Defining relations of Mp_2(Z) on rho_A, plus commutation with -1 and
/// the unit scalings u x with u^2 Q = Q.
inline RelationReport relation_suite(const WeilRepresentation &rep) {
  const auto &a = rep.module();
  RelationReport r;
  const WeilMatrix s = rep.rho_S(), t = rep.rho_T();
  const WeilMatrix s2 = rep.multiply(s, s);
  r.s_squared = rep.equal(s2, rep.rho_Z());
  const WeilMatrix st = rep.multiply(s, t);
  r.st_cubed = rep.equal(rep.multiply(rep.multiply(st, st), st), rep.rho_Z());
  Matrix<CyclotomicNumber> z(rep.dim(), rep.dim());
  for (std::size_t i = 0; i < rep.dim(); ++i)
    z(a.index(a.neg(a.element(i))), i) = CyclotomicNumber(1);
  r.z_action = rep.equal(s2, WeilMatrix{std::move(z), e_frac(Rational(-a.signature(), 4)), 0});
  r.unitary = rep.is_unitary(s) && rep.is_unitary(t);
  std::vector<Automorphism> auts{negation(a)};
  i64 exponent = 1;
  for (i64 d : a.orders())
    exponent = lcm(exponent, d);
  for (i64 u = 2; u < exponent && auts.size() < 4; ++u)
    if (gcd(u, exponent) == 1 && mod(u + 1, exponent) != 0)
      if (auto h = unit_scaling(a, u))
        auts.push_back(*h);
  r.automorphisms = static_cast<i64>(auts.size());
  r.aut_commute = true;
  for (const auto &h : auts) {
    const WeilMatrix m = rep.aut_matrix(h);
    r.aut_commute = r.aut_commute && rep.equal(rep.multiply(m, s), rep.multiply(s, m)) &&
                    rep.equal(rep.multiply(m, t), rep.multiply(t, m));
  }
  return r;
}

} // namespace weilrep
