#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fqm.hpp"
#include "integer_matrix.hpp"
#include "rational.hpp"

namespace weilrep {

using RationalVector = std::vector<Rational>;

inline RationalVector to_rational(const IntVector &v) {
  return {v.begin(), v.end()};
}

/// Integer Gram matrix with even diagonal; coordinates are with respect to
/// the lattice basis, Q(x) = x^T G x / 2.
class EvenLattice {
public:
  explicit EvenLattice(IntMatrix gram) : pres_(gram_presentation(gram)), gram_(std::move(gram)) {
    const Inertia in = rank() == 0 ? Inertia{} : inertia(gram_);
    positive_ = static_cast<int>(in.positive);
    negative_ = static_cast<int>(in.negative);
    if (rank() > 0)
      u_inverse_ = inverse(matrix_cast<i64, Rational>(pres_.U));
  }

  std::size_t rank() const noexcept { return gram_.rows(); }
  const IntMatrix &gram() const noexcept { return gram_; }
  const RationalMatrix &gram_inverse() const noexcept { return pres_.gram_inverse; }
  int b_plus() const noexcept { return positive_; }
  int b_minus() const noexcept { return negative_; }
  bool positive_definite() const noexcept {
    return positive_ == static_cast<int>(rank());
  }
  i64 det() const { return rank() == 0 ? 1 : determinant(gram_); }
  const FiniteQuadraticModule &disc() const noexcept { return pres_.module; }
  i64 level() const noexcept { return pres_.module.level(); }

  Rational bilinear(const RationalVector &x, const RationalVector &y) const {
    Rational s(0);
    for (std::size_t i = 0; i < rank(); ++i) {
      if (x[i] == Rational(0))
        continue;
      for (std::size_t j = 0; j < rank(); ++j)
        if (gram_(i, j) != 0)
          s += x[i] * Rational(gram_(i, j)) * y[j];
    }
    return s;
  }
  Rational Q(const RationalVector &x) const { return bilinear(x, x) / Rational(2); }

  i64 bilinear(const IntVector &x, const IntVector &y) const {
    return dot(x, multiply(gram_, y));
  }
  i64 Q(const IntVector &x) const { return bilinear(x, x) / 2; }

  /// G x: the coordinates of x in the dual basis.
  IntVector dual_coordinates(const IntVector &x) const { return multiply(gram_, x); }

  /// gcd of (x, L), i.e. (x, L) = n Z.
  i64 ideal(const IntVector &x) const { return content_gcd(dual_coordinates(x)); }

  bool in_dual(const RationalVector &x) const {
    for (std::size_t i = 0; i < rank(); ++i) {
      Rational s(0);
      for (std::size_t j = 0; j < rank(); ++j)
        s += Rational(gram_(i, j)) * x[j];
      if (!is_integer(s))
        return false;
    }
    return true;
  }

  /// Class of a dual vector in L'/L.
  Element project(const RationalVector &v) const {
    if (!in_dual(v))
      throw precondition_error("weilrep: vector is not in the dual lattice");
    const auto &kept = pres_.kept;
    Element out(kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k) {
      Rational s(0);
      for (std::size_t j = 0; j < rank(); ++j) {
        Rational gv(0);
        for (std::size_t l = 0; l < rank(); ++l)
          gv += Rational(gram_(j, l)) * v[l];
        s += Rational(pres_.U(kept[k], j)) * gv;
      }
      out[k] = mod(s.numerator(), pres_.module.orders()[k]);
    }
    return out;
  }

  /// Dual vector representing the k-th generator of L'/L.
  RationalVector generator_vector(std::size_t k) const {
    const std::size_t i = pres_.kept.at(k);
    RationalVector w = u_inverse_.col(i);
    RationalVector v(rank(), Rational(0));
    for (std::size_t a = 0; a < rank(); ++a)
      for (std::size_t b = 0; b < rank(); ++b)
        v[a] += pres_.gram_inverse(a, b) * w[b];
    return v;
  }

  /// Some dual vector in the class mu.
  RationalVector lift(const Element &mu) const {
    RationalVector v(rank(), Rational(0));
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (mu[k] == 0)
        continue;
      const RationalVector g = generator_vector(k);
      for (std::size_t a = 0; a < rank(); ++a)
        v[a] += Rational(mu[k]) * g[a];
    }
    return v;
  }

private:
  GramPresentation pres_;
  IntMatrix gram_;
  RationalMatrix u_inverse_;
  int positive_ = 0;
  int negative_ = 0;
};

inline EvenLattice direct_sum(const EvenLattice &a, const EvenLattice &b) {
  return EvenLattice(block_diagonal(a.gram(), b.gram()));
}

/// The discriminant form together with the projection L' -> A.
struct DiscriminantData {
  FiniteQuadraticModule module;
  std::function<Element(const RationalVector &)> projection;
};

inline DiscriminantData disc_module(const EvenLattice &l) {
  return {l.disc(), [l](const RationalVector &v) { return l.project(v); }};
}

// --- maps ------------------------------------------------------------------------

/// x -> M x on coordinates (M rational in general).
struct LatticeMap {
  RationalMatrix matrix;
  bool preserves_Q = false;
  bool integral = false;
  bool in_discriminant_kernel = false;

  RationalVector apply(const RationalVector &x) const {
    RationalVector y(matrix.rows(), Rational(0));
    for (std::size_t i = 0; i < matrix.rows(); ++i)
      for (std::size_t j = 0; j < matrix.cols(); ++j)
        y[i] += matrix(i, j) * x[j];
    return y;
  }

  std::string dump() const {
    std::string out;
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
      for (std::size_t j = 0; j < matrix.cols(); ++j) {
        if (j)
          out += " ";
        out += to_string(matrix(i, j));
      }
      out += "\n";
    }
    return out;
  }
};

/// Fills the flags of `m` for lattice `l`: M^T G M = G; M Z^n = Z^n; and
/// M w - w in L for every generator w of L'/L.
inline LatticeMap classify_map(const EvenLattice &l, RationalMatrix m) {
  LatticeMap out{std::move(m)};
  const std::size_t n = l.rank();
  const RationalMatrix g = matrix_cast<i64, Rational>(l.gram());
  out.preserves_Q = out.matrix.transpose() * g * out.matrix == g;
  out.integral = true;
  for (const auto &v : out.matrix.data())
    out.integral = out.integral && is_integer(v);
  if (out.integral && n > 0) {
    IntMatrix im(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        im(i, j) = out.matrix(i, j).numerator();
    out.integral = std::abs(determinant(im)) == 1;
  }
  out.in_discriminant_kernel = out.integral && out.preserves_Q;
  for (std::size_t k = 0; out.in_discriminant_kernel && k < l.disc().rank(); ++k) {
    const RationalVector w = l.generator_vector(k);
    const RationalVector mw = out.apply(w);
    for (std::size_t i = 0; i < n; ++i)
      if (!is_integer(mw[i] - w[i])) {
        out.in_discriminant_kernel = false;
        break;
      }
  }
  return out;
}

/// Eichler transformation a -> a - (a,u) v + (a,v) u - Q(v) (a,u) u for
/// isotropic u and v orthogonal to u (both in L tensor Q).
inline LatticeMap eichler(const EvenLattice &l, const RationalVector &u,
                          const RationalVector &v) {
  const std::size_t n = l.rank();
  if (u.size() != n || v.size() != n)
    throw precondition_error("weilrep: Eichler vectors have wrong length");
  if (l.Q(u) != Rational(0))
    throw precondition_error("weilrep: Eichler element needs isotropic u");
  if (l.bilinear(u, v) != Rational(0))
    throw precondition_error("weilrep: Eichler element needs v orthogonal to u");
  RationalVector gu(n, Rational(0)), gv(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      gu[i] += Rational(l.gram()(i, j)) * u[j];
      gv[i] += Rational(l.gram()(i, j)) * v[j];
    }
  const Rational qv = l.Q(v);
  RationalMatrix e = RationalMatrix::identity(n, Rational(1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      e(i, j) += -v[i] * gu[j] + u[i] * gv[j] - qv * u[i] * gu[j];
  return classify_map(l, std::move(e));
}

// --- isotropic vectors and splittings --------------------------------------------

namespace detail {

/// Calls f on every vector of [-r, r]^n in lexicographic order (first
/// coordinate most significant, each running from -r to r) until f
/// returns true.
inline bool for_each_in_box(std::size_t n, i64 r,
                            const std::function<bool(const IntVector &)> &f) {
  IntVector x(n, -r);
  if (n == 0)
    return f(x);
  while (true) {
    if (f(x))
      return true;
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (x[i] < r) {
        ++x[i];
        break;
      }
      x[i] = -r;
      if (i == 0)
        return false;
    }
  }
}

} // namespace detail

/// First primitive isotropic l in the box |l_i| <= bound (lexicographic)
/// with (l, L) = N Z. Not finding one says nothing about existence.
inline std::optional<IntVector> find_isotropic_with_ideal(const EvenLattice &l, i64 n,
                                                          i64 bound) {
  std::optional<IntVector> found;
  detail::for_each_in_box(l.rank(), bound, [&](const IntVector &x) {
    if (content_gcd(x) != 1)
      return false;
    if (l.Q(x) != 0 || l.ideal(x) != n)
      return false;
    found = x;
    return true;
  });
  return found;
}

struct SplitResult {
  IntVector ell;
  RationalVector ell_prime;  // in L', (ell', ell) = 1
  IntVector ell_tilde;       // N (ell' - Q(ell') ell)
  EvenLattice K;
  IntMatrix basis;           // columns: basis of K, then ell, ell_tilde
  IntMatrix gram_in_basis;   // diag(gram(K), [[0, N], [N, 0]])
  LatticeMap basis_change;   // new coordinates -> old coordinates
};

/// L = K + U(N) with U(N) spanned by ell, ell_tilde.
inline SplitResult split_UN(const EvenLattice &l, const IntVector &ell) {
  const std::size_t n = l.rank();
  const i64 level = l.level();
  if (ell.size() != n)
    throw precondition_error("weilrep: ell has wrong length");
  if (content_gcd(ell) != 1)
    throw precondition_error("weilrep: ell must be primitive");
  if (l.Q(ell) != 0)
    throw precondition_error("weilrep: ell must be isotropic");
  if (l.ideal(ell) != level)
    throw precondition_error("weilrep: (ell, L) = " + std::to_string(l.ideal(ell)) +
                             "Z but the level is " + std::to_string(level));

  // ell' = G^{-1} y with y . ell = 1; first such y in growing boxes
  std::optional<IntVector> y;
  i64 bound = 0;
  for (i64 v : ell)
    bound = std::max(bound, std::abs(v));
  for (i64 r = 1; r <= std::max<i64>(bound, 1) && !y; ++r)
    detail::for_each_in_box(n, r, [&](const IntVector &c) {
      if (dot(c, ell) != 1)
        return false;
      y = c;
      return true;
    });
  if (!y)
    throw consistency_error("weilrep: no dual vector pairs to 1 with ell");
  RationalVector lp(n, Rational(0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      lp[i] += l.gram_inverse()(i, j) * Rational((*y)[j]);
  const Rational qlp = l.Q(lp);
  IntVector lt(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Rational v = Rational(level) * (lp[i] - qlp * Rational(ell[i]));
    if (!is_integer(v))
      throw consistency_error("weilrep: ell_tilde is not in L");
    lt[i] = v.numerator();
  }

  IntMatrix pair(2, n);
  const IntVector g1 = l.dual_coordinates(ell), g2 = l.dual_coordinates(lt);
  for (std::size_t j = 0; j < n; ++j) {
    pair(0, j) = g1[j];
    pair(1, j) = g2[j];
  }
  const IntMatrix kb = integer_kernel(pair);
  IntMatrix basis(n, n);
  for (std::size_t j = 0; j < kb.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      basis(i, j) = kb(i, j);
  for (std::size_t i = 0; i < n; ++i) {
    basis(i, n - 2) = ell[i];
    basis(i, n - 1) = lt[i];
  }
  if (std::abs(determinant(basis)) != 1)
    throw consistency_error("weilrep: K + U(N) basis is not unimodular");
  const IntMatrix gb = multiply(multiply(basis.transpose(), l.gram()), basis);
  IntMatrix kg(n - 2, n - 2);
  for (std::size_t i = 0; i + 2 < n; ++i)
    for (std::size_t j = 0; j + 2 < n; ++j)
      kg(i, j) = gb(i, j);
  const IntMatrix expected = block_diagonal(kg, gram_hyperbolic(level));
  if (!(gb == expected))
    throw consistency_error("weilrep: split Gram is not block diagonal");
  LatticeMap change{matrix_cast<i64, Rational>(basis)};
  change.integral = true;
  return {ell, std::move(lp), std::move(lt), EvenLattice(kg), std::move(basis), gb,
          std::move(change)};
}

struct K0Result {
  EvenLattice K0;
  IntMatrix basis;    // columns in K coordinates
  i64 index = 1;      // [K : K0] = N_K / N_ell
  i64 n_ell = 1;      // (ell, K) = n_ell Z
  IntVector ell_in_K0;
};

/// K0 = {x in K : (ell, x) in N_K Z}.
inline K0Result sublattice_K0(const EvenLattice &k, const IntVector &ell) {
  const std::size_t n = k.rank();
  if (ell.size() != n || content_gcd(ell) != 1)
    throw precondition_error("weilrep: ell must be primitive");
  if (k.Q(ell) != 0)
    throw precondition_error("weilrep: ell must be isotropic");
  const i64 nk = k.level(), nl = k.ideal(ell);
  if (nk % nl != 0)
    throw consistency_error("weilrep: (ell, K) does not divide the level");
  const i64 t = nk / nl;
  const IntVector c = k.dual_coordinates(ell);
  IntMatrix row(1, n);
  for (std::size_t j = 0; j < n; ++j)
    row(0, j) = c[j];
  const IntMatrix ker = integer_kernel(row);
  // y with c . y = n_ell, from the Smith form of the row
  const SmithForm s = smith_normal_form(row);
  IntVector y(n);
  for (std::size_t i = 0; i < n; ++i)
    y[i] = s.V(i, 0) * (nl / s.D(0, 0)) * s.U(0, 0);
  if (dot(c, y) != nl)
    throw consistency_error("weilrep: failed to solve (ell, y) = n_ell");
  IntMatrix basis(n, n);
  for (std::size_t j = 0; j < ker.cols(); ++j)
    for (std::size_t i = 0; i < n; ++i)
      basis(i, j) = ker(i, j);
  for (std::size_t i = 0; i < n; ++i)
    basis(i, n - 1) = checked_mul(t, y[i]);
  const IntMatrix g0 = multiply(multiply(basis.transpose(), k.gram()), basis);
  const RationalMatrix binv = inverse(basis);
  IntVector l0(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rational v(0);
    for (std::size_t j = 0; j < n; ++j)
      v += binv(i, j) * Rational(ell[j]);
    if (!is_integer(v))
      throw consistency_error("weilrep: ell is not in K0");
    l0[i] = v.numerator();
  }
  if (std::abs(determinant(basis)) != t)
    throw consistency_error("weilrep: K0 has the wrong index");
  return {EvenLattice(g0), std::move(basis), t, nl, std::move(l0)};
}

// --- norm counting -------------------------------------------------------------

struct NormCount {
  i64 count = 0;
  bool exact = false; // false: lower bound from a bounded search
};

/// Number of lambda in L + mu with Q(lambda) = m. Exact for positive
/// definite L; otherwise a bounded search over |x_i| <= search_bound,
/// flagged as a lower bound (or refused when exact_required).
inline NormCount count_norm_vectors(const EvenLattice &l, const Rational &m,
                                    const Element &mu, i64 search_bound,
                                    bool exact_required = false) {
  const auto &a = l.disc();
  if (frac(m) != a.Q(a.reduce(mu)))
    return {0, true};
  const RationalVector base = l.lift(a.reduce(mu));
  const std::size_t n = l.rank();
  std::vector<i64> lo(n), hi(n);
  NormCount out;
  if (l.positive_definite()) {
    out.exact = true;
    if (m < Rational(0))
      return {0, true};
    for (std::size_t i = 0; i < n; ++i) {
      const double b = std::sqrt(2.0 * boost::rational_cast<double>(m) *
                                 boost::rational_cast<double>(l.gram_inverse()(i, i))) +
                       1e-9;
      const double c = boost::rational_cast<double>(base[i]);
      lo[i] = static_cast<i64>(std::ceil(-b - c));
      hi[i] = static_cast<i64>(std::floor(b - c));
    }
  } else {
    if (exact_required)
      throw precondition_error("weilrep: exact norm counts need a definite lattice");
    for (std::size_t i = 0; i < n; ++i) {
      lo[i] = -search_bound;
      hi[i] = search_bound;
    }
  }
  if (n == 0)
    return {m == Rational(0) ? 1 : 0, true};
  IntVector x(lo.begin(), lo.end());
  for (std::size_t i = 0; i < n; ++i)
    if (lo[i] > hi[i])
      return out;
  while (true) {
    RationalVector v(n);
    for (std::size_t i = 0; i < n; ++i)
      v[i] = base[i] + Rational(x[i]);
    if (l.Q(v) == m)
      ++out.count;
    std::size_t i = n;
    bool done = true;
    while (i > 0) {
      --i;
      if (x[i] < hi[i]) {
        ++x[i];
        done = false;
        break;
      }
      x[i] = lo[i];
    }
    if (done)
      break;
  }
  return out;
}

// --- prime level: L = D + M -------------------------------------------------------

/// Gram matrix of M = U(p) + U(p) as 2x2 integral matrices X with
/// Q(X) = p det X, coordinates (x11, x12, x21, x22).
inline IntMatrix matrix_model_gram(i64 p) {
  IntMatrix g(4, 4, 0);
  g(0, 3) = g(3, 0) = p;
  g(1, 2) = g(2, 1) = -p;
  return g;
}

struct RepresentationResult {
  IntVector lambda;
  i64 t = 0;
  bool norm_ok = false;
  bool primitive_in_dual = false;
  bool not_divisible = false;
};

/// Given L = D + M (M the matrix model, last four coordinates), a witness
/// lambda0 in L with Q(lambda0) in pZ, lambda0/p not in L' and diagonal
/// M-part, and a target m in pZ: lambda = lambda0_D + [[a, 1], [t, b]]
/// with Q(lambda) = Q(lambda0) - p t = m.
inline RepresentationResult represent_norm_split(const EvenLattice &l, i64 p, i64 m,
                                                 const IntVector &lambda0) {
  const std::size_t n = l.rank();
  if (n < 4 || lambda0.size() != n)
    throw precondition_error("weilrep: lattice must contain the matrix model");
  const std::size_t off = n - 4;
  const IntMatrix mg = matrix_model_gram(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const i64 want = i >= off ? mg(i - off, j) : 0;
      if (l.gram()(i, off + j) != want)
        throw precondition_error("weilrep: last four coordinates are not an "
                                 "orthogonal matrix-model summand");
    }
  if (mod(m, p) != 0)
    throw precondition_error("weilrep: target norm must lie in pZ");
  const i64 m0 = l.Q(lambda0);
  if (mod(m0, p) != 0 || l.ideal(lambda0) % p == 0)
    throw precondition_error("weilrep: lambda0 is not a witness (need Q in pZ "
                             "and lambda0/p outside L')");
  if (lambda0[off + 1] != 0 || lambda0[off + 2] != 0)
    throw precondition_error("weilrep: witness must have diagonal M-part");
  RepresentationResult r;
  r.t = (m0 - m) / p;
  r.lambda = lambda0;
  r.lambda[off + 1] = 1;
  r.lambda[off + 2] = r.t;
  r.norm_ok = l.Q(r.lambda) == m;
  r.primitive_in_dual = l.ideal(r.lambda) == 1;
  r.not_divisible = l.ideal(r.lambda) % p != 0;
  if (!(r.norm_ok && r.primitive_in_dual && r.not_divisible))
    throw consistency_error("weilrep: constructed vector fails verification");
  return r;
}

} // namespace weilrep
