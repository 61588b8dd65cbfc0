#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "cyclotomic.hpp"
#include "integer_matrix.hpp"
#include "rational.hpp"

namespace weilrep {

/// Coordinates with respect to the generators; entry i reduced mod d_i.
using Element = std::vector<i64>;

/// Hard cap on |A| for anything that enumerates the whole group.
inline constexpr i64 kMaxEnumeratedOrder = 20000;

class FiniteQuadraticModule {
public:
  FiniteQuadraticModule() : FiniteQuadraticModule({}, {}, RationalMatrix{}, 0) {}

  /// Raw presentation. Orders d_i (> 1), Q(g_i) and (g_i, g_j) in Q/Z.
  /// Validates well-definedness, compatibility and non-degeneracy.
  static FiniteQuadraticModule from_generators(std::vector<i64> orders,
                                               std::vector<Rational> q,
                                               RationalMatrix bilinear) {
    FiniteQuadraticModule a(std::move(orders), std::move(q), std::move(bilinear),
                            0);
    a.validate();
    a.signature_ = a.milgram_signature();
    return a;
  }

  /// U(N)'/U(N) = (Z/N)^2 with Q(a, b) = ab/N.
  static FiniteQuadraticModule hyperbolic(i64 n) {
    if (n < 1)
      throw precondition_error("weilrep: U(N) needs N >= 1");
    if (n == 1)
      return {};
    RationalMatrix b(2, 2, Rational(0));
    b(0, 1) = b(1, 0) = Rational(1, n);
    return FiniteQuadraticModule({n, n}, {Rational(0), Rational(0)},
                                 std::move(b), 0);
  }

  /// Discriminant form L'/L of an even lattice with Gram matrix `gram`.
  static FiniteQuadraticModule from_gram(const IntMatrix &gram);

  // --- structure ---------------------------------------------------------
  std::size_t rank() const noexcept { return orders_.size(); }
  const std::vector<i64> &orders() const noexcept { return orders_; }
  i64 order() const noexcept { return order_; }
  i64 level() const noexcept { return level_; }
  int signature() const noexcept { return signature_; }
  const std::vector<Rational> &q_values() const noexcept { return q_; }
  const RationalMatrix &bilinear_matrix() const noexcept { return b_; }
  bool is_trivial() const noexcept { return order_ == 1; }

  // --- elements ----------------------------------------------------------
  Element zero() const { return Element(rank(), 0); }

  Element reduce(Element x) const {
    check_arity(x);
    for (std::size_t i = 0; i < x.size(); ++i)
      x[i] = mod(x[i], orders_[i]);
    return x;
  }

  /// Index in lexicographic order, first coordinate most significant.
  std::size_t index(const Element &x) const {
    check_arity(x);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      idx = idx * static_cast<std::size_t>(orders_[i]) +
            static_cast<std::size_t>(mod(x[i], orders_[i]));
    return idx;
  }

  Element element(std::size_t idx) const {
    Element x(rank());
    for (std::size_t i = rank(); i-- > 0;) {
      x[i] = static_cast<i64>(idx % static_cast<std::size_t>(orders_[i]));
      idx /= static_cast<std::size_t>(orders_[i]);
    }
    return x;
  }

  /// All elements in index order. Refuses groups above the enumeration cap.
  std::vector<Element> elements() const {
    require_enumerable();
    std::vector<Element> out;
    out.reserve(static_cast<std::size_t>(order_));
    for (std::size_t i = 0; i < static_cast<std::size_t>(order_); ++i)
      out.push_back(element(i));
    return out;
  }

  Element add(const Element &x, const Element &y) const {
    check_arity(x);
    check_arity(y);
    Element z(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      z[i] = mod(x[i] + y[i], orders_[i]);
    return z;
  }

  Element neg(const Element &x) const {
    check_arity(x);
    Element z(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      z[i] = mod(-x[i], orders_[i]);
    return z;
  }

  Element scale(i64 c, const Element &x) const {
    check_arity(x);
    Element z(rank());
    for (std::size_t i = 0; i < rank(); ++i)
      z[i] = mod(checked_mul(mod(c, orders_[i]), mod(x[i], orders_[i])),
                 orders_[i]);
    return z;
  }

  bool is_zero(const Element &x) const {
    for (std::size_t i = 0; i < rank(); ++i)
      if (mod(x[i], orders_[i]) != 0)
        return false;
    return true;
  }

  i64 element_order(const Element &x) const {
    i64 o = 1;
    for (std::size_t i = 0; i < rank(); ++i)
      o = lcm(o, orders_[i] / gcd(mod(x[i], orders_[i]), orders_[i]));
    return o;
  }

  /// N * Q(x) mod N.
  i64 q_num(const Element &x) const {
    check_arity(x);
    i64 s = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      const i64 xi = mod(x[i], orders_[i]);
      if (xi == 0)
        continue;
      s = mod(s + mod(checked_mul(mod(xi * xi, level_), qn_[i]), level_), level_);
      for (std::size_t j = i + 1; j < rank(); ++j) {
        const i64 xj = mod(x[j], orders_[j]);
        if (xj != 0)
          s = mod(s + mod(checked_mul(mod(xi * xj, level_), bn_(i, j)), level_),
                  level_);
      }
    }
    return s;
  }

  /// N * (x, y) mod N.
  i64 b_num(const Element &x, const Element &y) const {
    check_arity(x);
    check_arity(y);
    i64 s = 0;
    for (std::size_t i = 0; i < rank(); ++i) {
      const i64 xi = mod(x[i], orders_[i]);
      if (xi == 0)
        continue;
      for (std::size_t j = 0; j < rank(); ++j) {
        const i64 yj = mod(y[j], orders_[j]);
        if (yj != 0)
          s = mod(s + mod(checked_mul(mod(xi * yj, level_), bn_(i, j)), level_),
                  level_);
      }
    }
    return s;
  }

  Rational Q(const Element &x) const { return Rational(q_num(x), level_); }
  Rational B(const Element &x, const Element &y) const {
    return Rational(b_num(x, y), level_);
  }

  // --- Gauss sums --------------------------------------------------------
  /// sum_{x in A} e(c Q(x)), exact.
  CyclotomicNumber gauss_sum(i64 c = 1) const {
    require_enumerable();
    CyclotomicAccumulator acc(level_);
    for (std::size_t i = 0; i < static_cast<std::size_t>(order_); ++i)
      acc.add_root(checked_mul(mod(c, level_), q_num(element(i))));
    return acc.finish();
  }

  /// s mod 8 with sum e(Q(x)) = sqrt|A| e(s/8); throws consistency_error
  /// when the Gauss sum has the wrong magnitude.
  int milgram_signature() const {
    const CyclotomicNumber g = gauss_sum(1);
    const auto norm = (g * g.conj()).as_rational();
    if (!norm || *norm != Rational(order_))
      throw consistency_error(
          "weilrep: Gauss sum magnitude differs from sqrt|A| (degenerate "
          "module?)");
    const CyclotomicNumber root = sqrt_integer(order_);
    for (int s = 0; s < 8; ++s)
      if (g == root * e_frac(Rational(s, 8)))
        return s;
    throw consistency_error("weilrep: Gauss sum phase is not an 8th root");
  }

  /// sqrt|A| realised as e(-sig/8) * sum e(Q(x)).
  CyclotomicNumber sqrt_card() const {
    const CyclotomicNumber r = e_frac(Rational(-signature_, 8)) * gauss_sum(1);
    if (!(r * r == CyclotomicNumber(order_)))
      throw consistency_error("weilrep: sqrt_card squared differs from |A|");
    return r;
  }

  /// Generator-level equality (same presentation), not isomorphism.
  friend bool operator==(const FiniteQuadraticModule &a,
                         const FiniteQuadraticModule &b) {
    return a.orders_ == b.orders_ && a.qn_ == b.qn_ && a.bn_ == b.bn_ &&
           a.level_ == b.level_ && a.signature_ == b.signature_;
  }

  // internal constructor; `sig` is trusted
  FiniteQuadraticModule(std::vector<i64> orders, std::vector<Rational> q,
                        RationalMatrix bilinear, int sig)
      : orders_(std::move(orders)), q_(std::move(q)), b_(std::move(bilinear)),
        signature_(static_cast<int>(mod(sig, 8))) {
    if (q_.size() != orders_.size() || b_.rows() != orders_.size() ||
        b_.cols() != orders_.size())
      throw precondition_error("weilrep: inconsistent module presentation");
    order_ = 1;
    for (i64 d : orders_) {
      if (d < 1)
        throw precondition_error("weilrep: generator orders must be positive");
      order_ = checked_mul(order_, d);
    }
    for (auto &v : q_)
      v = frac(v);
    for (std::size_t i = 0; i < rank(); ++i)
      for (std::size_t j = 0; j < rank(); ++j)
        b_(i, j) = frac(b_(i, j));
    level_ = 1;
    for (std::size_t i = 0; i < rank(); ++i) {
      level_ = lcm(level_, q_[i].denominator());
      for (std::size_t j = 0; j < rank(); ++j)
        level_ = lcm(level_, b_(i, j).denominator());
    }
    qn_.resize(rank());
    bn_ = IntMatrix(rank(), rank(), 0);
    for (std::size_t i = 0; i < rank(); ++i) {
      qn_[i] = q_[i].numerator() * (level_ / q_[i].denominator());
      for (std::size_t j = 0; j < rank(); ++j)
        bn_(i, j) = b_(i, j).numerator() * (level_ / b_(i, j).denominator());
    }
  }

  void require_enumerable() const {
    if (order_ > kMaxEnumeratedOrder)
      throw precondition_error("weilrep: |A| = " + std::to_string(order_) +
                               " exceeds the enumeration bound " +
                               std::to_string(kMaxEnumeratedOrder));
  }

private:
  void check_arity(const Element &x) const {
    if (x.size() != rank())
      throw precondition_error("weilrep: element has " +
                               std::to_string(x.size()) +
                               " coordinates, module rank is " +
                               std::to_string(rank()));
  }

  void validate() const {
    const std::size_t r = rank();
    for (std::size_t i = 0; i < r; ++i) {
      if (orders_[i] < 2)
        throw precondition_error("weilrep: generator orders must exceed 1");
      if (!is_integer(q_[i] * Rational(orders_[i] * orders_[i])))
        throw precondition_error("weilrep: Q not well defined on generator " +
                                 std::to_string(i));
      if (frac(Rational(2) * q_[i]) != b_(i, i))
        throw precondition_error(
            "weilrep: (g_i, g_i) must equal 2 Q(g_i) mod 1");
      for (std::size_t j = 0; j < r; ++j) {
        if (b_(i, j) != b_(j, i))
          throw precondition_error("weilrep: bilinear form not symmetric");
        if (!is_integer(b_(i, j) * Rational(orders_[i])))
          throw precondition_error("weilrep: bilinear form not well defined");
      }
    }
    if (r == 0)
      return;
    // |image of x -> (x, .)| = |A| iff non-degenerate. The image is the row
    // lattice of N*b together with N Z^r, taken modulo N Z^r.
    IntMatrix stacked(2 * r, r, 0);
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < r; ++j)
        stacked(i, j) = bn_(i, j);
      stacked(r + i, i) = level_;
    }
    const SmithForm s = smith_normal_form(stacked);
    i64 idx = 1; // [Z^r : lattice]
    for (std::size_t i = 0; i < r; ++i)
      idx = checked_mul(idx, s.D(i, i));
    const i64 image = ipow(level_, static_cast<unsigned>(r)) / idx;
    if (image != order_)
      throw precondition_error("weilrep: bilinear form is degenerate");
  }

  std::vector<i64> orders_;
  std::vector<Rational> q_;
  RationalMatrix b_;
  i64 order_ = 1;
  i64 level_ = 1;
  int signature_ = 0;
  std::vector<i64> qn_;
  IntMatrix bn_;
};

using FQM = FiniteQuadraticModule;

// --- Gram matrices -------------------------------------------------------

/// SNF presentation of L'/L: the dual vector G^{-1} U^{-1} e_i is generator
/// number k for each kept index i = kept[k]; a dual vector v has coordinates
/// (U G v)_{kept[k]} mod d_k.
struct GramPresentation {
  FiniteQuadraticModule module;
  IntMatrix U;
  std::vector<std::size_t> kept;
  RationalMatrix gram_inverse;
};

inline GramPresentation gram_presentation(const IntMatrix &gram) {
  const std::size_t n = gram.rows();
  if (!gram.square())
    throw precondition_error("weilrep: Gram matrix must be square");
  for (std::size_t i = 0; i < n; ++i) {
    if (gram(i, i) % 2 != 0)
      throw precondition_error("weilrep: Gram matrix has odd diagonal entry");
    for (std::size_t j = 0; j < n; ++j)
      if (gram(i, j) != gram(j, i))
        throw precondition_error("weilrep: Gram matrix is not symmetric");
  }
  if (n == 0)
    return {FiniteQuadraticModule{}, IntMatrix{}, {}, RationalMatrix{}};
  if (determinant(gram) == 0)
    throw precondition_error("weilrep: Gram matrix is singular");

  const SmithForm s = smith_normal_form(gram);
  const RationalMatrix ginv = inverse(gram);
  const RationalMatrix uinv = inverse(matrix_cast<i64, Rational>(s.U));
  std::vector<std::size_t> kept;
  std::vector<i64> orders;
  for (std::size_t i = 0; i < n; ++i)
    if (s.D(i, i) > 1) {
      kept.push_back(i);
      orders.push_back(s.D(i, i));
    }
  // w_k = U^{-1} e_{kept[k]}; generator v_k = G^{-1} w_k.
  std::vector<std::vector<Rational>> w;
  for (std::size_t i : kept)
    w.push_back(uinv.col(i));
  const std::size_t r = kept.size();
  auto form = [&](const std::vector<Rational> &x, const std::vector<Rational> &y) {
    Rational acc(0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (ginv(i, j) != Rational(0))
          acc += x[i] * ginv(i, j) * y[j];
    return acc;
  };
  std::vector<Rational> q(r);
  RationalMatrix b(r, r, Rational(0));
  for (std::size_t a = 0; a < r; ++a) {
    q[a] = form(w[a], w[a]) / Rational(2);
    for (std::size_t c = 0; c < r; ++c)
      b(a, c) = form(w[a], w[c]);
  }
  const Inertia in = inertia(gram);
  const int sig = static_cast<int>(in.positive) - static_cast<int>(in.negative);
  return {FiniteQuadraticModule(std::move(orders), std::move(q), std::move(b),
                                sig),
          s.U, std::move(kept), ginv};
}

inline FiniteQuadraticModule FiniteQuadraticModule::from_gram(const IntMatrix &gram) {
  return gram_presentation(gram).module;
}

inline IntMatrix block_diagonal(const IntMatrix &a, const IntMatrix &b) {
  IntMatrix c(a.rows() + b.rows(), a.cols() + b.cols(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      c(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j)
      c(a.rows() + i, a.cols() + j) = b(i, j);
  return c;
}

inline IntMatrix gram_hyperbolic(i64 n) { return IntMatrix{{0, n}, {n, 0}}; }

// --- constructions -------------------------------------------------------

/// Orthogonal direct sum; generators of `a` come first.
inline FiniteQuadraticModule direct_sum(const FiniteQuadraticModule &a,
                                        const FiniteQuadraticModule &b) {
  const std::size_t ra = a.rank(), rb = b.rank();
  std::vector<i64> orders = a.orders();
  orders.insert(orders.end(), b.orders().begin(), b.orders().end());
  std::vector<Rational> q = a.q_values();
  q.insert(q.end(), b.q_values().begin(), b.q_values().end());
  RationalMatrix m(ra + rb, ra + rb, Rational(0));
  for (std::size_t i = 0; i < ra; ++i)
    for (std::size_t j = 0; j < ra; ++j)
      m(i, j) = a.bilinear_matrix()(i, j);
  for (std::size_t i = 0; i < rb; ++i)
    for (std::size_t j = 0; j < rb; ++j)
      m(ra + i, ra + j) = b.bilinear_matrix()(i, j);
  return FiniteQuadraticModule(std::move(orders), std::move(q), std::move(m),
                               a.signature() + b.signature());
}

/// A^- : same group, form -Q.
inline FiniteQuadraticModule negate(const FiniteQuadraticModule &a) {
  std::vector<Rational> q = a.q_values();
  for (auto &v : q)
    v = -v;
  RationalMatrix m = a.bilinear_matrix();
  for (std::size_t i = 0; i < a.rank(); ++i)
    for (std::size_t j = 0; j < a.rank(); ++j)
      m(i, j) = -m(i, j);
  return FiniteQuadraticModule(a.orders(), std::move(q), std::move(m),
                               -a.signature());
}

// --- subgroups -------------------------------------------------------------

class Subgroup {
public:
  Subgroup() = default;

  /// Closure of `gens` in `a`.
  Subgroup(const FiniteQuadraticModule &a, std::vector<Element> gens) {
    a.require_enumerable();
    std::set<std::size_t> seen{a.index(a.zero())};
    std::vector<Element> frontier{a.zero()};
    for (auto &g : gens)
      g = a.reduce(std::move(g));
    while (!frontier.empty()) {
      std::vector<Element> next;
      for (const auto &x : frontier)
        for (const auto &g : gens) {
          Element y = a.add(x, g);
          if (seen.insert(a.index(y)).second)
            next.push_back(std::move(y));
        }
      frontier = std::move(next);
    }
    elements_.assign(seen.begin(), seen.end());
    // minimal generating set, greedy in index order
    std::set<std::size_t> span{a.index(a.zero())};
    for (const auto &g : gens) {
      if (span.count(a.index(g)))
        continue;
      generators_.push_back(g);
      span = Subgroup::closure_indices(a, generators_);
    }
  }

  const std::vector<Element> &generators() const noexcept { return generators_; }
  /// Sorted element indices.
  const std::vector<std::size_t> &indices() const noexcept { return elements_; }
  i64 order() const noexcept { return static_cast<i64>(elements_.size()); }
  bool contains(std::size_t idx) const {
    return std::binary_search(elements_.begin(), elements_.end(), idx);
  }
  bool contains(const FiniteQuadraticModule &a, const Element &x) const {
    return contains(a.index(x));
  }

  friend bool operator==(const Subgroup &x, const Subgroup &y) {
    return x.elements_ == y.elements_;
  }
  friend bool operator<(const Subgroup &x, const Subgroup &y) {
    return x.elements_ < y.elements_;
  }

private:
  static std::set<std::size_t> closure_indices(const FiniteQuadraticModule &a,
                                               const std::vector<Element> &gens) {
    std::set<std::size_t> seen{a.index(a.zero())};
    std::vector<Element> frontier{a.zero()};
    while (!frontier.empty()) {
      std::vector<Element> next;
      for (const auto &x : frontier)
        for (const auto &g : gens) {
          Element y = a.add(x, g);
          if (seen.insert(a.index(y)).second)
            next.push_back(std::move(y));
        }
      frontier = std::move(next);
    }
    return seen;
  }

  std::vector<Element> generators_;
  std::vector<std::size_t> elements_;
};

inline Subgroup trivial_subgroup(const FiniteQuadraticModule &a) {
  return Subgroup(a, {});
}

inline bool is_isotropic(const FiniteQuadraticModule &a, const Subgroup &h) {
  for (const auto &g : h.generators()) {
    if (a.q_num(g) != 0)
      return false;
    for (const auto &g2 : h.generators())
      if (a.b_num(g, g2) != 0)
        return false;
  }
  return true;
}

/// H^perp = {x : (x, h) = 0 for all h in H}.
inline Subgroup orthogonal_complement(const FiniteQuadraticModule &a,
                                      const Subgroup &h) {
  a.require_enumerable();
  std::vector<Element> members;
  for (std::size_t i = 0; i < static_cast<std::size_t>(a.order()); ++i) {
    const Element x = a.element(i);
    bool ok = true;
    for (const auto &g : h.generators())
      if (a.b_num(x, g) != 0) {
        ok = false;
        break;
      }
    if (ok)
      members.push_back(x);
  }
  return Subgroup(a, std::move(members));
}

/// All totally isotropic subgroups of the given order, sorted by their
/// element-index sets (lexicographic in generator coordinates).
inline std::vector<Subgroup> isotropic_subgroups(const FiniteQuadraticModule &a,
                                                 i64 order) {
  if (order < 1 || a.order() % order != 0)
    throw precondition_error("weilrep: subgroup order must divide |A|");
  a.require_enumerable();
  std::vector<Element> iso;
  for (std::size_t i = 1; i < static_cast<std::size_t>(a.order()); ++i) {
    Element x = a.element(i);
    if (a.q_num(x) == 0 && order % a.element_order(x) == 0)
      iso.push_back(std::move(x));
  }
  std::set<Subgroup> found;
  std::set<std::vector<std::size_t>> visited;
  std::vector<Subgroup> frontier{trivial_subgroup(a)};
  visited.insert(frontier[0].indices());
  while (!frontier.empty()) {
    std::vector<Subgroup> next;
    for (const auto &h : frontier) {
      if (h.order() == order) {
        found.insert(h);
        continue;
      }
      for (const auto &x : iso) {
        if (h.contains(a, x))
          continue;
        bool orth = true;
        for (const auto &g : h.generators())
          if (a.b_num(x, g) != 0) {
            orth = false;
            break;
          }
        if (!orth)
          continue;
        std::vector<Element> gens = h.generators();
        gens.push_back(x);
        Subgroup bigger(a, std::move(gens));
        if (order % bigger.order() != 0)
          continue;
        if (visited.insert(bigger.indices()).second)
          next.push_back(std::move(bigger));
      }
    }
    frontier = std::move(next);
  }
  return {found.begin(), found.end()};
}

// --- subquotients ----------------------------------------------------------

/// B = H^perp / H with index maps. projection[i] is the B-index of A-element
/// i, or -1 when i is not in H^perp; section[j] is an A-index lifting j.
struct Subquotient {
  FiniteQuadraticModule module;
  std::vector<long> projection;
  std::vector<std::size_t> section;
};

inline Subquotient subquotient(const FiniteQuadraticModule &a, const Subgroup &h) {
  if (!is_isotropic(a, h))
    throw precondition_error("weilrep: subquotient needs an isotropic subgroup");
  const std::size_t r = a.rank();
  const Subgroup perp = orthogonal_complement(a, h);

  std::vector<IntVector> diag;
  for (std::size_t i = 0; i < r; ++i) {
    IntVector v(r, 0);
    v[i] = a.orders()[i];
    diag.push_back(std::move(v));
  }
  std::vector<IntVector> pg = diag, hg = diag;
  for (const auto &g : perp.generators())
    pg.push_back(g);
  for (const auto &g : h.generators())
    hg.push_back(g);
  const std::vector<IntVector> pb = lattice_basis(pg, r);

  // relations: H-lattice generators in P-coordinates
  IntMatrix rel(hg.size(), pb.size(), 0);
  for (std::size_t i = 0; i < hg.size(); ++i) {
    const auto c = coordinates_in_basis(pb, hg[i]);
    if (!c)
      throw consistency_error("weilrep: H is not inside H^perp");
    for (std::size_t j = 0; j < pb.size(); ++j)
      rel(i, j) = (*c)[j];
  }
  const SmithForm s = smith_normal_form(rel);
  const std::size_t n = pb.size();
  const RationalMatrix vinv_r = inverse(matrix_cast<i64, Rational>(s.V));

  // new basis rows of V^{-1} * Pb
  std::vector<Element> gens;
  std::vector<i64> orders;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i) {
    const i64 d = i < std::min(rel.rows(), n) ? s.D(i, i) : 0;
    if (d == 1)
      continue;
    if (d == 0)
      throw consistency_error("weilrep: subquotient is infinite");
    IntVector row(r, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const Rational c = vinv_r(i, k);
      if (!is_integer(c))
        throw consistency_error("weilrep: SNF transform not unimodular");
      for (std::size_t j = 0; j < r; ++j)
        row[j] = checked_add(row[j], checked_mul(c.numerator(), pb[k][j]));
    }
    gens.push_back(a.reduce(row));
    orders.push_back(d);
    kept.push_back(i);
  }
  const std::size_t rb = gens.size();
  std::vector<Rational> q(rb);
  RationalMatrix bm(rb, rb, Rational(0));
  for (std::size_t i = 0; i < rb; ++i) {
    q[i] = a.Q(gens[i]);
    for (std::size_t j = 0; j < rb; ++j)
      bm(i, j) = a.B(gens[i], gens[j]);
  }
  FiniteQuadraticModule b(orders, std::move(q), std::move(bm), a.signature());

  Subquotient out{b, std::vector<long>(static_cast<std::size_t>(a.order()), -1),
                  std::vector<std::size_t>(static_cast<std::size_t>(b.order()))};
  for (std::size_t idx : perp.indices()) {
    const auto c = coordinates_in_basis(pb, a.element(idx));
    if (!c)
      throw consistency_error("weilrep: H^perp element outside its lattice");
    Element z(rb);
    for (std::size_t k = 0; k < rb; ++k) {
      i64 v = 0;
      for (std::size_t j = 0; j < n; ++j)
        v = checked_add(v, checked_mul((*c)[j], s.V(j, kept[k])));
      z[k] = mod(v, orders[k]);
    }
    out.projection[idx] = static_cast<long>(b.index(z));
  }
  for (std::size_t j = 0; j < static_cast<std::size_t>(b.order()); ++j) {
    const Element z = b.element(j);
    Element x = a.zero();
    for (std::size_t k = 0; k < rb; ++k)
      x = a.add(x, a.scale(z[k], gens[k]));
    out.section[j] = a.index(x);
  }
  return out;
}

// --- content filtration ----------------------------------------------------

/// cont_e(lambda) = gcd(N (e, lambda), N) for isotropic e of exact order N.
inline i64 content(const FiniteQuadraticModule &a, const Element &e,
                   const Element &lambda) {
  const i64 n = a.element_order(e);
  if (a.q_num(e) != 0)
    throw precondition_error("weilrep: content needs an isotropic e");
  const Rational pairing = a.B(e, lambda);
  const i64 v = mod(pairing.numerator() * (n / pairing.denominator()), n);
  return v == 0 ? n : gcd(v, n);
}

/// I_d = <(N/d) e>.
inline Subgroup cyclic_Id(const FiniteQuadraticModule &a, const Element &e,
                          i64 d) {
  const i64 n = a.element_order(e);
  if (a.q_num(e) != 0)
    throw precondition_error("weilrep: I_d needs an isotropic e");
  if (d < 1 || n % d != 0)
    throw precondition_error("weilrep: d must divide the order of e");
  return Subgroup(a, {a.scale(n / d, e)});
}

// --- automorphisms ---------------------------------------------------------

/// A permutation of the element indices; image[i] = index of h(x_i).
struct Automorphism {
  std::vector<std::size_t> image;
};

inline bool preserves_form(const FiniteQuadraticModule &a, const Automorphism &h) {
  if (h.image.size() != static_cast<std::size_t>(a.order()))
    return false;
  std::vector<bool> hit(h.image.size(), false);
  for (std::size_t i = 0; i < h.image.size(); ++i) {
    if (h.image[i] >= hit.size() || hit[h.image[i]])
      return false;
    hit[h.image[i]] = true;
    if (a.q_num(a.element(i)) != a.q_num(a.element(h.image[i])))
      return false;
  }
  // additivity on generator pairs is implied by Q-preservation only for
  // homomorphisms; check it directly
  for (std::size_t i = 0; i < h.image.size(); ++i)
    for (std::size_t g = 0; g < a.rank(); ++g) {
      Element e = a.zero();
      e[g] = 1;
      const std::size_t j = a.index(a.add(a.element(i), e));
      const Element lhs = a.element(h.image[j]);
      const Element rhs =
          a.add(a.element(h.image[i]), a.element(h.image[a.index(e)]));
      if (lhs != rhs)
        return false;
    }
  return true;
}

inline Automorphism identity_automorphism(const FiniteQuadraticModule &a) {
  Automorphism h;
  h.image.resize(static_cast<std::size_t>(a.order()));
  for (std::size_t i = 0; i < h.image.size(); ++i)
    h.image[i] = i;
  return h;
}

inline Automorphism negation(const FiniteQuadraticModule &a) {
  Automorphism h;
  h.image.resize(static_cast<std::size_t>(a.order()));
  for (std::size_t i = 0; i < h.image.size(); ++i)
    h.image[i] = a.index(a.neg(a.element(i)));
  return h;
}

/// x -> u x; an automorphism when u is a unit with Q(u x) = Q(x).
inline std::optional<Automorphism> unit_scaling(const FiniteQuadraticModule &a, i64 u) {
  Automorphism h;
  h.image.resize(static_cast<std::size_t>(a.order()));
  for (std::size_t i = 0; i < h.image.size(); ++i)
    h.image[i] = a.index(a.scale(u, a.element(i)));
  if (!preserves_form(a, h))
    return std::nullopt;
  return h;
}

/// phi_r on the U(N) factor occupying coordinates (offset, offset + 1):
/// (a, b) -> (r a, r^* b), identity on the other coordinates.
inline Automorphism phi_r(const FiniteQuadraticModule &a, std::size_t offset,
                          i64 r) {
  if (offset + 2 > a.rank())
    throw precondition_error("weilrep: no U(N) factor at that offset");
  const i64 n = a.orders()[offset];
  if (a.orders()[offset + 1] != n || a.q_values()[offset] != Rational(0) ||
      a.q_values()[offset + 1] != Rational(0) ||
      a.bilinear_matrix()(offset, offset + 1) != Rational(1, n))
    throw precondition_error("weilrep: coordinates do not form a U(N) factor");
  for (std::size_t j = 0; j < a.rank(); ++j)
    if (j != offset && j != offset + 1 &&
        (a.bilinear_matrix()(offset, j) != Rational(0) ||
         a.bilinear_matrix()(offset + 1, j) != Rational(0)))
      throw precondition_error("weilrep: U(N) factor is not orthogonal");
  if (gcd(mod(r, n), n) != 1)
    throw precondition_error("weilrep: r must be invertible modulo N");
  const i64 rstar = inverse_mod(r, n);
  Automorphism h;
  h.image.resize(static_cast<std::size_t>(a.order()));
  for (std::size_t i = 0; i < h.image.size(); ++i) {
    Element x = a.element(i);
    x[offset] = mod(checked_mul(x[offset], mod(r, n)), n);
    x[offset + 1] = mod(checked_mul(x[offset + 1], rstar), n);
    h.image[i] = a.index(x);
  }
  return h;
}

// --- prime level: matrix model and normal forms --------------------------

/// M'/M for M = U(p) + U(p) as 2x2 matrices X/p with Q(X/p) = det(X)/p.
/// Generators E11/p, E12/p, E21/p, E22/p.
inline FiniteQuadraticModule matrix_model(i64 p) {
  if (!is_prime(p))
    throw precondition_error("weilrep: matrix model needs a prime p");
  RationalMatrix b(4, 4, Rational(0));
  b(0, 3) = b(3, 0) = Rational(1, p);
  b(1, 2) = b(2, 1) = Rational(-1, p);
  return FiniteQuadraticModule({p, p, p, p}, std::vector<Rational>(4, Rational(0)),
                               std::move(b), 0);
}

/// Normal form of mu in A = D'/D + M'/M where the last four coordinates are
/// the matrix model: 0 for mu = 0, else D-part 0 and X = [[1, 0], [0, j]]
/// with Q(mu) = j/p.
inline Element normal_form(const FiniteQuadraticModule &a, const Element &mu) {
  if (a.rank() < 4 || !is_prime(a.level()))
    throw precondition_error("weilrep: normal form needs prime level");
  const i64 p = a.level();
  for (i64 d : a.orders())
    if (d != p)
      throw precondition_error("weilrep: normal form needs an F_p-module");
  const std::size_t off = a.rank() - 4;
  const FiniteQuadraticModule m = matrix_model(p);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      if (a.bilinear_matrix()(off + i, off + j) != m.bilinear_matrix()(i, j))
        throw precondition_error("weilrep: last coordinates are not M'/M");
  for (std::size_t i = 0; i < 4; ++i) {
    if (a.q_values()[off + i] != Rational(0))
      throw precondition_error("weilrep: last coordinates are not M'/M");
    for (std::size_t j = 0; j < off; ++j)
      if (a.bilinear_matrix()(off + i, j) != Rational(0))
        throw precondition_error("weilrep: M'/M is not an orthogonal summand");
  }
  if (a.is_zero(mu))
    return a.zero();
  Element out = a.zero();
  out[off] = 1;
  out[off + 3] = a.q_num(mu) * (p / a.level());
  return out;
}

} // namespace weilrep
