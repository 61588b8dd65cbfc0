#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "support.hpp"

using namespace weilrep;
using testing_support::dual_classes;
using testing_support::quad;
using testing_support::random_even_gram;

namespace {

std::multiset<Rational> q_multiset(const FiniteQuadraticModule &a) {
  std::multiset<Rational> out;
  for (const auto &x : a.elements())
    out.insert(a.Q(x));
  return out;
}

} // namespace

TEST(Fqm, HyperbolicPlaneDiscriminant) {
  const auto a = FiniteQuadraticModule::from_gram(gram_hyperbolic(5));
  EXPECT_EQ(a.orders(), (std::vector<i64>{5, 5}));
  EXPECT_EQ(a.level(), 5);
  EXPECT_EQ(a.signature(), 0);
  EXPECT_TRUE(FiniteQuadraticModule::from_gram(gram_hyperbolic(1)).is_trivial());
  EXPECT_EQ(q_multiset(a), q_multiset(FiniteQuadraticModule::hyperbolic(5)));
}

TEST(Fqm, RankOneLattices) {
  const auto a = FiniteQuadraticModule::from_gram(IntMatrix{{2}});
  EXPECT_EQ(a.order(), 2);
  EXPECT_EQ(a.Q({1}), Rational(1, 4));
  EXPECT_EQ(a.signature(), 1);
  const auto b = FiniteQuadraticModule::from_gram(IntMatrix{{-2}});
  EXPECT_EQ(b.signature(), 7);
  // Z(2) + U(N) + U: Gram determinant 4 N^2
  const auto c = FiniteQuadraticModule::from_gram(
      block_diagonal(block_diagonal(IntMatrix{{4}}, gram_hyperbolic(6)), gram_hyperbolic(1)));
  EXPECT_EQ(c.order(), 4 * 36);
  EXPECT_EQ(c.level(), 24);
}

TEST(Fqm, DiscriminantMatchesBruteForceClasses) {
  std::mt19937 rng(41);
  for (int t = 0; t < 40; ++t) {
    const IntMatrix g = random_even_gram(rng, 1 + t % 4, 300);
    const auto a = FiniteQuadraticModule::from_gram(g);
    const auto classes = dual_classes(g);
    ASSERT_EQ(static_cast<i64>(classes.size()), a.order());
    EXPECT_EQ(a.order(), std::llabs(determinant(g)));
    std::multiset<Rational> brute;
    for (const auto &v : classes)
      brute.insert(frac(quad(g, v)));
    EXPECT_EQ(brute, q_multiset(a));
  }
}

TEST(Fqm, MilgramSignatureMatchesInertia) {
  std::mt19937 rng(43);
  for (int t = 0; t < 60; ++t) {
    const IntMatrix g = random_even_gram(rng, 1 + t % 6, 1000);
    const auto a = FiniteQuadraticModule::from_gram(g);
    const Inertia in = inertia(g);
    EXPECT_EQ(a.milgram_signature(), mod(in.positive - in.negative, 8));
    // |G(1)|^2 = |A|
    const CyclotomicNumber gs = a.gauss_sum(1);
    EXPECT_EQ(gs * gs.conj(), CyclotomicNumber(a.order()));
  }
}

TEST(Fqm, GramValidation) {
  EXPECT_THROW(FiniteQuadraticModule::from_gram(IntMatrix{{1}}), precondition_error);
  EXPECT_TRUE(FiniteQuadraticModule::from_gram(IntMatrix{{2, 1}, {1, 0}}).is_trivial());
  EXPECT_THROW(FiniteQuadraticModule::from_gram(IntMatrix{{2, 2}, {2, 2}}), precondition_error);
  EXPECT_THROW(FiniteQuadraticModule::from_gram(IntMatrix{{2, 1}, {0, 2}}), precondition_error);
}

TEST(Fqm, FromGeneratorsRejectsBadData) {
  RationalMatrix b(1, 1, Rational(1, 3));
  // Q(g) = 1/3 is incompatible with 2Q(g) = B(g, g) = 1/3 mod 1
  EXPECT_THROW(FiniteQuadraticModule::from_generators({3}, {Rational(1, 3)}, b), precondition_error);
  RationalMatrix b2(1, 1, Rational(2, 3));
  const auto a = FiniteQuadraticModule::from_generators({3}, {Rational(1, 3)}, b2);
  EXPECT_EQ(a.order(), 3);
  RationalMatrix zero(1, 1, Rational(0));
  EXPECT_THROW(FiniteQuadraticModule::from_generators({3}, {Rational(0)}, zero), precondition_error);
}

TEST(Fqm, DirectSumAndNegation) {
  const auto a = FiniteQuadraticModule::from_gram(IntMatrix{{2}});
  const auto b = FiniteQuadraticModule::hyperbolic(3);
  const auto s = direct_sum(a, b);
  EXPECT_EQ(s.order(), 18);
  EXPECT_EQ(s.signature(), mod(a.signature() + b.signature(), 8));
  EXPECT_EQ(negate(a).signature(), mod(-a.signature(), 8));
  const auto c = FiniteQuadraticModule::from_gram(block_diagonal(IntMatrix{{2}}, gram_hyperbolic(3)));
  EXPECT_EQ(q_multiset(s), q_multiset(c));
}

TEST(Fqm, IsotropicLinesOfScaledHyperbolicPlane) {
  for (i64 p : {2, 3, 5, 7, 11}) {
    const auto a = FiniteQuadraticModule::hyperbolic(p);
    // brute force: nonzero isotropic vectors, grouped into lines
    std::set<std::set<std::size_t>> lines;
    for (const auto &x : a.elements()) {
      if (a.is_zero(x) || a.q_num(x) != 0)
        continue;
      std::set<std::size_t> line;
      for (i64 c = 0; c < p; ++c)
        line.insert(a.index(a.scale(c, x)));
      lines.insert(line);
    }
    EXPECT_EQ(lines.size(), 2u) << p;
    EXPECT_EQ(isotropic_subgroups(a, p).size(), lines.size()) << p;
  }
}

TEST(Fqm, IsotropicSubgroupsMatchBruteForce) {
  // all subgroups of order 2 and 4 in Z/4 + (Z/2)^2 style modules
  for (const IntMatrix &g : {block_diagonal(gram_hyperbolic(2), gram_hyperbolic(2)),
                            block_diagonal(IntMatrix{{4}}, gram_hyperbolic(4))}) {
    const auto a = FiniteQuadraticModule::from_gram(g);
    for (i64 ord : {2, 4}) {
      std::set<std::vector<std::size_t>> brute;
      const auto el = a.elements();
      // enumerate subgroups generated by at most two elements
      for (std::size_t i = 0; i < el.size(); ++i)
        for (std::size_t j = i; j < el.size(); ++j) {
          Subgroup h(a, {el[i], el[j]});
          if (h.order() == ord && is_isotropic(a, h))
            brute.insert(h.indices());
        }
      std::set<std::vector<std::size_t>> lib;
      for (const auto &h : isotropic_subgroups(a, ord))
        lib.insert(h.indices());
      EXPECT_EQ(lib, brute) << "order " << ord;
    }
  }
}

TEST(Fqm, OrthogonalComplementAndSubquotient) {
  const auto a = FiniteQuadraticModule::hyperbolic(12);
  for (i64 d : divisors(12)) {
    const Subgroup h = cyclic_Id(a, {1, 0}, d);
    EXPECT_EQ(h.order(), d);
    ASSERT_TRUE(is_isotropic(a, h));
    const Subgroup perp = orthogonal_complement(a, h);
    EXPECT_EQ(perp.order(), a.order() / d);
    // brute force H^perp
    std::size_t count = 0;
    for (const auto &x : a.elements()) {
      bool orth = true;
      for (std::size_t i : h.indices())
        orth = orth && frac(a.B(x, a.element(i))) == Rational(0);
      count += orth;
      EXPECT_EQ(orth, perp.contains(a.index(x)));
    }
    EXPECT_EQ(static_cast<i64>(count), perp.order());
    const Subquotient sq = subquotient(a, h);
    EXPECT_EQ(sq.module.order(), a.order() / (d * d));
    // the projection respects Q
    for (std::size_t i = 0; i < sq.projection.size(); ++i)
      if (sq.projection[i] >= 0) {
        EXPECT_EQ(sq.module.Q(sq.module.element(static_cast<std::size_t>(sq.projection[i]))),
                  a.Q(a.element(i)));
      }
  }
}

TEST(Fqm, ContentOfHyperbolicElements) {
  const i64 n = 12;
  const auto a = FiniteQuadraticModule::hyperbolic(n);
  for (const auto &x : a.elements()) {
    // (e, x) = x_2 / N for e = (1, 0)
    const i64 want = x[1] == 0 ? n : gcd(x[1], n);
    EXPECT_EQ(content(a, {1, 0}, x), want);
  }
}

TEST(Fqm, AutomorphismsPreserveTheForm) {
  const auto a = FiniteQuadraticModule::hyperbolic(7);
  EXPECT_TRUE(preserves_form(a, negation(a)));
  for (i64 r = 1; r < 7; ++r)
    EXPECT_TRUE(preserves_form(a, phi_r(a, 0, r)));
  Automorphism swap_first = identity_automorphism(a);
  std::swap(swap_first.image[1], swap_first.image[2]);
  EXPECT_FALSE(preserves_form(a, swap_first));
}

TEST(Fqm, MatrixModelNormalForm) {
  const i64 p = 5;
  const auto m = matrix_model(p);
  EXPECT_EQ(m.order(), 625);
  EXPECT_EQ(m.signature(), 0);
  // Q(X/p) = det(X)/p
  for (const auto &x : m.elements())
    EXPECT_EQ(m.Q(x), frac(Rational(x[0] * x[3] - x[1] * x[2], p)));
  for (const auto &x : m.elements()) {
    const Element nf = normal_form(m, x);
    EXPECT_EQ(m.Q(nf), m.Q(x));
    if (!m.is_zero(x)) {
      EXPECT_EQ(nf[0], 1);
      EXPECT_EQ(nf[1], 0);
      EXPECT_EQ(nf[2], 0);
    }
  }
}

TEST(Fqm, EnumerationCap) {
  const auto a = FiniteQuadraticModule::hyperbolic(200);
  EXPECT_THROW(a.elements(), precondition_error);
}
