#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <numeric>

#include "support.hpp"

using namespace weilrep;
using testing_support::random_even_gram;

namespace {

// Leibniz expansion, independent of the Bareiss code
i64 leibniz_det(const IntMatrix &a) {
  const std::size_t n = a.rows();
  std::vector<std::size_t> p(n);
  std::iota(p.begin(), p.end(), 0);
  i64 total = 0;
  do {
    i64 term = 1;
    for (std::size_t i = 0; i < n; ++i)
      term *= a(i, p[i]);
    int inv = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        inv += p[i] > p[j];
    total += inv % 2 ? -term : term;
  } while (std::next_permutation(p.begin(), p.end()));
  return total;
}

IntMatrix random_matrix(std::mt19937 &rng, std::size_t m, std::size_t n, int r) {
  std::uniform_int_distribution<int> d(-r, r);
  IntMatrix a(m, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      a(i, j) = d(rng);
  return a;
}

} // namespace

TEST(Arith, GcdLcmAndFactorisation) {
  EXPECT_EQ(lcm(4, 6), 12);
  EXPECT_EQ(mod(-7, 5), 3);
  EXPECT_EQ(moebius(30), -1);
  EXPECT_EQ(moebius(12), 0);
  EXPECT_EQ(big_omega(12), 3);
  EXPECT_EQ(euler_phi(36), 12);
  EXPECT_EQ(inverse_mod(3, 7), 5);
  for (i64 n = 1; n < 300; ++n) {
    i64 prod = 1;
    for (auto [p, e] : factorize(n)) {
      EXPECT_TRUE(is_prime(p));
      prod *= ipow(p, static_cast<unsigned>(e));
    }
    EXPECT_EQ(prod, n);
  }
}

TEST(Arith, OverflowIsReported) {
  EXPECT_THROW(checked_mul(i64{1} << 40, i64{1} << 40), std::overflow_error);
}

TEST(Rationals, ParseAndPrint) {
  EXPECT_EQ(parse_rational("-6/4"), Rational(-3, 2));
  EXPECT_EQ(to_string(Rational(5, 2)), "5/2");
  EXPECT_EQ(to_string(Rational(4)), "4");
  EXPECT_EQ(frac(Rational(-1, 3)), Rational(2, 3));
  EXPECT_EQ(floor(Rational(-1, 3)), -1);
  EXPECT_THROW(parse_rational("1/0"), precondition_error);
  EXPECT_THROW(parse_rational("x"), precondition_error);
}

TEST(IntMatrix, DeterminantMatchesLeibniz) {
  std::mt19937 rng(11);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + t % 5;
    const IntMatrix a = random_matrix(rng, n, n, 4);
    EXPECT_EQ(determinant(a), leibniz_det(a));
  }
}

TEST(IntMatrix, SmithFormIsAValidDecomposition) {
  std::mt19937 rng(3);
  for (int t = 0; t < 150; ++t) {
    const std::size_t m = 1 + t % 4, n = 1 + (t / 4) % 4;
    const IntMatrix a = random_matrix(rng, m, n, 6);
    const SmithForm s = smith_normal_form(a);
    EXPECT_EQ(multiply(multiply(s.U, a), s.V), s.D);
    EXPECT_EQ(std::llabs(determinant(s.U)), 1);
    EXPECT_EQ(std::llabs(determinant(s.V)), 1);
    for (std::size_t i = 0; i < std::min(m, n); ++i) {
      EXPECT_GE(s.D(i, i), 0);
      if (i + 1 < std::min(m, n) && s.D(i, i) != 0) {
        EXPECT_EQ(s.D(i + 1, i + 1) % s.D(i, i), 0);
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) {
          EXPECT_EQ(s.D(i, j), 0);
        }
      }
    }
    if (m == n) {
      i64 prod = 1;
      for (std::size_t i = 0; i < n; ++i)
        prod *= s.D(i, i);
      EXPECT_EQ(prod, std::llabs(leibniz_det(a)));
    }
  }
}

TEST(IntMatrix, KernelAndInverse) {
  std::mt19937 rng(5);
  for (int t = 0; t < 80; ++t) {
    const IntMatrix c = random_matrix(rng, 2, 5, 5);
    const IntMatrix k = integer_kernel(c);
    const IntMatrix ck = multiply(c, k);
    for (i64 v : ck.data())
      EXPECT_EQ(v, 0);
    // saturated: the kernel basis extends to a unimodular matrix iff its
    // maximal minors are coprime; check the Smith form of k instead
    const SmithForm s = smith_normal_form(k);
    for (std::size_t i = 0; i < k.cols(); ++i)
      EXPECT_EQ(s.D(i, i), 1);
    const IntMatrix sq = random_matrix(rng, 3, 3, 5);
    if (determinant(sq) != 0) {
      const RationalMatrix inv = inverse(sq);
      EXPECT_EQ((matrix_cast<i64, Rational>(sq) * inv), RationalMatrix::identity(3, Rational(1)));
    }
  }
}

TEST(IntMatrix, LatticeBasisCoordinates) {
  std::vector<IntVector> gens{{2, 4, 6}, {0, 3, 3}, {2, 7, 9}};
  const auto basis = lattice_basis(gens, 3);
  EXPECT_EQ(basis.size(), 2u);
  for (const auto &g : gens)
    EXPECT_TRUE(coordinates_in_basis(basis, g).has_value());
  EXPECT_FALSE(coordinates_in_basis(basis, {1, 0, 0}).has_value());
}

TEST(IntMatrix, InertiaMatchesEigenvalues) {
  std::mt19937 rng(17);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 1 + t % 6;
    const IntMatrix g = random_even_gram(rng, n, 5000);
    Eigen::MatrixXd m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        m(i, j) = static_cast<double>(g(i, j));
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
      (ev(i) > 0 ? pos : neg)++;
    const Inertia in = inertia(g);
    EXPECT_EQ(in.positive, pos);
    EXPECT_EQ(in.negative, neg);
    EXPECT_EQ(in.zero, 0);
  }
}
