#pragma once

#include <complex>
#include <random>
#include <set>
#include <vector>

#include "weilrep/weilrep.hpp"

namespace testing_support {

using namespace weilrep;

/// Symmetric integer matrix with even diagonal, nonzero determinant and
/// |det| <= max_det. Deterministic for a given rng state.
inline IntMatrix random_even_gram(std::mt19937 &rng, std::size_t rank, i64 max_det) {
  std::uniform_int_distribution<int> off(-2, 2), diag(-3, 3), coin(0, 2);
  while (true) {
    IntMatrix g(rank, rank);
    for (std::size_t i = 0; i < rank; ++i) {
      int d = diag(rng);
      if (d == 0)
        d = 1;
      g(i, i) = 2 * d;
      for (std::size_t j = 0; j < i; ++j)
        g(i, j) = g(j, i) = coin(rng) == 0 ? off(rng) : 0;
    }
    const i64 det = determinant(g);
    if (det != 0 && std::abs(det) <= max_det)
      return g;
  }
}

/// exp(2 pi i x), numerically.
inline std::complex<double> e(double x) { return std::polar(1.0, 2 * M_PI * x); }

inline double as_double(const Rational &q) { return boost::rational_cast<double>(q); }

/// Every element of L'/L as a vector of G^{-1} Z^n mod Z^n: closure of the
/// columns of G^{-1} under addition, by breadth-first search.
inline std::vector<std::vector<Rational>> dual_classes(const IntMatrix &g) {
  const std::size_t n = g.rows();
  const RationalMatrix ginv = inverse(g);
  std::vector<std::vector<Rational>> out{std::vector<Rational>(n, Rational(0))};
  std::set<std::vector<Rational>> seen{out.front()};
  for (std::size_t head = 0; head < out.size(); ++head)
    for (std::size_t j = 0; j < n; ++j) {
      std::vector<Rational> v = out[head];
      for (std::size_t i = 0; i < n; ++i)
        v[i] = frac(v[i] + ginv(i, j));
      if (seen.insert(v).second)
        out.push_back(std::move(v));
    }
  return out;
}

inline Rational quad(const IntMatrix &g, const std::vector<Rational> &v) {
  Rational s(0);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      s += v[i] * Rational(g(i, j)) * v[j];
  return s / Rational(2);
}

} // namespace testing_support
