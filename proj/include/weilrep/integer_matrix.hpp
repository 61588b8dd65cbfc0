#pragma once

#include <cstdlib>
#include <optional>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "matrix.hpp"
#include "rational.hpp"

namespace weilrep {

using IntMatrix = Matrix<i64>;
using RationalMatrix = Matrix<Rational>;
using IntVector = std::vector<i64>;

inline IntMatrix multiply(const IntMatrix &a, const IntMatrix &b) {
  if (a.cols() != b.rows())
    throw precondition_error("weilrep: matrix shape mismatch");
  IntMatrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      i64 s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k)
        s = checked_add(s, checked_mul(a(i, k), b(k, j)));
      c(i, j) = s;
    }
  return c;
}

inline IntVector multiply(const IntMatrix &a, const IntVector &x) {
  IntVector y(a.rows(), 0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k)
      y[i] = checked_add(y[i], checked_mul(a(i, k), x[k]));
  return y;
}

inline i64 dot(const IntVector &a, const IntVector &b) {
  i64 s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s = checked_add(s, checked_mul(a[i], b[i]));
  return s;
}

inline i64 content_gcd(const IntVector &v) {
  i64 g = 0;
  for (i64 x : v)
    g = gcd(g, x);
  return g;
}

/// Fraction-free Bareiss determinant.
inline i64 determinant(IntMatrix a) {
  if (!a.square())
    throw precondition_error("weilrep: determinant of non-square matrix");
  const std::size_t n = a.rows();
  if (n == 0)
    return 1;
  i64 sign = 1, prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && a(swap_row, k) == 0)
        ++swap_row;
      if (swap_row == n)
        return 0;
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a(k, j), a(swap_row, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        const __int128 v = static_cast<__int128>(a(i, j)) * a(k, k) -
                           static_cast<__int128>(a(i, k)) * a(k, j);
        const __int128 q = v / prev;
        if (q > std::numeric_limits<i64>::max() ||
            q < std::numeric_limits<i64>::min())
          throw std::overflow_error("weilrep: determinant overflow");
        a(i, j) = static_cast<i64>(q);
      }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

/// U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ...,
/// all diagonal entries non-negative.
struct SmithForm {
  IntMatrix U;
  IntMatrix D;
  IntMatrix V;
  std::size_t rank = 0;
};

inline SmithForm smith_normal_form(const IntMatrix &input) {
  const std::size_t m = input.rows(), n = input.cols();
  IntMatrix a = input;
  IntMatrix U = IntMatrix::identity(m), V = IntMatrix::identity(n);

  auto swap_rows = [&](std::size_t r1, std::size_t r2) {
    if (r1 == r2)
      return;
    for (std::size_t j = 0; j < n; ++j)
      std::swap(a(r1, j), a(r2, j));
    for (std::size_t j = 0; j < m; ++j)
      std::swap(U(r1, j), U(r2, j));
  };
  auto swap_cols = [&](std::size_t c1, std::size_t c2) {
    if (c1 == c2)
      return;
    for (std::size_t i = 0; i < m; ++i)
      std::swap(a(i, c1), a(i, c2));
    for (std::size_t i = 0; i < n; ++i)
      std::swap(V(i, c1), V(i, c2));
  };
  // row_dst += q * row_src
  auto add_row = [&](std::size_t dst, std::size_t src, i64 q) {
    for (std::size_t j = 0; j < n; ++j)
      a(dst, j) = checked_add(a(dst, j), checked_mul(q, a(src, j)));
    for (std::size_t j = 0; j < m; ++j)
      U(dst, j) = checked_add(U(dst, j), checked_mul(q, U(src, j)));
  };
  auto add_col = [&](std::size_t dst, std::size_t src, i64 q) {
    for (std::size_t i = 0; i < m; ++i)
      a(i, dst) = checked_add(a(i, dst), checked_mul(q, a(i, src)));
    for (std::size_t i = 0; i < n; ++i)
      V(i, dst) = checked_add(V(i, dst), checked_mul(q, V(i, src)));
  };

  std::size_t t = 0;
  for (; t < std::min(m, n); ++t) {
    bool found_any = true;
    while (true) {
      std::size_t pi = m, pj = n;
      i64 best = 0;
      for (std::size_t i = t; i < m; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (a(i, j) != 0 && (best == 0 || std::llabs(a(i, j)) < best)) {
            best = std::llabs(a(i, j));
            pi = i;
            pj = j;
          }
      if (best == 0) {
        found_any = false;
        break;
      }
      swap_rows(t, pi);
      swap_cols(t, pj);
      bool dirty = false;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (a(i, t) == 0)
          continue;
        add_row(i, t, -(a(i, t) / a(t, t)));
        dirty = dirty || a(i, t) != 0;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (a(t, j) == 0)
          continue;
        add_col(j, t, -(a(t, j) / a(t, t)));
        dirty = dirty || a(t, j) != 0;
      }
      if (dirty)
        continue;
      std::size_t bad_row = m;
      for (std::size_t i = t + 1; i < m && bad_row == m; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (a(i, j) % a(t, t) != 0) {
            bad_row = i;
            break;
          }
      if (bad_row == m)
        break;
      add_row(t, bad_row, 1);
    }
    if (!found_any)
      break;
    if (a(t, t) < 0) {
      for (std::size_t j = 0; j < n; ++j)
        a(t, j) = -a(t, j);
      for (std::size_t j = 0; j < m; ++j)
        U(t, j) = -U(t, j);
    }
  }
  return {std::move(U), std::move(a), std::move(V), t};
}

/// Columns form a Z-basis of {x in Z^n : C x = 0}.
inline IntMatrix integer_kernel(const IntMatrix &c) {
  const SmithForm s = smith_normal_form(c);
  const std::size_t n = c.cols();
  IntMatrix k(n, n - s.rank);
  for (std::size_t j = s.rank; j < n; ++j)
    for (std::size_t i = 0; i < n; ++i)
      k(i, j - s.rank) = s.V(i, j);
  return k;
}

/// Row-echelon (Hermite-style) Z-basis of the lattice spanned by `gens`,
/// each vector of length `dim`. Pivots are positive and strictly move right.
inline std::vector<IntVector> lattice_basis(std::vector<IntVector> gens,
                                            std::size_t dim) {
  std::vector<IntVector> basis;
  std::size_t col = 0;
  while (!gens.empty() && col < dim) {
    while (true) {
      std::size_t best = gens.size();
      for (std::size_t i = 0; i < gens.size(); ++i)
        if (gens[i][col] != 0 &&
            (best == gens.size() ||
             std::llabs(gens[i][col]) < std::llabs(gens[best][col])))
          best = i;
      if (best == gens.size())
        break;
      std::swap(gens[0], gens[best]);
      bool reduced = true;
      for (std::size_t i = 1; i < gens.size(); ++i) {
        if (gens[i][col] == 0)
          continue;
        const i64 q = gens[i][col] / gens[0][col];
        for (std::size_t j = 0; j < dim; ++j)
          gens[i][j] = checked_sub(gens[i][j], checked_mul(q, gens[0][j]));
        reduced = reduced && gens[i][col] == 0;
      }
      if (reduced) {
        if (gens[0][col] < 0)
          for (auto &x : gens[0])
            x = -x;
        basis.push_back(gens[0]);
        gens.erase(gens.begin());
        break;
      }
    }
    gens.erase(std::remove_if(gens.begin(), gens.end(),
                              [](const IntVector &v) {
                                return std::all_of(v.begin(), v.end(),
                                                   [](i64 x) { return x == 0; });
                              }),
               gens.end());
    ++col;
  }
  return basis;
}

/// Integer coefficients x with sum_i x_i * basis[i] = v, for an echelon
/// basis produced by lattice_basis; nullopt when v is not in the lattice.
inline std::optional<IntVector>
coordinates_in_basis(const std::vector<IntVector> &basis, IntVector v) {
  IntVector x(basis.size(), 0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    std::size_t pivot = 0;
    while (basis[i][pivot] == 0)
      ++pivot;
    for (std::size_t j = 0; j < pivot; ++j)
      if (v[j] != 0)
        return std::nullopt;
    if (v[pivot] % basis[i][pivot] != 0)
      return std::nullopt;
    x[i] = v[pivot] / basis[i][pivot];
    for (std::size_t j = 0; j < v.size(); ++j)
      v[j] = checked_sub(v[j], checked_mul(x[i], basis[i][j]));
  }
  for (i64 r : v)
    if (r != 0)
      return std::nullopt;
  return x;
}

inline RationalMatrix inverse(const RationalMatrix &input) {
  if (!input.square())
    throw precondition_error("weilrep: inverse of non-square matrix");
  const std::size_t n = input.rows();
  RationalMatrix a = input, inv = RationalMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == Rational(0))
      ++p;
    if (p == n)
      throw precondition_error("weilrep: singular matrix");
    for (std::size_t j = 0; j < n; ++j) {
      std::swap(a(c, j), a(p, j));
      std::swap(inv(c, j), inv(p, j));
    }
    const Rational piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == Rational(0))
        continue;
      const Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

inline RationalMatrix inverse(const IntMatrix &m) {
  return inverse(matrix_cast<i64, Rational>(m));
}

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;
};

/// Exact inertia of a symmetric integer matrix by congruence diagonalisation
/// over Q.
inline Inertia inertia(const IntMatrix &sym) {
  const std::size_t n = sym.rows();
  RationalMatrix a = matrix_cast<i64, Rational>(sym);
  Inertia out;
  std::size_t k = 0;
  while (k < n) {
    if (a(k, k) == Rational(0)) {
      std::size_t d = k + 1;
      while (d < n && a(d, d) == Rational(0))
        ++d;
      if (d < n) {
        for (std::size_t j = 0; j < n; ++j)
          std::swap(a(k, j), a(d, j));
        for (std::size_t i = 0; i < n; ++i)
          std::swap(a(i, k), a(i, d));
      } else {
        std::size_t off = k + 1;
        while (off < n && a(k, off) == Rational(0))
          ++off;
        if (off == n) {
          ++out.zero;
          ++k;
          continue;
        }
        // e_k <- e_k + e_off makes the pivot 2 a(k, off) != 0
        for (std::size_t j = 0; j < n; ++j)
          a(k, j) += a(off, j);
        for (std::size_t i = 0; i < n; ++i)
          a(i, k) += a(i, off);
      }
    }
    const Rational piv = a(k, k);
    (piv > Rational(0) ? out.positive : out.negative) += 1;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == Rational(0))
        continue;
      const Rational f = a(i, k) / piv;
      for (std::size_t j = 0; j < n; ++j)
        a(i, j) -= f * a(k, j);
      for (std::size_t j = 0; j < n; ++j)
        a(j, i) -= f * a(j, k);
    }
    ++k;
  }
  return out;
}

} // namespace weilrep
