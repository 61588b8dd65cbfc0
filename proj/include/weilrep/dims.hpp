#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "cyclotomic.hpp"
#include "fqm.hpp"
#include "weil.hpp"

namespace weilrep {

// Convention, fixed by calibration against the level-one values (k = 12:
// dim M = 2, dim S = 1) and all nineteen rows of the Picard-rank table:
//
//   dim M_{k,A} = d + d k / 12 - alpha(e^{pi i k/2} rho(S)|W)
//                 - alpha((e^{pi i k/3} rho(ST)|W)^{-1}) - alpha(rho(T)|W)
//
// with rho(T) e_l = e(Q(l)) e_l, W the +-symmetric subspace, d = dim W and
// alpha(U) = sum of nu_j over the eigenvalues e(nu_j), 0 <= nu_j < 1.
// No sign flip of Q or conjugation of rho is needed.
namespace dims_convention {
/// e^{pi i k / 2} = e(k / 4)
inline Rational s_phase(const Rational &k) { return k / Rational(4); }
/// e^{pi i k / 3} = e(k / 6)
inline Rational st_phase(const Rational &k) { return k / Rational(6); }
inline constexpr bool invert_st = true;
} // namespace dims_convention

struct DimensionReport {
  Rational weight;
  int signature = 0;
  i64 d = 0;
  Rational alpha_T;
  Rational alpha_S;
  Rational alpha_ST;
  std::pair<i64, i64> mult_S;          // eigenvalues +1, -1
  std::array<i64, 3> mult_ST{};        // eigenvalues 1, e(1/3), e(2/3) of V^{-1}
  CyclotomicNumber trace_S;            // of the normalised S on W
  CyclotomicNumber trace_ST;           // of the normalised ST on W
  i64 iso_orbit_count = 0;
  i64 dim_M = 0;
  i64 dim_S = 0;
};

namespace detail {

/// (1/2) c (G(n1) + G(n2)) with c = e(-sig/8) / sqrt|A|.
inline CyclotomicNumber plus_trace(const FiniteQuadraticModule &a,
                                   const CyclotomicNumber &inv_sqrt, i64 n1, i64 n2) {
  return e_frac(Rational(-a.signature(), 8)) * inv_sqrt *
         (a.gauss_sum(n1) + a.gauss_sum(n2)) * Rational(1, 2);
}

} // namespace detail

/// Dimension of M_{k,A} (and S_{k,A}) from exact Gauss-sum traces on W.
inline DimensionReport dimension_report(const FiniteQuadraticModule &a, const Rational &k) {
  check_weight_parity(a, k);
  if (k <= Rational(2))
    throw precondition_error("weilrep: dimension formula needs k > 2");
  DimensionReport r;
  r.weight = k;
  r.signature = a.signature();

  std::vector<std::size_t> reps = plus_orbit_representatives(a);
  r.d = static_cast<i64>(reps.size());
  for (std::size_t i : reps) {
    const Element g = a.element(i);
    r.alpha_T += a.Q(g);
    if (a.q_num(g) == 0)
      ++r.iso_orbit_count;
  }

  const CyclotomicNumber root = a.sqrt_card();
  const CyclotomicNumber inv_sqrt = root * Rational(1, a.order());

  // normalised S: an involution on W
  r.trace_S = e_frac(dims_convention::s_phase(k)) *
              detail::plus_trace(a, inv_sqrt, -2, 2);
  const auto ts = r.trace_S.as_rational();
  if (!ts || !is_integer(*ts) || (r.d - ts->numerator()) % 2 != 0)
    throw consistency_error("weilrep: normalised S is not an involution on W "
                            "(trace " + r.trace_S.to_string() + ")");
  r.mult_S = {(r.d + ts->numerator()) / 2, (r.d - ts->numerator()) / 2};
  r.alpha_S = Rational(r.mult_S.second, 2);

  // normalised ST: order 3 on W; work with V^{-1}, whose trace is conj(tr V)
  r.trace_ST = e_frac(dims_convention::st_phase(k)) *
               detail::plus_trace(a, inv_sqrt, -1, 3);
  const CyclotomicNumber tinv = dims_convention::invert_st ? r.trace_ST.conj()
                                                          : r.trace_ST;
  const std::complex<double> z = tinv.to_complex();
  const double dd = static_cast<double>(r.d);
  const i64 m0 = std::llround((2.0 * z.real() + dd) / 3.0);
  const i64 diff = std::llround(2.0 * z.imag() / std::sqrt(3.0)); // m1 - m2
  const i64 m1 = (r.d - m0 + diff) / 2, m2 = r.d - m0 - m1;
  const CyclotomicNumber w = e_frac(Rational(1, 3));
  if (m0 < 0 || m1 < 0 || m2 < 0 ||
      !(CyclotomicNumber(m0) + w * Rational(m1) + w * w * Rational(m2) == tinv))
    throw consistency_error("weilrep: normalised ST is not of order 3 on W "
                            "(trace " + r.trace_ST.to_string() + ")");
  r.mult_ST = {m0, m1, m2};
  r.alpha_ST = Rational(m1, 3) + Rational(2 * m2, 3);

  const Rational dim = Rational(r.d) + Rational(r.d) * k / Rational(12) -
                       r.alpha_S - r.alpha_ST - r.alpha_T;
  if (!is_integer(dim) || dim.numerator() < 0)
    throw consistency_error("weilrep: dimension formula gave " + to_string(dim) +
                            "; normalisation conventions are inconsistent");
  r.dim_M = dim.numerator();
  r.dim_S = r.dim_M - r.iso_orbit_count;
  if (r.dim_S < 0)
    throw consistency_error("weilrep: negative cusp-form dimension");
  return r;
}

inline i64 dim_M(const FiniteQuadraticModule &a, const Rational &k) {
  return dimension_report(a, k).dim_M;
}

inline i64 dim_S(const FiniteQuadraticModule &a, const Rational &k) {
  return dimension_report(a, k).dim_S;
}

/// Gram matrix of [[2]] + U(N) + U, the lattice behind the Picard-rank table.
inline IntMatrix picard_lattice_gram(i64 n) {
  return block_diagonal(block_diagonal(IntMatrix{{2}}, gram_hyperbolic(n)),
                        gram_hyperbolic(1));
}

struct PicardRow {
  i64 n = 0;
  i64 rank = 0;
  DimensionReport report;
};

/// rank Pic = 1 + dim S_{5/2, L} for L = [[2]] + U(N) + U.
inline PicardRow picard_rank(i64 n) {
  if (n < 1)
    throw precondition_error("weilrep: N must be positive");
  const FiniteQuadraticModule a = FiniteQuadraticModule::from_gram(picard_lattice_gram(n));
  PicardRow row{n, 0, dimension_report(a, Rational(5, 2))};
  row.rank = 1 + row.report.dim_S;
  return row;
}

inline std::vector<PicardRow> picard_rank_table(i64 nmin, i64 nmax) {
  std::vector<PicardRow> rows;
  for (i64 n = nmin; n <= nmax; ++n)
    rows.push_back(picard_rank(n));
  return rows;
}

} // namespace weilrep
