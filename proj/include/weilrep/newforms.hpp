#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arith.hpp"
#include "fqm.hpp"
#include "series.hpp"

namespace weilrep {

// --- arrows ---------------------------------------------------------------

/// (g up)_mu = g_{mu + H} for mu in H^perp, zero elsewhere. `sq` must be
/// subquotient(A, H); `a` is A.
inline VectorValuedQSeries up_arrow(const VectorValuedQSeries &g,
                                    const FiniteQuadraticModule &a,
                                    const Subquotient &sq) {
  if (!(g.module() == sq.module))
    throw precondition_error("weilrep: up-arrow input is not a series on H^perp/H");
  VectorValuedQSeries out(a, g.weight(), g.truncation());
  for (std::size_t i = 0; i < sq.projection.size(); ++i) {
    if (sq.projection[i] < 0)
      continue;
    const auto *comp = g.component(static_cast<std::size_t>(sq.projection[i]));
    if (!comp)
      continue;
    for (const auto &[m, c] : *comp)
      out.add(i, m, c);
  }
  return out;
}

inline VectorValuedQSeries up_arrow(const VectorValuedQSeries &g,
                                    const FiniteQuadraticModule &a,
                                    const Subgroup &h) {
  return up_arrow(g, a, subquotient(a, h));
}

/// (f down)_nu = sum over mu in H^perp mapping to nu of f_mu.
inline VectorValuedQSeries down_arrow(const VectorValuedQSeries &f,
                                      const Subquotient &sq) {
  VectorValuedQSeries out(sq.module, f.weight(), f.truncation());
  for (const auto &[mu, comp] : f.components()) {
    if (sq.projection.at(mu) < 0)
      continue;
    for (const auto &[m, c] : comp)
      out.add(static_cast<std::size_t>(sq.projection[mu]), m, c);
  }
  return out;
}

inline VectorValuedQSeries down_arrow(const VectorValuedQSeries &f,
                                      const Subgroup &h) {
  return down_arrow(f, subquotient(f.module(), h));
}

/// sum_mu f(m, mu) * conj(g(m, mu)) at a fixed exponent m.
inline CyclotomicNumber pairing_at(const VectorValuedQSeries &f,
                                   const VectorValuedQSeries &g, const Rational &m) {
  CyclotomicNumber s;
  for (const auto &[mu, comp] : f.components()) {
    const auto it = comp.find(m);
    if (it == comp.end())
      continue;
    s += it->second * g.coefficient(mu, m).conj();
  }
  return s;
}

// --- support predicates ------------------------------------------------------

/// True when every non-zero component sits in H^perp.
inline bool supported_on(const VectorValuedQSeries &f, const Subgroup &hperp) {
  for (const auto &[mu, comp] : f.components())
    if (!comp.empty() && !hperp.contains(mu))
      return false;
  return true;
}

/// f_{mu + h} = f_mu for mu in H^perp, h in H.
inline bool translation_invariant(const VectorValuedQSeries &f, const Subgroup &h,
                                  const Subgroup &hperp) {
  const auto &a = f.module();
  for (std::size_t mu : hperp.indices()) {
    const Element x = a.element(mu);
    for (const auto &g : h.generators()) {
      const std::size_t y = a.index(a.add(x, g));
      const auto *cx = f.component(mu);
      const auto *cy = f.component(y);
      if (!cx && !cy)
        continue;
      VectorValuedQSeries diff = f.empty_like();
      if (cx)
        for (const auto &[m, c] : *cx)
          diff.add(mu, m, c);
      if (cy)
        for (const auto &[m, c] : *cy)
          diff.add(mu, m, -c);
      if (!diff.is_zero())
        return false;
    }
  }
  return true;
}

struct Prop3Report {
  bool supported = false;
  bool invariant = false;
  bool reconstructed = false;
  std::string message;
  std::optional<VectorValuedQSeries> reconstruction;
};

/// Checks the hypotheses and, when they hold, rebuilds f as
/// (1/|H|) f down up and compares.
inline Prop3Report reconstruct_prop3(const VectorValuedQSeries &f, const Subgroup &h) {
  const auto &a = f.module();
  Prop3Report r;
  if (!is_isotropic(a, h)) {
    r.message = "H is not isotropic";
    return r;
  }
  const Subgroup perp = orthogonal_complement(a, h);
  r.supported = supported_on(f, perp);
  r.invariant = r.supported && translation_invariant(f, h, perp);
  if (!r.supported) {
    r.message = "f is not supported on H^perp";
    return r;
  }
  if (!r.invariant) {
    r.message = "f is not invariant under translation by H";
    return r;
  }
  const Subquotient sq = subquotient(a, h);
  VectorValuedQSeries g = up_arrow(down_arrow(f, sq), a, sq)
                              .scaled(CyclotomicNumber(Rational(1, h.order())));
  r.reconstructed = g == f;
  r.message = r.reconstructed ? "ok" : "reconstruction differs from f";
  r.reconstruction = std::move(g);
  return r;
}

// --- prime-union inclusion-exclusion ------------------------------------------

struct SignedTerm {
  std::vector<std::size_t> subset; // indices into the H_i list
  int sign = 1;
  Subgroup h;                      // H_S
  VectorValuedQSeries component;   // sign / |H_S| * f down up, on A
};

/// f = sum_{S nonempty} (-1)^{|S|+1} / |H_S| f down_{H_S} up_{H_S}, for
/// isotropic H_i of distinct prime orders. Hypotheses and the final identity
/// are checked exactly.
inline std::vector<SignedTerm>
decompose_prime_union(const VectorValuedQSeries &f, const std::vector<Subgroup> &hs) {
  const auto &a = f.module();
  const std::size_t m = hs.size();
  if (m == 0 || m > 16)
    throw precondition_error("weilrep: need between 1 and 16 subgroups");
  std::vector<Subgroup> perps;
  for (std::size_t i = 0; i < m; ++i) {
    if (!is_prime(hs[i].order()))
      throw precondition_error("weilrep: subgroup orders must be prime");
    for (std::size_t j = 0; j < i; ++j)
      if (hs[j].order() == hs[i].order())
        throw precondition_error("weilrep: subgroup orders must be distinct");
    if (!is_isotropic(a, hs[i]))
      throw precondition_error("weilrep: subgroups must be isotropic");
    perps.push_back(orthogonal_complement(a, hs[i]));
  }
  for (const auto &[mu, comp] : f.components()) {
    bool inside = false;
    for (const auto &p : perps)
      inside = inside || p.contains(mu);
    if (!comp.empty() && !inside)
      throw precondition_error("weilrep: f is not supported on the union of the "
                               "H_i^perp (component " +
                               element_text(a.element(mu)) + ")");
  }
  // translation invariance on the exclusive parts H_i^perp minus the other
  // H_j^perp
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<Element> exclusive;
    for (std::size_t mu : perps[i].indices()) {
      bool other = false;
      for (std::size_t j = 0; j < m; ++j)
        other = other || (j != i && perps[j].contains(mu));
      if (!other)
        exclusive.push_back(a.element(mu));
    }
    for (const auto &x : exclusive)
      for (const auto &g : hs[i].generators()) {
        const std::size_t mu = a.index(x), nu = a.index(a.add(x, g));
        const auto *cx = f.component(mu);
        const auto *cy = f.component(nu);
        if (!cx && !cy)
          continue;
        VectorValuedQSeries diff = f.empty_like();
        if (cx)
          for (const auto &[mm, c] : *cx)
            diff.add(mu, mm, c);
        if (cy)
          for (const auto &[mm, c] : *cy)
            diff.add(mu, mm, -c);
        if (!diff.is_zero())
          throw precondition_error("weilrep: f is not H_" + std::to_string(i + 1) +
                                   "-invariant at " + element_text(x));
      }
  }

  std::vector<SignedTerm> terms;
  VectorValuedQSeries total = f.empty_like();
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::size_t> subset;
    std::vector<Element> gens;
    for (std::size_t i = 0; i < m; ++i)
      if (mask & (1u << i)) {
        subset.push_back(i);
        for (const auto &g : hs[i].generators())
          gens.push_back(g);
      }
    const int sign = subset.size() % 2 == 1 ? 1 : -1;
    Subgroup hsum(a, gens);
    const Subquotient sq = subquotient(a, hsum);
    VectorValuedQSeries comp =
        up_arrow(down_arrow(f, sq), a, sq)
            .scaled(CyclotomicNumber(Rational(sign, hsum.order())));
    total = total + comp;
    terms.push_back({std::move(subset), sign, std::move(hsum), std::move(comp)});
  }
  if (!(total == f))
    throw consistency_error("weilrep: inclusion-exclusion does not reproduce f");
  return terms;
}

// --- content filtration and oldforms -------------------------------------------

/// Squarefree divisors d > 1 of n.
inline std::vector<i64> squarefree_divisors_above_one(i64 n) {
  std::vector<i64> out;
  for (i64 d : divisors(n))
    if (d > 1 && moebius(d) != 0)
      out.push_back(d);
  return out;
}

/// f_lambda = 0 whenever cont_e(lambda) = 1.
inline bool is_oldform(const VectorValuedQSeries &f, const Element &e) {
  const auto &a = f.module();
  if (a.element_order(e) < 2)
    throw precondition_error("weilrep: e must have order at least 2");
  for (const auto &[mu, comp] : f.components())
    if (!comp.empty() && content(a, e, a.element(mu)) == 1)
      return false;
  return true;
}

/// f = -sum_{1 < d | N squarefree} mu(d)/d f down_{I_d} up_{I_d}; the
/// identity is verified and a consistency_error signals that f does not
/// satisfy the hypotheses.
inline std::map<i64, VectorValuedQSeries> prop7_terms(const VectorValuedQSeries &f,
                                                      const Element &e) {
  const auto &a = f.module();
  const i64 n = a.element_order(e);
  std::map<i64, VectorValuedQSeries> out;
  VectorValuedQSeries total = f.empty_like();
  for (i64 d : squarefree_divisors_above_one(n)) {
    const Subquotient sq = subquotient(a, cyclic_Id(a, e, d));
    VectorValuedQSeries t = up_arrow(down_arrow(f, sq), a, sq)
                                .scaled(CyclotomicNumber(Rational(-moebius(d), d)));
    total = total + t;
    out.emplace(d, std::move(t));
  }
  if (!(total == f))
    throw precondition_error("weilrep: Moebius identity fails; f is not "
                             "supported on the union of the I_p^perp");
  return out;
}

struct OldformDecomposition {
  Element e;
  i64 level = 1;
  int depth = 0;
  /// f_d on A(d) = I_d^perp / I_d.
  std::map<i64, VectorValuedQSeries> forms;
  /// f_d lifted back to A.
  std::map<i64, VectorValuedQSeries> lifted;
};

/// Writes f = sum_{d | N, Omega(d) >= t} f_d up_{I_d}. Layer s re-expands
/// every piece with Omega(d0) = s - 1 by the Moebius identity inside
/// A(d0), in lifted form on A:
///   F = -sum_{1 < d' | N/d0} mu(d')/(d' d0) F down_{I_{d0 d'}} up_{I_{d0 d'}},
/// each term assigned to index d0 d'. Remainders are never split further,
/// which fixes one representative among the non-unique f_d.
inline OldformDecomposition oldform_decompose(const VectorValuedQSeries &f,
                                              const Element &e_in, int t) {
  const auto &a = f.module();
  if (t < 0)
    throw precondition_error("weilrep: depth t must be non-negative");
  const Element e = a.reduce(e_in);
  const i64 n = a.element_order(e);
  if (a.q_num(e) != 0)
    throw precondition_error("weilrep: e must be isotropic");
  for (const auto &[mu, comp] : f.components())
    if (!comp.empty() && big_omega(content(a, e, a.element(mu))) < t)
      throw precondition_error(
          "weilrep: f has a component with Omega(cont_e) < t at " +
          element_text(a.element(mu)));

  std::map<i64, VectorValuedQSeries> pieces; // lifted, on A
  pieces.emplace(1, f);
  for (int s = 1; s <= t; ++s) {
    std::map<i64, VectorValuedQSeries> next;
    auto accumulate = [&](i64 d, const VectorValuedQSeries &g) {
      auto it = next.find(d);
      if (it == next.end())
        next.emplace(d, g);
      else
        it->second = it->second + g;
    };
    for (const auto &[d0, big_f] : pieces) {
      if (big_omega(d0) != s - 1) {
        accumulate(d0, big_f);
        continue;
      }
      VectorValuedQSeries check = big_f.empty_like();
      for (i64 d1 : squarefree_divisors_above_one(n / d0)) {
        const Subquotient sq = subquotient(a, cyclic_Id(a, e, d0 * d1));
        VectorValuedQSeries term =
            up_arrow(down_arrow(big_f, sq), a, sq)
                .scaled(CyclotomicNumber(Rational(-moebius(d1), d1 * d0)));
        check = check + term;
        accumulate(d0 * d1, term);
      }
      if (!(check == big_f))
        throw precondition_error(
            "weilrep: support precondition fails at depth " + std::to_string(s) +
            " for d0 = " + std::to_string(d0));
    }
    // drop pieces that vanished
    pieces.clear();
    for (auto &[d, g] : next)
      if (!g.is_zero())
        pieces.emplace(d, std::move(g));
  }

  OldformDecomposition out;
  out.e = e;
  out.level = n;
  out.depth = t;
  VectorValuedQSeries total = f.empty_like();
  for (const auto &[d, big_f] : pieces) {
    const Subquotient sq = subquotient(a, cyclic_Id(a, e, d));
    VectorValuedQSeries fd =
        down_arrow(big_f, sq).scaled(CyclotomicNumber(Rational(1, d)));
    VectorValuedQSeries back = up_arrow(fd, a, sq);
    if (!(back == big_f))
      throw consistency_error("weilrep: piece for d = " + std::to_string(d) +
                              " is not an I_d up-arrow image");
    total = total + back;
    out.forms.emplace(d, std::move(fd));
    out.lifted.emplace(d, std::move(back));
  }
  if (!(total == f))
    throw consistency_error("weilrep: oldform pieces do not re-sum to f");
  // top layer: where cont_e(lambda) = d0 with Omega(d0) = t, only f_{d0}
  // reaches lambda
  for (const auto &[mu, comp] : f.components()) {
    const i64 c = content(a, e, a.element(mu));
    if (big_omega(c) != t || comp.empty())
      continue;
    VectorValuedQSeries lhs = f.empty_like(), rhs = f.empty_like();
    for (const auto &[m, v] : comp)
      lhs.add(mu, m, v);
    if (const auto it = out.lifted.find(c); it != out.lifted.end())
      if (const auto *rc = it->second.component(mu))
        for (const auto &[m, v] : *rc)
          rhs.add(mu, m, v);
    if (!(lhs == rhs))
      throw consistency_error("weilrep: top-layer extraction mismatch at " +
                              element_text(a.element(mu)));
  }
  return out;
}

} // namespace weilrep
