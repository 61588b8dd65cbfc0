#pragma once

#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <utility>

#include "cyclotomic.hpp"
#include "fqm.hpp"
#include "rational.hpp"

namespace weilrep {

/// Truncated sum_{mu, m} c(m, mu) q^m e_mu. Coefficients are keyed by the
/// element index of mu in its module; m must satisfy m = Q(mu) mod 1.
class VectorValuedQSeries {
public:
  using Component = std::map<Rational, CyclotomicNumber>;

  VectorValuedQSeries(FiniteQuadraticModule a, Rational weight, Rational truncation)
      : module_(std::make_shared<const FiniteQuadraticModule>(std::move(a))),
        weight_(weight), truncation_(truncation) {}

  VectorValuedQSeries(std::shared_ptr<const FiniteQuadraticModule> a,
                      Rational weight, Rational truncation)
      : module_(std::move(a)), weight_(weight), truncation_(truncation) {}

  const FiniteQuadraticModule &module() const noexcept { return *module_; }
  const std::shared_ptr<const FiniteQuadraticModule> &module_ptr() const noexcept {
    return module_;
  }
  const Rational &weight() const noexcept { return weight_; }
  const Rational &truncation() const noexcept { return truncation_; }
  const std::map<std::size_t, Component> &components() const noexcept {
    return coeffs_;
  }

  /// Adds c to the coefficient of q^m e_mu (mu given by index).
  void add(std::size_t mu, const Rational &m, const CyclotomicNumber &c) {
    if (c.trivially_zero())
      return;
    check_term(mu, m);
    auto &comp = coeffs_[mu];
    auto it = comp.find(m);
    if (it == comp.end()) {
      comp.emplace(m, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) {
        comp.erase(it);
        if (comp.empty())
          coeffs_.erase(mu);
      }
    }
  }

  void add(const Element &mu, const Rational &m, const CyclotomicNumber &c) {
    add(module_->index(mu), m, c);
  }

  void set(std::size_t mu, const Rational &m, const CyclotomicNumber &c) {
    check_term(mu, m);
    auto it = coeffs_.find(mu);
    if (it != coeffs_.end())
      it->second.erase(m);
    add(mu, m, c);
  }

  CyclotomicNumber coefficient(std::size_t mu, const Rational &m) const {
    const auto it = coeffs_.find(mu);
    if (it == coeffs_.end())
      return {};
    const auto jt = it->second.find(m);
    return jt == it->second.end() ? CyclotomicNumber{} : jt->second;
  }

  const Component *component(std::size_t mu) const {
    const auto it = coeffs_.find(mu);
    return it == coeffs_.end() ? nullptr : &it->second;
  }

  bool is_zero() const {
    for (const auto &[mu, comp] : coeffs_)
      for (const auto &[m, c] : comp)
        if (!c.is_zero())
          return false;
    return true;
  }

  /// A zero series with the same metadata.
  VectorValuedQSeries empty_like() const {
    return VectorValuedQSeries(module_, weight_, truncation_);
  }

  VectorValuedQSeries scaled(const CyclotomicNumber &s) const {
    VectorValuedQSeries out = empty_like();
    for (const auto &[mu, comp] : coeffs_)
      for (const auto &[m, c] : comp)
        out.add(mu, m, c * s);
    return out;
  }

  /// Sum; truncation mismatches resolve to the smaller bound.
  friend VectorValuedQSeries operator+(const VectorValuedQSeries &x,
                                       const VectorValuedQSeries &y) {
    if (!(*x.module_ == *y.module_))
      throw precondition_error("weilrep: series live on different modules");
    VectorValuedQSeries out(x.module_, x.weight_,
                            std::min(x.truncation_, y.truncation_));
    for (const auto *s : {&x, &y})
      for (const auto &[mu, comp] : s->coeffs_)
        for (const auto &[m, c] : comp)
          if (m <= out.truncation_)
            out.add(mu, m, c);
    return out;
  }

  friend VectorValuedQSeries operator-(const VectorValuedQSeries &x,
                                       const VectorValuedQSeries &y) {
    return x + y.scaled(CyclotomicNumber(-1));
  }

  /// Exact coefficientwise equality on the common truncation.
  friend bool operator==(const VectorValuedQSeries &x, const VectorValuedQSeries &y) {
    return (x - y).is_zero();
  }

private:
  void check_term(std::size_t mu, const Rational &m) const {
    if (mu >= static_cast<std::size_t>(module_->order()))
      throw precondition_error("weilrep: component index out of range");
    if (m > truncation_)
      throw precondition_error("weilrep: exponent " + to_string(m) +
                               " beyond truncation " + to_string(truncation_));
    if (frac(m) != module_->Q(module_->element(mu)))
      throw precondition_error("weilrep: exponent " + to_string(m) +
                               " violates m = Q(mu) mod 1");
  }

  std::shared_ptr<const FiniteQuadraticModule> module_;
  Rational weight_;
  Rational truncation_;
  std::map<std::size_t, Component> coeffs_;
};

using VVQS = VectorValuedQSeries;

// --- text format -------------------------------------------------------------

inline std::string divisors_text(const FiniteQuadraticModule &a) {
  std::string out;
  for (std::size_t i = 0; i < a.rank(); ++i) {
    if (i)
      out += ",";
    out += std::to_string(a.orders()[i]);
  }
  return out;
}

inline std::string element_text(const Element &x) {
  std::string out = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i)
      out += ",";
    out += std::to_string(x[i]);
  }
  return out + ")";
}

inline void write_series(std::ostream &os, const VectorValuedQSeries &f) {
  os << "module: " << divisors_text(f.module()) << "\n";
  os << "weight: " << to_string(f.weight()) << "\n";
  os << "truncation: " << to_string(f.truncation()) << "\n";
  for (const auto &[mu, comp] : f.components())
    for (const auto &[m, c] : comp)
      os << "mu=" << element_text(f.module().element(mu)) << " m=" << to_string(m)
         << " coeff=" << c.to_string() << "\n";
}

/// Reads the format written by write_series; the module itself (which the
/// file only names by its divisors) is supplied by the caller.
inline VectorValuedQSeries read_series(std::istream &is, const FiniteQuadraticModule &a) {
  std::string line;
  auto header = [&](const std::string &key) {
    if (!std::getline(is, line) || line.rfind(key + ":", 0) != 0)
      throw precondition_error("weilrep: series file lacks '" + key + ":' line");
    std::string v = line.substr(key.size() + 1);
    while (!v.empty() && v.front() == ' ')
      v.erase(v.begin());
    return v;
  };
  if (header("module") != divisors_text(a))
    throw precondition_error("weilrep: series module does not match");
  const Rational k = parse_rational(header("weight"));
  const Rational trunc = parse_rational(header("truncation"));
  VectorValuedQSeries f(a, k, trunc);
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    const auto p1 = line.find("mu=("), p2 = line.find(") m="),
               p3 = line.find(" coeff=");
    if (p1 != 0 || p2 == std::string::npos || p3 == std::string::npos)
      throw precondition_error("weilrep: malformed series record '" + line + "'");
    Element mu;
    std::stringstream coords(line.substr(4, p2 - 4));
    std::string tok;
    while (std::getline(coords, tok, ','))
      if (!tok.empty())
        mu.push_back(detail::parse_i64(tok));
    const Rational m = parse_rational(line.substr(p2 + 4, p3 - p2 - 4));
    f.add(a.index(a.reduce(mu)), m, parse_cyclotomic(line.substr(p3 + 7)));
  }
  return f;
}

} // namespace weilrep
