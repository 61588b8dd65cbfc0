#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fqm.hpp"
#include "integer_matrix.hpp"
#include "rational.hpp"
#include "series.hpp"

namespace weilrep {

/// Gram file: first token r, then r rows of r integers. '#' starts a comment.
inline IntMatrix read_gram(std::istream &is) {
  std::string text, line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos)
      line.erase(hash);
    text += line + "\n";
  }
  std::stringstream ss(text);
  std::string tok;
  std::vector<i64> vals;
  while (ss >> tok)
    vals.push_back(detail::parse_i64(tok));
  if (vals.empty())
    throw precondition_error("weilrep: empty Gram file");
  const i64 r = vals[0];
  if (r < 0 || static_cast<i64>(vals.size()) != 1 + r * r)
    throw precondition_error("weilrep: Gram file must hold r followed by r*r integers");
  IntMatrix g(static_cast<std::size_t>(r), static_cast<std::size_t>(r));
  for (i64 i = 0; i < r; ++i)
    for (i64 j = 0; j < r; ++j)
      g(i, j) = vals[static_cast<std::size_t>(1 + i * r + j)];
  return g;
}

inline IntMatrix read_gram_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw precondition_error("weilrep: cannot open Gram file '" + path + "'");
  return read_gram(in);
}

inline void write_gram(std::ostream &os, const IntMatrix &g) {
  os << g.rows() << "\n";
  for (std::size_t i = 0; i < g.rows(); ++i) {
    for (std::size_t j = 0; j < g.cols(); ++j)
      os << (j ? " " : "") << g(i, j);
    os << "\n";
  }
}

/// "1,-2,0" -> {1, -2, 0}
inline std::vector<i64> parse_int_list(const std::string &text) {
  std::vector<i64> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    out.push_back(detail::parse_i64(tok));
  if (out.empty())
    throw precondition_error("weilrep: empty coordinate list");
  return out;
}

inline void write_module_descriptor(std::ostream &os, const FiniteQuadraticModule &a) {
  os << "divisors: " << divisors_text(a) << "\n";
  for (std::size_t i = 0; i < a.rank(); ++i)
    os << "Q(g_" << i + 1 << ")=" << to_string(a.q_values()[i]) << "\n";
  for (std::size_t i = 0; i < a.rank(); ++i) {
    for (std::size_t j = 0; j < a.rank(); ++j)
      os << (j ? " " : "") << to_string(a.bilinear_matrix()(i, j));
    os << "\n";
  }
}

} // namespace weilrep
