#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "weilrep/weilrep.hpp"

namespace weilrep::cli {

inline constexpr int kOk = 0;
inline constexpr int kPrecondition = 2;
inline constexpr int kConsistency = 3;

namespace detail {

inline const char *verdict(bool ok) { return ok ? "pass" : "FAIL"; }

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

inline std::string elem(const std::vector<i64> &v) { return element_text(v); }

inline void print_report(std::ostream &os, const DimensionReport &r) {
  os << "weight: " << to_string(r.weight) << "\n"
     << "signature: " << r.signature << "\n"
     << "dim_W: " << r.d << "\n"
     << "trace_S: " << r.trace_S.to_string() << "\n"
     << "trace_ST: " << r.trace_ST.to_string() << "\n"
     << "mult_S: " << r.mult_S.first << "," << r.mult_S.second << "\n"
     << "mult_ST: " << r.mult_ST[0] << "," << r.mult_ST[1] << "," << r.mult_ST[2] << "\n"
     << "alpha_S: " << to_string(r.alpha_S) << "\n"
     << "alpha_ST: " << to_string(r.alpha_ST) << "\n"
     << "alpha_T: " << to_string(r.alpha_T) << "\n"
     << "isotropic_orbits: " << r.iso_orbit_count << "\n"
     << "dim_M: " << r.dim_M << "\n"
     << "dim_S: " << r.dim_S << "\n";
}

inline std::vector<PicardRow> table_rows(i64 nmin, i64 nmax, unsigned jobs) {
  const i64 count = std::max<i64>(0, nmax - nmin + 1);
  std::vector<PicardRow> rows(static_cast<std::size_t>(count));
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<i64>(count, 1))));
  if (jobs == 1) {
    for (i64 i = 0; i < count; ++i)
      rows[static_cast<std::size_t>(i)] = picard_rank(nmin + i);
    return rows;
  }
  // rows are independent; each thread takes a stride, results land in place
  std::vector<std::exception_ptr> errs(jobs);
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j)
    pool.emplace_back([&, j] {
      try {
        for (i64 i = j; i < count; i += jobs)
          rows[static_cast<std::size_t>(i)] = picard_rank(nmin + i);
      } catch (...) {
        errs[j] = std::current_exception();
      }
    });
  for (auto &t : pool)
    t.join();
  for (auto &e : errs)
    if (e)
      std::rethrow_exception(e);
  return rows;
}

} // namespace detail

/// Runs one command line; the report goes to `out`, diagnostics to `err`.
inline int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Weil representations, discriminant forms and vector-valued modular forms"};
  app.require_subcommand(1);
  unsigned jobs = 1;

  std::string gram_file, weight_text, series_file, e_text, ell_text, eta_text;
  std::string truncation_text;
  i64 nmin = 1, nmax = 19, ideal = 0, bound = 3, p = 11, n = 2, check_upto = 100;
  int depth = 0;
  double kappa = 2.5, av = 0, bv = 0, s = 1, x = 0;
  std::string kappa_text = "2";

  auto *fqm = app.add_subcommand("fqm", "Discriminant forms");
  auto *fqm_info = fqm->add_subcommand("info", "Describe L'/L for a Gram matrix");
  fqm_info->add_option("--gram", gram_file, "Gram matrix file")->required();
  fqm->require_subcommand(1);

  auto *weil = app.add_subcommand("weil", "Weil representation");
  auto *weil_check = weil->add_subcommand("check", "Run the relation suite");
  weil_check->add_option("--gram", gram_file, "Gram matrix file")->required();
  weil->require_subcommand(1);

  auto *vvmf = app.add_subcommand("vvmf", "Vector-valued q-series");
  auto *vv_dec = vvmf->add_subcommand("decompose", "Oldform decomposition along <e>");
  vv_dec->add_option("--gram", gram_file, "Gram matrix file")->required();
  vv_dec->add_option("--series", series_file, "Series file")->required();
  vv_dec->add_option("--e", e_text, "Isotropic element, comma separated")->required();
  vv_dec->add_option("--t", depth, "Depth t")->required();
  vv_dec->add_option("--truncation", truncation_text, "Truncate the input first");
  auto *vv_old = vvmf->add_subcommand("oldform", "Oldform test along <e>");
  vv_old->add_option("--gram", gram_file, "Gram matrix file")->required();
  vv_old->add_option("--series", series_file, "Series file")->required();
  vv_old->add_option("--e", e_text, "Isotropic element, comma separated")->required();
  vvmf->require_subcommand(1);

  auto *dims = app.add_subcommand("dims", "Dimension formula");
  auto *table1 = dims->add_subcommand("table1", "Picard ranks for [[2]] + U(N) + U");
  table1->add_option("--nmax", nmax, "Largest N")->check(CLI::PositiveNumber);
  table1->add_option("--nmin", nmin, "Smallest N")->check(CLI::PositiveNumber);
  table1->add_option("--jobs", jobs, "Worker threads over rows")->check(CLI::PositiveNumber);
  auto *report = dims->add_subcommand("report", "Dimension report");
  report->add_option("--gram", gram_file, "Gram matrix file")->required();
  report->add_option("--weight", weight_text, "Weight a/b")->required();
  dims->require_subcommand(1);

  auto *lattice = app.add_subcommand("lattice", "Even lattices");
  auto *split = lattice->add_subcommand("split", "Split off U(N) along ell");
  split->add_option("--gram", gram_file, "Gram matrix file")->required();
  split->add_option("--ell", ell_text, "Isotropic vector, comma separated")->required();
  auto *iso = lattice->add_subcommand("isotropic", "Search a primitive isotropic vector");
  iso->add_option("--gram", gram_file, "Gram matrix file")->required();
  iso->add_option("--ideal", ideal, "Required ideal (ell, L); default the level");
  iso->add_option("--bound", bound, "Box bound")->check(CLI::NonNegativeNumber);
  lattice->require_subcommand(1);

  auto *lifts = app.add_subcommand("lifts", "Scalar-to-vector lifts");
  auto *kernel = lifts->add_subcommand("kernel", "Kernel element from a newform");
  kernel->add_option("--p", p, "Prime level")->required();
  kernel->add_option("--kappa", kappa_text, "Weight kappa")->required();
  kernel->add_option("--eta", eta_text, "Eta quotient c,d1:r1,d2:r2,...")->required();
  kernel->add_option("--n", n, "n (rank of A is n + 2)");
  kernel->add_option("--check-upto", check_upto, "Check a(pl) for l up to this")->check(CLI::PositiveNumber);
  kernel->add_option("--truncation", truncation_text, "Truncation of the vector series");
  lifts->require_subcommand(1);

  auto *specfun = app.add_subcommand("specfun", "Special functions");
  auto *vk = specfun->add_subcommand("vkappa", "V_kappa(a, b)");
  vk->add_option("--kappa", kappa, "kappa > 1")->required();
  vk->add_option("--a", av, "a");
  vk->add_option("--b", bv, "b");
  auto *gam = specfun->add_subcommand("gamma", "Upper incomplete gamma");
  gam->add_option("--s", s, "s > 0")->required();
  gam->add_option("--x", x, "x >= 0");
  specfun->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    std::ostringstream o, er;
    const int code = app.exit(e, o, er);
    out << o.str();
    err << er.str();
    return code == 0 ? kOk : kPrecondition;
  }

  try {
    if (*fqm_info) {
      const FiniteQuadraticModule a = FiniteQuadraticModule::from_gram(read_gram_file(gram_file));
      write_module_descriptor(out, a);
      out << "order: " << a.order() << "\nlevel: " << a.level()
          << "\nsignature: " << a.signature() << "\n";
    } else if (*weil_check) {
      const FiniteQuadraticModule a = FiniteQuadraticModule::from_gram(read_gram_file(gram_file));
      const WeilRepresentation rep(a);
      const RelationReport r = relation_suite(rep);
      out << "order\t" << a.order() << "\nsignature\t" << a.signature() << "\n"
          << "S^2 = Z\t" << detail::verdict(r.s_squared) << "\n"
          << "(ST)^3 = Z\t" << detail::verdict(r.st_cubed) << "\n"
          << "Z e_l = e(-sig/4) e_-l\t" << detail::verdict(r.z_action) << "\n"
          << "unitary S, T\t" << detail::verdict(r.unitary) << "\n"
          << "Aut commutes (" << r.automorphisms << " maps)\t" << detail::verdict(r.aut_commute)
          << "\n";
      return r.all() ? kOk : kConsistency;
    } else if (*vv_dec || *vv_old) {
      const FiniteQuadraticModule a = FiniteQuadraticModule::from_gram(read_gram_file(gram_file));
      std::ifstream in(series_file);
      if (!in)
        throw precondition_error("weilrep: cannot open series file '" + series_file + "'");
      VectorValuedQSeries f = read_series(in, a);
      const Element e = a.reduce(parse_int_list(e_text));
      if (*vv_old) {
        out << "oldform\t" << (is_oldform(f, e) ? "yes" : "no") << "\n";
        return kOk;
      }
      if (!truncation_text.empty()) {
        VectorValuedQSeries g(f.module_ptr(), f.weight(), parse_rational(truncation_text));
        f = f + g;
      }
      const OldformDecomposition dec = oldform_decompose(f, e, depth);
      VectorValuedQSeries total = f.empty_like();
      out << "level\t" << dec.level << "\ndepth\t" << dec.depth << "\n";
      for (const auto &[d, g] : dec.forms) {
        i64 terms = 0;
        for (const auto &[mu, comp] : g.components())
          terms += static_cast<i64>(comp.size());
        out << "d=" << d << "\tmodule " << divisors_text(g.module()) << "\tterms " << terms
            << "\n";
      }
      for (const auto &[d, g] : dec.lifted)
        total = total + g;
      const bool ok = total == f;
      out << "resum\t" << detail::verdict(ok) << "\n";
      return ok ? kOk : kConsistency;
    } else if (*table1) {
      out << "N\trank\n";
      for (const auto &row : detail::table_rows(nmin, nmax, jobs))
        out << row.n << "\t" << row.rank << "\n";
    } else if (*report) {
      const FiniteQuadraticModule a = FiniteQuadraticModule::from_gram(read_gram_file(gram_file));
      detail::print_report(out, dimension_report(a, parse_rational(weight_text)));
    } else if (*split) {
      const EvenLattice l(read_gram_file(gram_file));
      const SplitResult r = split_UN(l, parse_int_list(ell_text));
      out << "level\t" << l.level() << "\n"
          << "ell\t" << detail::elem(r.ell) << "\n"
          << "ell_tilde\t" << detail::elem(r.ell_tilde) << "\n"
          << "K\n";
      write_gram(out, r.K.gram());
      out << "basis\n" << r.basis_change.dump() << "gram_in_basis\n";
      write_gram(out, r.gram_in_basis);
    } else if (*iso) {
      const EvenLattice l(read_gram_file(gram_file));
      const i64 want = ideal > 0 ? ideal : l.level();
      const auto v = find_isotropic_with_ideal(l, want, bound);
      if (!v) {
        out << "not found within bound " << bound << "\n";
        return kOk;
      }
      out << "ell\t" << detail::elem(*v) << "\nideal\t" << l.ideal(*v) << "\n";
    } else if (*kernel) {
      const Rational k = parse_rational(kappa_text);
      const auto [scale, ex] = parse_eta_spec(eta_text);
      ScalarQSeries g = eta_quotient(ex, p * check_upto).scaled(Rational(scale));
      if (g.weight != k)
        throw precondition_error("weilrep: eta quotient has weight " + to_string(g.weight) +
                                 ", expected " + to_string(k));
      if (g.level != p && g.level != 1)
        throw precondition_error("weilrep: eta quotient is not of level p");
      g.level = p;
      // epsilon from the U_p relation a(p) = -epsilon p^{k/2-1} a(1)
      int epsilon = 0;
      for (int cand : {1, -1}) {
        NewformData nf{g, cand, p};
        if (!nf.first_up_violation()) {
          epsilon = cand;
          break;
        }
      }
      if (epsilon == 0)
        throw precondition_error("weilrep: no Fricke sign satisfies the U_p condition");
      if (n != 2)
        throw precondition_error("weilrep: only n = 2 (A = F_p^4) is enumerable here");
      const Rational trunc = truncation_text.empty() ? Rational(3) : parse_rational(truncation_text);
      const auto [v, rep] = kernel_element(NewformData{g, epsilon, p}, matrix_model(p), n, trunc);
      out << "p\t" << p << "\nkappa\t" << to_string(k) << "\nepsilon\t" << epsilon << "\n"
          << "condition\t" << detail::verdict(rep.condition_holds) << " (l <= "
          << rep.checked_up_to << ")\n";
      out << "a(1..10)\t";
      for (i64 l = 1; l <= 10; ++l)
        out << (l > 1 ? " " : "") << to_string(g[l]);
      out << "\n";
      const auto &[mu, m] = *rep.nonzero_witness;
      out << "nonzero\tmu=" << detail::elem(v.module().element(mu)) << " m=" << to_string(m)
          << " coeff=" << v.coefficient(mu, m).to_string() << "\n";
      for (const Rational m1 : {Rational(1), Rational(2)}) {
        out << "c(" << to_string(m1) << ",0)\t" << v.coefficient(0, m1).to_string() << "\n";
        out << "c(" << to_string(m1) << ",e22/p)\t" << v.coefficient(1, m1).to_string() << "\n";
      }
    } else if (*vk) {
      const QuadratureResult r = V_kappa(kappa, av, bv);
      out << "value\t" << detail::fmt_double(r.value) << "\nerror_estimate\t"
          << detail::fmt_double(r.error_estimate) << "\nevaluations\t" << r.evaluations << "\n";
    } else if (*gam) {
      out << "value\t" << detail::fmt_double(inc_gamma_upper(s, x)) << "\n";
    }
  } catch (const precondition_error &e) {
    err << "error: " << e.what() << "\n";
    return kPrecondition;
  } catch (const consistency_error &e) {
    err << "internal consistency failure: " << e.what() << "\n";
    return kConsistency;
  } catch (const std::exception &e) {
    err << "internal consistency failure: " << e.what() << "\n";
    return kConsistency;
  }
  return kOk;
}

} // namespace weilrep::cli
