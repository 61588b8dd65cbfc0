#include <gtest/gtest.h>

#include <sstream>

#include "cli.hpp"

namespace {

struct CliResult {
  int code;
  std::string out, err;
};

CliResult run(std::vector<std::string> args) {
  args.insert(args.begin(), "weilrep_cli");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = weilrep::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string sample(const std::string &name) { return std::string(WEILREP_SAMPLES_DIR) + "/" + name; }

} // namespace

TEST(Cli, TableOneMatchesPublishedRanks) {
  const CliResult r = run({"dims", "table1", "--nmax", "19"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "N\trank\n1\t1\n2\t1\n3\t1\n4\t1\n5\t3\n6\t2\n7\t4\n8\t3\n9\t7\n10\t9\n"
                   "11\t11\n12\t7\n13\t19\n14\t16\n15\t19\n16\t17\n17\t33\n18\t28\n19\t37\n");
}

TEST(Cli, TableOneIsDeterministicAcrossJobs) {
  const CliResult a = run({"dims", "table1", "--nmax", "30"});
  const CliResult b = run({"dims", "table1", "--nmax", "30", "--jobs", "4"});
  ASSERT_EQ(a.code, 0);
  ASSERT_EQ(b.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(run({"dims", "table1", "--nmax", "30"}).out, a.out);
}

TEST(Cli, ModuleInfo) {
  const CliResult r = run({"fqm", "info", "--gram", sample("u5.gram")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("order: 25"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("divisors: 5,5"), std::string::npos) << r.out;
}

TEST(Cli, WeilCheckPasses) {
  const CliResult r = run({"weil", "check", "--gram", sample("z4_u6.gram")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("pass"), std::string::npos);
}

TEST(Cli, DimensionReport) {
  const CliResult r = run({"dims", "report", "--gram", sample("z2.gram"), "--weight", "13/2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("dim_M: 2\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("dim_S: 1\n"), std::string::npos) << r.out;
  // parity violation
  EXPECT_EQ(run({"dims", "report", "--gram", sample("z2.gram"), "--weight", "7/2"}).code,
            weilrep::cli::kPrecondition);
}

TEST(Cli, LiftKernel) {
  const CliResult r = run({"lifts", "kernel", "--p", "11", "--kappa", "2", "--eta", "1,1:2,11:2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("epsilon\t-1\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("condition\tpass (l <= 100)"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c(1,0)\t120/121\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("c(1,e22/p)\t-1/121\n"), std::string::npos) << r.out;
  // weight mismatch
  EXPECT_EQ(run({"lifts", "kernel", "--p", "11", "--kappa", "4", "--eta", "1:2,11:2"}).code,
            weilrep::cli::kPrecondition);
}

TEST(Cli, Specfun) {
  const CliResult r = run({"specfun", "vkappa", "--kappa", "2.5", "--a", "1", "--b", "0.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("value\t0.2497063629968"), std::string::npos) << r.out;
  EXPECT_EQ(run({"specfun", "vkappa", "--kappa", "0.5"}).code, weilrep::cli::kPrecondition);
}

TEST(Cli, LatticeCommands) {
  const CliResult s = run({"lattice", "split", "--gram", sample("z2_u4.gram"), "--ell", "0,1,0"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_NE(s.out.find("gram_in_basis"), std::string::npos);
  const CliResult i = run({"lattice", "isotropic", "--gram", sample("picard_n4.gram"), "--ideal", "4"});
  ASSERT_EQ(i.code, 0) << i.err;
  EXPECT_NE(i.out.find("ideal\t4"), std::string::npos) << i.out;
}

TEST(Cli, ErrorsAndExitCodes) {
  EXPECT_EQ(run({}).code, weilrep::cli::kPrecondition);
  EXPECT_EQ(run({"dims", "table1", "--bogus"}).code, weilrep::cli::kPrecondition);
  EXPECT_EQ(run({"fqm", "info", "--gram", "/nonexistent/file.gram"}).code, weilrep::cli::kPrecondition);
  EXPECT_EQ(run({"--help"}).code, weilrep::cli::kOk);
}
