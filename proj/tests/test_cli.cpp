#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "act/tensor_file.hpp"
#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = act::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string temp(const std::string& name) { return ::testing::TempDir() + "act_cli_" + name; }

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

}  // namespace

TEST(Cli, ConstantCurvatureExample) {
  const auto t = temp("r0.json");
  ASSERT_EQ(run({"gen", "--type", "r0", "--m", "4", "--c", "5", "-o", t}).code, 0);
  const auto r = run({"classify", t});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "tag=ConstantCurvature c=5 residual=0\n");
}

TEST(Cli, ComplexFormTsankovExample) {
  const auto t = temp("rtheta.json");
  ASSERT_EQ(run({"gen", "--type", "rtheta", "--m", "4", "--c", "2", "-o", t}).code, 0);
  const auto r = run({"tsankov", t, "--method", "exact"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "holds=true method=ExactDivisibility\n");
  const auto c = run({"classify", t});
  EXPECT_EQ(c.code, 0);
  EXPECT_TRUE(contains(c.out, "tag=ComplexForm c=2 residual=0\ntheta=")) << c.out;
}

TEST(Cli, MixedTensorExample) {
  const auto t = temp("combo.json");
  ASSERT_EQ(run({"gen", "--type", "combo", "--m", "4", "-o", t}).code, 0);
  const auto r = run({"classify", t});
  EXPECT_EQ(r.code, 1);
  EXPECT_TRUE(contains(r.out, "tag=NotTsankov witness_x=")) << r.out;
  const auto pos = r.out.find("comm_norm=");
  ASSERT_NE(pos, std::string::npos);
  const auto norm = act::parse_scalar<act::Rational>(r.out.substr(pos + 10, r.out.find('\n', pos) - pos - 10));
  EXPECT_GE(norm, act::Rational(3, 2));
  EXPECT_TRUE(r.err.empty());
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"classify"}).code, 2);
  EXPECT_EQ(run({"tsankov", "x.json", "--bogus"}).code, 2);
  EXPECT_EQ(run({"tsankov", "x.json", "--method", "guess"}).code, 2);
  EXPECT_EQ(run({"gen", "--type", "r0"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, ComputationalErrorsExitOneWithName) {
  const auto missing = run({"classify", temp("does_not_exist.json")});
  EXPECT_EQ(missing.code, 1);
  EXPECT_TRUE(contains(missing.err, "FormatError")) << missing.err;
  const auto odd = run({"gen", "--type", "rtheta", "--m", "3"});
  EXPECT_EQ(odd.code, 1);
  EXPECT_TRUE(contains(odd.err, "InvalidComplexStructure")) << odd.err;
  const auto t = temp("two.json");
  ASSERT_EQ(run({"gen", "--type", "r0", "--m", "2", "-o", t}).code, 0);
  const auto small = run({"classify", t});
  EXPECT_EQ(small.code, 1);
  EXPECT_TRUE(contains(small.err, "UnsupportedDimension")) << small.err;
}

TEST(Cli, ValidateReportsTable) {
  const auto good = temp("good.json");
  ASSERT_EQ(run({"gen", "--type", "gauss", "--m", "3", "--seed", "4", "-o", good}).code, 0);
  const auto ok = run({"validate", good});
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(contains(ok.out, "bianchi,0,")) << ok.out;
  EXPECT_TRUE(contains(ok.out, "accepted=true"));

  const auto bad = temp("bad.json");
  write(bad, R"({"m": 4, "entries": [[0,1,2,3,"1"]]})");
  const auto no = run({"validate", bad});
  EXPECT_EQ(no.code, 1);
  EXPECT_TRUE(contains(no.out, "bianchi,1,")) << no.out;
  EXPECT_TRUE(contains(no.out, "accepted=false"));

  const auto conflict = temp("conflict.json");
  write(conflict, R"({"m": 3, "entries": [[0,1,1,0,"1"], [1,0,1,0,"1"]]})");
  const auto c = run({"validate", conflict});
  EXPECT_EQ(c.code, 1);
  EXPECT_TRUE(contains(c.err, "ConflictingEntry"));
}

TEST(Cli, JacobiPrintsOperatorAndSpectrum) {
  const auto t = temp("jac.json");
  ASSERT_EQ(run({"gen", "--type", "rtheta", "--m", "4", "--c", "1", "-o", t}).code, 0);
  const auto r = run({"jacobi", t, "--x", "1,0,0,0"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "x=1,0,0,0\nrank=1\nJ[0]=0,0,0,0\nJ[1]=0,3,0,0\nJ[2]=0,0,0,0\nJ[3]=0,0,0,0\n"
                   "spectrum=0,0,0,3\n");
  EXPECT_EQ(run({"jacobi", t, "--x", "1,0"}).code, 1);
}

TEST(Cli, SampledMethodAndSeedStability) {
  const auto t = temp("rand.json");
  ASSERT_EQ(run({"gen", "--type", "random", "--m", "4", "--seed", "3", "-o", t}).code, 0);
  const auto a = run({"tsankov", t, "--method", "sampled", "--samples", "20", "--seed", "5"});
  const auto b = run({"tsankov", t, "--method", "sampled", "--samples", "20", "--seed", "5"});
  EXPECT_EQ(a.code, 1);
  EXPECT_EQ(a.out, b.out);
  EXPECT_TRUE(contains(a.out, "holds=false method=Sampled\nwitness_x="));
}

TEST(Cli, OssermanAndReport) {
  const auto t = temp("osserman.json");
  ASSERT_EQ(run({"gen", "--type", "rtheta", "--m", "6", "--c", "1/3", "--conjugate", "--seed", "2", "-o", t}).code, 0);
  const auto o = run({"osserman", t, "--samples", "30", "--seed", "1"});
  EXPECT_EQ(o.code, 0);
  EXPECT_TRUE(contains(o.out, "is_osserman=true samples=30")) << o.out;
  const auto r = run({"report", t, "--samples", "4", "--seed", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "tsankov=true")) << r.out;
  EXPECT_TRUE(contains(r.out, "rank_histogram=1:4"));
  EXPECT_TRUE(contains(r.out, "two_eigenvalue_check=true"));
  EXPECT_TRUE(contains(r.out, "sample,rank,w_dim,eig0,eig1,eig2,eig3,eig4,eig5\n0,1,2,"));
  EXPECT_EQ(r.out, run({"report", t, "--samples", "4", "--seed", "1"}).out);
}

TEST(Cli, GenRoundTripsThroughFiles) {
  const auto t = temp("dense.json");
  ASSERT_EQ(run({"gen", "--type", "random", "--m", "3", "--seed", "8", "--storage", "dense", "-o", t}).code, 0);
  const auto loaded = act::load_tensor(t);
  const auto& r = std::get<act::CurvatureTensor<act::Rational>>(loaded);
  EXPECT_EQ(r, act::random_act<act::Rational>(3, 3, 8));
  const auto phi = temp("phi.json");
  write(phi, R"([["2", 0, 0], [0, "2", 0], [0, 0, "2"]])");
  ASSERT_EQ(run({"gen", "--type", "gauss", "--phi", phi, "-o", t}).code, 0);
  EXPECT_EQ(run({"classify", t}).out, "tag=ConstantCurvature c=4 residual=0\n");
  ASSERT_EQ(run({"gen", "--type", "r0", "--m", "3", "--c", "0.5", "--scalar", "float", "-o", t}).code, 0);
  EXPECT_EQ(run({"classify", t}).out, "tag=ConstantCurvature c=0.5 residual=0\n");
}

TEST(Cli, ToleranceFromEnvironment) {
  const auto t = temp("tol.json");
  ASSERT_EQ(run({"gen", "--type", "r0", "--m", "3", "--scalar", "float", "-o", t}).code, 0);
  ::setenv("ACT_TOL", "abc", 1);
  EXPECT_EQ(run({"classify", t}).code, 2);
  ::setenv("ACT_TOL", "1e-6", 1);
  EXPECT_EQ(run({"classify", t}).code, 0);
  ::unsetenv("ACT_TOL");
}
