#include <gtest/gtest.h>

#include <cstdio>
#include <string>

#include "act/tensor_file.hpp"
#include "support.hpp"

using namespace act;
using act::testing::code_of;

namespace {

template <class S>
const CurvatureTensor<S>& as(const AnyTensor& t) {
  return std::get<CurvatureTensor<S>>(t);
}

}  // namespace

TEST(TensorFile, SingleEntryOrbitIsCompleted) {
  const auto t = parse_tensor(R"({"m": 3, "scalar": "rational", "storage": "sparse",
                                  "entries": [{"i": 0, "j": 1, "k": 1, "l": 0, "v": "1"}]})");
  const auto& r = as<Rational>(t);
  Matrix<Rational> phi(3, 3);
  phi(0, 0) = 1, phi(1, 1) = 1;
  EXPECT_EQ(r, from_form(SymmetricForm<Rational>::make(phi)));
  EXPECT_EQ(r(1, 0, 0, 1), 1);
  EXPECT_EQ(r(0, 1, 0, 1), -1);
  EXPECT_EQ(r(1, 0, 1, 0), -1);
  EXPECT_EQ(r.nonzero_offsets().size(), 4u);
}

TEST(TensorFile, ConflictingOrbitValues) {
  const std::string text = R"({"m": 3, "entries": [[0,1,1,0,"1"], [1,0,1,0,"1"]]})";
  EXPECT_EQ(code_of([&] { parse_tensor(text); }), Errc::ConflictingEntry);
  // Consistent restatement is fine.
  EXPECT_NO_THROW(parse_tensor(R"({"m": 3, "entries": [[0,1,1,0,"1"], [1,0,1,0,"-1"]]})"));
  // Diagonal slots are forced to zero.
  EXPECT_EQ(code_of([] { parse_tensor(R"({"m": 3, "entries": [[0,0,1,2,"1"]]})"); }), Errc::ConflictingEntry);
}

TEST(TensorFile, BianchiIsEnforced) {
  EXPECT_EQ(code_of([] { parse_tensor(R"({"m": 4, "entries": [[0,1,2,3,"1"]]})"); }), Errc::BianchiViolation);
  const auto raw = parse_tensor_raw(R"({"m": 4, "entries": [[0,1,2,3,"1"]]})");
  const auto& q = std::get<RawTensor<Rational>>(raw);
  EXPECT_FALSE(validate<Rational>(q.m, q.components, ScalarMode::exact()).accepted);
}

TEST(TensorFile, FormatErrorsCarryLocation) {
  try {
    parse_tensor("{\n  \"m\": 3,\n  \"entries\": [\n    [0, 1, 1, 0, \"1\"\n  ]\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::FormatError);
    EXPECT_NE(std::string(e.what()).find("line"), std::string::npos) << e.what();
  }
  for (const char* bad : {R"({"m": 1, "entries": []})", R"({"entries": []})", R"({"m": 3})",
                          R"({"m": 3, "entries": [[0,1,1,3,"1"]]})", R"({"m": 3, "entries": [[0,1,1,0,"x"]]})",
                          R"({"m": 3, "entries": [[0,1,1,0,0.5]]})", R"({"m": 3, "scalar": "complex", "entries": []})",
                          R"({"m": 2, "storage": "dense", "entries": ["0"]})", "[1,2]"}) {
    EXPECT_EQ(code_of([&] { parse_tensor(bad); }), Errc::FormatError) << bad;
  }
}

TEST(TensorFile, AcceptsValueSpellings) {
  const auto t = parse_tensor(R"({"m": 3, "entries": [{"i":0,"j":1,"k":1,"l":0,"v":"0.75"},
                                                       {"i":0,"j":2,"k":2,"l":0,"v":3},
                                                       {"i":1,"j":2,"k":2,"l":1,"v":"-6/8"}]})");
  const auto& r = as<Rational>(t);
  EXPECT_EQ(r(0, 1, 1, 0), Rational(3, 4));
  EXPECT_EQ(r(0, 2, 2, 0), 3);
  EXPECT_EQ(r(1, 2, 2, 1), Rational(-3, 4));
  const auto f = parse_tensor(R"({"m": 2, "scalar": "float", "entries": [[0,1,1,0,0.1]]})");
  EXPECT_EQ(as<double>(f)(1, 0, 0, 1), 0.1);
}

TEST(TensorFile, RationalRoundTripIsLossless) {
  Rng rng(1);
  for (int m : {2, 3, 4, 6}) {
    std::vector<CurvatureTensor<Rational>> cases{random_act<Rational>(m, 3, 7).scaled(Rational(5, 11)),
                                                 r0<Rational>(m, Rational(-13, 17))};
    if (m % 2 == 0) {
      cases.push_back(r_theta(ComplexStructure<Rational>::standard(m).conjugated(random_orthogonal<Rational>(m, rng)),
                              Rational(2)));
    }
    for (const auto& r : cases) {
      for (Storage s : {Storage::Sparse, Storage::Dense}) {
        const std::string text = dump_tensor(r, s);
        const auto back = parse_tensor(text);
        EXPECT_EQ(as<Rational>(back), r);
        EXPECT_EQ(dump_tensor(as<Rational>(back), s), text);
      }
    }
  }
}

TEST(TensorFile, FloatRoundTripIsBitExact) {
  const auto r = random_act<double>(5, 3, 2, ScalarMode::floating());
  for (Storage s : {Storage::Sparse, Storage::Dense}) {
    const auto back = as<double>(parse_tensor(dump_tensor(r, s)));
    EXPECT_EQ(back, r);
  }
}

TEST(TensorFile, SparseDumpListsOneEntryPerOrbit) {
  const std::string text = dump_tensor(r_theta(ComplexStructure<Rational>::standard(2), Rational(2)));
  // m = 2 has a single orbit, represented by (0,1,0,1) = -3c.
  EXPECT_NE(text.find(R"({"i": 0, "j": 1, "k": 0, "l": 1, "v": "-6"})"), std::string::npos) << text;
  EXPECT_EQ(text.find(R"("i": 1)"), std::string::npos);
}

TEST(TensorFile, MetricIsReducedToOrthonormalFrame) {
  // Components of R0 in the basis {2 e0, e1, e2}: R(b0,b1,b1,b0) = 4 and the
  // Gram matrix is diag(4,1,1).
  const auto t = parse_tensor(R"({"m": 3, "metric": [[4,0,0],[0,1,0],[0,0,1]],
                                  "entries": [[0,1,1,0,"4"], [0,2,2,0,"4"], [1,2,2,1,"1"]]})");
  EXPECT_EQ(as<Rational>(t), r0<Rational>(3, Rational(1)));
}

TEST(TensorFile, SaveAndLoadThroughDisk) {
  const std::string path = ::testing::TempDir() + "act_roundtrip.json";
  const auto r = r_theta(ComplexStructure<Rational>::standard(4), Rational(2));
  save_tensor(path, r);
  EXPECT_EQ(as<Rational>(load_tensor(path)), r);
  std::remove(path.c_str());
  EXPECT_EQ(code_of([&] { load_tensor(path); }), Errc::FormatError);
}
