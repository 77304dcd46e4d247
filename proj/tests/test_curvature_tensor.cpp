#include <gtest/gtest.h>

#include "act/curvature_tensor.hpp"

using namespace act;

namespace {

const ScalarMode kExact = ScalarMode::exact();

std::vector<Rational> zeros(int m) { return std::vector<Rational>(static_cast<std::size_t>(m) * m * m * m, Rational(0)); }

std::size_t at(int m, int i, int j, int k, int l) { return static_cast<std::size_t>(((i * m + j) * m + k) * m + l); }

// Sets R(e_i,e_j,e_k,e_l) = v together with the images forced by pair
// exchange and the two antisymmetries.
void put_orbit(std::vector<Rational>& c, int m, int i, int j, int k, int l, const Rational& v) {
  c[at(m, i, j, k, l)] = v;
  c[at(m, j, i, k, l)] = -v;
  c[at(m, i, j, l, k)] = -v;
  c[at(m, j, i, l, k)] = v;
  c[at(m, k, l, i, j)] = v;
  c[at(m, l, k, i, j)] = -v;
  c[at(m, k, l, j, i)] = -v;
  c[at(m, l, k, j, i)] = v;
}

Errc code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no act::Error thrown";
  return Errc::FormatError;
}

Matrix<Rational> random_sym(int m, Rng& rng) { return random_symmetric<Rational>(m, rng); }

}  // namespace

TEST(Validate, SinglePlaneTensorIsAccepted) {
  auto c = zeros(3);
  put_orbit(c, 3, 0, 1, 1, 0, 1);
  const auto r = CurvatureTensor<Rational>::from_components(3, c, kExact);
  EXPECT_EQ(r(0, 1, 1, 0), 1);
  EXPECT_EQ(r(1, 0, 1, 0), -1);
  EXPECT_EQ(r.nonzero_offsets().size(), 4u);
}

TEST(Validate, SlotSymmetryBreakIsRejected) {
  auto c = zeros(3);
  put_orbit(c, 3, 0, 1, 1, 0, 1);
  c[at(3, 1, 0, 1, 0)] = 0;
  EXPECT_EQ(code_of([&] { CurvatureTensor<Rational>::from_components(3, c, kExact); }), Errc::SymmetryViolation);
}

TEST(Validate, BianchiBreakIsRejected) {
  // A lone (0,1,2,3) orbit keeps every slot symmetry but breaks Bianchi.
  auto c = zeros(4);
  put_orbit(c, 4, 0, 1, 2, 3, 1);
  const auto rep = validate<Rational>(4, c, kExact);
  EXPECT_TRUE(rep.slot_symmetries_ok(kExact));
  EXPECT_FALSE(rep.accepted);
  EXPECT_EQ(rep.bianchi, 1);
  EXPECT_EQ(code_of([&] { CurvatureTensor<Rational>::from_components(4, c, kExact); }), Errc::BianchiViolation);
}

TEST(Validate, ShapeIsChecked) {
  EXPECT_EQ(infer_dimension(81), 3);
  EXPECT_EQ(code_of([] { infer_dimension(80); }), Errc::InvalidShape);
  EXPECT_EQ(code_of([] { infer_dimension(1); }), Errc::InvalidShape);
  EXPECT_EQ(code_of([] { r0<Rational>(1, Rational(1)); }), Errc::InvalidDimension);
}

TEST(Validate, FloatToleranceScalesWithNorm) {
  auto r = r0<double>(3, 1e6, ScalarMode::floating(1e-9));
  std::vector<double> c(r.components().begin(), r.components().end());
  c[at(3, 0, 1, 1, 0)] += 1e-5;  // 1e-11 relative
  c[at(3, 1, 0, 0, 1)] += 1e-5;
  EXPECT_NO_THROW(CurvatureTensor<double>::from_components(3, c, ScalarMode::floating(1e-9)));
  c[at(3, 1, 0, 0, 1)] += 1.0;
  EXPECT_THROW(CurvatureTensor<double>::from_components(3, c, ScalarMode::floating(1e-9)), Error);
}

TEST(Constructors, R0HasConstantSectionalCurvature) {
  Rng rng(1);
  for (int m = 2; m <= 6; ++m) {
    const Rational c = scalar_traits<Rational>::from_ratio(rng.uniform_int(-9, 9), 7);
    const auto r = r0<Rational>(m, c);
    for (int t = 0; t < 10; ++t) {
      const auto x = random_vector<Rational>(m, rng);
      const auto y = random_vector<Rational>(m, rng);
      if (squared_norm(x) * squared_norm(y) == dot(x, y) * dot(x, y)) continue;
      EXPECT_EQ(sectional_curvature(r, x, y), c);
    }
  }
}

TEST(Constructors, R0IsGaussTensorOfIdentity) {
  for (int m = 2; m <= 5; ++m) {
    EXPECT_EQ(from_form(SymmetricForm<Rational>::make(Matrix<Rational>::identity(m))), r0<Rational>(m, Rational(1)));
  }
}

TEST(Constructors, GaussEquationMatchesDirectEvaluation) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(2, 5));
    const Matrix<Rational> phi = random_sym(m, rng);
    const auto r = from_form(SymmetricForm<Rational>::make(phi));
    auto form = [&](const Vector<Rational>& a, const Vector<Rational>& b) { return dot(a, Vector<Rational>(phi * b)); };
    const auto x = random_vector<Rational>(m, rng), y = random_vector<Rational>(m, rng);
    const auto z = random_vector<Rational>(m, rng), w = random_vector<Rational>(m, rng);
    EXPECT_EQ(evaluate(r, x, y, z, w), form(x, w) * form(y, z) - form(x, z) * form(y, w));
  }
}

TEST(Constructors, RThetaJacobiIsRankOneProjection) {
  // J(x) xi = 3 <xi, Theta x> Theta x.
  Rng rng(3);
  for (int m : {2, 4, 6}) {
    const auto theta = ComplexStructure<Rational>::standard(m).conjugated(random_orthogonal<Rational>(m, rng));
    const auto r = r_theta(theta, Rational(1));
    for (int t = 0; t < 10; ++t) {
      const auto x = random_vector<Rational>(m, rng);
      const auto xi = random_vector<Rational>(m, rng);
      const auto tx = theta.apply(x);
      EXPECT_EQ(apply(r, xi, x, x), scaled(Rational(3 * dot(xi, tx)), tx));
    }
  }
}

TEST(Constructors, RThetaHolomorphicSectionalCurvature) {
  const auto theta = ComplexStructure<Rational>::standard(4);
  const Rational c(5, 3);
  const auto r = r_theta(theta, c);
  const Vector<Rational> x{1, 2, 0, -1};
  EXPECT_EQ(sectional_curvature(r, x, theta.apply(x)), 3 * c);
}

TEST(Constructors, ComplexStructureValidation) {
  EXPECT_EQ(code_of([] { ComplexStructure<Rational>::standard(3); }), Errc::InvalidComplexStructure);
  Matrix<Rational> bad = ComplexStructure<Rational>::standard(4).matrix();
  bad *= Rational(2);
  EXPECT_EQ(code_of([&] { ComplexStructure<Rational>::make(bad); }), Errc::InvalidComplexStructure);
  Matrix<Rational> sym = Matrix<Rational>::identity(2);
  EXPECT_EQ(code_of([&] { ComplexStructure<Rational>::make(sym); }), Errc::InvalidComplexStructure);
}

TEST(Constructors, CombineChecksCompatibility) {
  const auto a = r0<Rational>(3, Rational(1));
  const auto b = r0<Rational>(4, Rational(1));
  EXPECT_EQ(code_of([&] { combine<Rational>({{Rational(1), a}, {Rational(1), b}}); }), Errc::IncompatibleTensors);
  EXPECT_EQ(combine<Rational>({{Rational(2), a}, {Rational(-1), a}}), a);
}

TEST(Constructors, RandomActIsValidAndSeeded) {
  for (int m = 2; m <= 6; ++m) {
    const auto r = random_act<Rational>(m, 3, 9);
    EXPECT_EQ(r, random_act<Rational>(m, 3, 9));
    EXPECT_TRUE(validate<Rational>(m, r.components(), kExact).accepted);
  }
}

TEST(Transform, PullBackConjugatesTheta) {
  Rng rng(4);
  for (int m : {4, 6}) {
    const auto q = random_orthogonal<Rational>(m, rng);
    const auto theta = ComplexStructure<Rational>::standard(m);
    EXPECT_EQ(r_theta(theta.conjugated(q), Rational(2)), pull_back(r_theta(theta, Rational(2)), q.transpose()));
  }
}

TEST(Transform, PullBackPreservesR0UnderRotation) {
  Rng rng(5);
  const auto r = r0<Rational>(5, Rational(3));
  EXPECT_EQ(pull_back(r, random_orthogonal<Rational>(5, rng)), r);
}

TEST(Transform, OrthonormalFrameUndoesGram) {
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    const int m = static_cast<int>(rng.uniform_int(2, 5));
    Matrix<Rational> l(m, m);
    for (int i = 0; i < m; ++i) {
      l(i, i) = static_cast<long>(rng.uniform_int(1, 3));
      for (int j = 0; j < i; ++j) l(i, j) = static_cast<long>(rng.uniform_int(-2, 2));
    }
    const auto r = random_act<Rational>(m, 2, static_cast<std::uint64_t>(trial));
    // Components in the basis b_i = L^T e_i, whose Gram matrix is L L^T.
    const auto skewed = pull_back(r, l.transpose());
    EXPECT_EQ(to_orthonormal_frame(skewed, Matrix<Rational>(l * l.transpose())), r);
  }
}

TEST(Transform, CastRoundTripKeepsSmallRationals) {
  const auto r = r_theta(ComplexStructure<Rational>::standard(4), Rational(3, 4));
  const auto f = r.cast<double>(ScalarMode::floating());
  EXPECT_EQ(f.cast<Rational>(kExact), r);
}
