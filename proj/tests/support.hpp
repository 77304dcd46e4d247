#pragma once

#include <cstdint>
#include <utility>

#include "act/act.hpp"

namespace act::testing {

/// I - 2 (v v^T + Tv (Tv)^T) / |v|^2: reflection through the complement of
/// the complex line span{v, Tv}. Orthogonal, commutes with T, rational.
inline Matrix<Rational> unitary_reflection(const Matrix<Rational>& theta, const Vector<Rational>& v) {
  const Vector<Rational> tv = theta * v;
  Matrix<Rational> p = Matrix<Rational>::outer(v, v) + Matrix<Rational>::outer(tv, tv);
  Matrix<Rational> h = Matrix<Rational>::identity(theta.rows());
  h -= (Rational(2) / squared_norm(v)) * p;
  return h;
}

/// Random unit x and unit y orthogonal to x and Theta x, exactly: images of
/// e_0 and e_2 under a product of reflections commuting with the standard
/// structure, then under q (Theta = q Theta_std q^T).
inline std::pair<Vector<Rational>, Vector<Rational>> complex_orthonormal_pair(int m, const Matrix<Rational>& q,
                                                                              Rng& rng) {
  const Matrix<Rational> t0 = ComplexStructure<Rational>::standard(m).matrix();
  Matrix<Rational> u = Matrix<Rational>::identity(m);
  for (int k = 0; k < 3; ++k) u = unitary_reflection(t0, random_vector<Rational>(m, rng)) * u;
  const Matrix<Rational> qu = q * u;
  return {qu.column(0), qu.column(2)};
}

template <class F>
Errc code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return static_cast<Errc>(-1);
}

}  // namespace act::testing
