#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "act/linalg.hpp"

namespace act {

// Seeded generator shared by every sampling routine. Streams are derived
// from (seed, purpose) so independent consumers never alias.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  long uniform_int(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(engine_); }
  double gaussian() { return normal_(engine_); }
  bool coin() { return uniform_int(0, 1) == 1; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Random vector with small integer entries (not all zero) in exact mode,
/// standard Gaussian entries in Float mode.
template <class S>
Vector<S> random_vector(int m, Rng& rng) {
  Vector<S> v(static_cast<std::size_t>(m));
  do {
    for (auto& x : v) {
      if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
        x = S(rng.uniform_int(-5, 5));
      } else {
        x = rng.gaussian();
      }
    }
  } while (is_zero_vector(v));
  return v;
}

/// Unit vector on S^{m-1}.
///
/// Float: normalized Gaussian, so the distribution is rotation invariant.
/// ExactRational: inverse stereographic projection of a random rational point
/// u in Q^{m-1}, x = (2u, |u|^2 - 1) / (|u|^2 + 1), followed by a random signed
/// coordinate permutation. Every output is exactly unit.
template <class S>
Vector<S> random_unit_vector(int m, Rng& rng) {
  if (m < 1) throw Error(Errc::InvalidDimension, "dimension must be positive");
  if constexpr (scalar_traits<S>::kind == ScalarKind::Float) {
    Vector<double> v = random_vector<double>(m, rng);
    normalize_if_possible(v);
    return v;
  } else {
    Vector<Rational> u(static_cast<std::size_t>(m - 1));
    for (auto& x : u) x = scalar_traits<Rational>::from_ratio(rng.uniform_int(-6, 6), rng.uniform_int(1, 5));
    const Rational uu = squared_norm(u);
    const Rational denom = uu + 1;
    Vector<Rational> x(static_cast<std::size_t>(m));
    for (int i = 0; i + 1 < m; ++i) x[i] = 2 * u[i] / denom;
    x[m - 1] = (uu - 1) / denom;
    std::vector<int> perm(static_cast<std::size_t>(m));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    Vector<Rational> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out[perm[i]] = rng.coin() ? Rational(-x[i]) : x[i];
    return out;
  }
}

template <class S>
Vector<S> random_unit_vector(int m, std::uint64_t seed) {
  if (m < 1) throw Error(Errc::InvalidDimension, "dimension must be positive");
  Rng rng(seed, 0x756e6974);
  return random_unit_vector<S>(m, rng);
}

/// Symmetric matrix with entries in {-3..3} (exact) or Gaussian (Float).
template <class S>
Matrix<S> random_symmetric(int m, Rng& rng) {
  Matrix<S> a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
        a(i, j) = S(rng.uniform_int(-3, 3));
      } else {
        a(i, j) = rng.gaussian();
      }
      a(j, i) = a(i, j);
    }
  return a;
}

template <class S>
Matrix<S> random_signed_permutation(int m, Rng& rng) {
  std::vector<int> perm(static_cast<std::size_t>(m));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng.engine());
  Matrix<S> q(m, m);
  for (int i = 0; i < m; ++i) q(perm[i], i) = rng.coin() ? S(1) : S(-1);
  return q;
}

/// Householder reflection I - 2 v v^T / |v|^2; rational whenever v is.
template <class S>
Matrix<S> householder(const Vector<S>& v) {
  const S vv = squared_norm(v);
  if (vv == 0) throw Error(Errc::DegenerateInput, "reflection vector is zero");
  const int m = static_cast<int>(v.size());
  Matrix<S> h = Matrix<S>::identity(m);
  h -= (S(2) / vv) * Matrix<S>::outer(v, v);
  return h;
}

/// Orthogonal matrix built from `reflections` Householder factors with random
/// integer vectors; exactly orthogonal in rational arithmetic.
template <class S>
Matrix<S> random_orthogonal(int m, Rng& rng, int reflections = 3) {
  Matrix<S> q = Matrix<S>::identity(m);
  for (int k = 0; k < reflections; ++k) q = householder(random_vector<S>(m, rng)) * q;
  return q;
}

}  // namespace act
