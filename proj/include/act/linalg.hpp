#pragma once

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include "act/error.hpp"
#include "act/scalar.hpp"

namespace act {

template <class S>
using Vector = std::vector<S>;

template <class S>
Vector<S> basis_vector(int m, int i) {
  Vector<S> e(static_cast<std::size_t>(m), S(0));
  e[static_cast<std::size_t>(i)] = S(1);
  return e;
}

template <class S>
S dot(const Vector<S>& u, const Vector<S>& v) {
  if (u.size() != v.size()) throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
  S acc(0);
  for (std::size_t i = 0; i < u.size(); ++i) acc += u[i] * v[i];
  return acc;
}

template <class S>
S squared_norm(const Vector<S>& v) {
  return dot(v, v);
}

template <class S>
Vector<S> operator+(Vector<S> u, const Vector<S>& v) {
  if (u.size() != v.size()) throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) u[i] += v[i];
  return u;
}

template <class S>
Vector<S> operator-(Vector<S> u, const Vector<S>& v) {
  if (u.size() != v.size()) throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
  for (std::size_t i = 0; i < u.size(); ++i) u[i] -= v[i];
  return u;
}

template <class S>
Vector<S> scaled(const S& t, Vector<S> v) {
  for (auto& x : v) x *= t;
  return v;
}

template <class S>
S max_abs(const Vector<S>& v) {
  S best(0);
  for (const auto& x : v) best = std::max<S>(best, abs_value(x));
  return best;
}

template <class S>
bool is_zero_vector(const Vector<S>& v) {
  return std::all_of(v.begin(), v.end(), [](const S& x) { return x == 0; });
}

/// Dense row-major matrix. Small sizes only (m <= 16 is the working range).
template <class S>
class Matrix {
 public:
  Matrix() = default;
  Matrix(int rows, int cols)
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), S(0)) {}

  static Matrix identity(int n) {
    Matrix id(n, n);
    for (int i = 0; i < n; ++i) id(i, i) = S(1);
    return id;
  }

  static Matrix outer(const Vector<S>& u, const Vector<S>& v) {
    Matrix out(static_cast<int>(u.size()), static_cast<int>(v.size()));
    for (int i = 0; i < out.rows_; ++i)
      for (int j = 0; j < out.cols_; ++j) out(i, j) = u[i] * v[j];
    return out;
  }

  static Matrix from_columns(const std::vector<Vector<S>>& cols, int rows) {
    Matrix out(rows, static_cast<int>(cols.size()));
    for (int j = 0; j < out.cols_; ++j)
      for (int i = 0; i < rows; ++i) out(i, j) = cols[j][i];
    return out;
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool is_square() const noexcept { return rows_ == cols_; }

  S& operator()(int r, int c) { return data_[static_cast<std::size_t>(r * cols_ + c)]; }
  const S& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r * cols_ + c)];
  }

  const std::vector<S>& data() const noexcept { return data_; }

  Vector<S> column(int c) const {
    Vector<S> v(static_cast<std::size_t>(rows_));
    for (int r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  S trace() const {
    S acc(0);
    for (int i = 0; i < std::min(rows_, cols_); ++i) acc += (*this)(i, i);
    return acc;
  }

  template <class T>
  Matrix<T> cast() const {
    Matrix<T> out(rows_, cols_);
    for (int r = 0; r < rows_; ++r)
      for (int c = 0; c < cols_; ++c) out(r, c) = scalar_cast<T>((*this)(r, c));
    return out;
  }

  Matrix& operator+=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const S& t) {
    for (auto& x : data_) x *= t;
    return *this;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(const S& t, Matrix a) { return a *= t; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error(Errc::IncompatibleTensors, "matrix shape mismatch");
    Matrix out(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const S& aik = a(i, k);
        if (aik == 0) continue;
        for (int j = 0; j < b.cols_; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend Vector<S> operator*(const Matrix& a, const Vector<S>& v) {
    if (a.cols_ != static_cast<int>(v.size())) {
      throw Error(Errc::IncompatibleTensors, "matrix/vector shape mismatch");
    }
    Vector<S> out(static_cast<std::size_t>(a.rows_), S(0));
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < a.cols_; ++j) out[i] += a(i, j) * v[j];
    return out;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  void check_same_shape(const Matrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) {
      throw Error(Errc::IncompatibleTensors, "matrix shape mismatch");
    }
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<S> data_;
};

/// m x m symmetric matrix; the realization of J(x), J(x,y) and the Ricci form.
template <class S>
using SelfAdjointOperator = Matrix<S>;

template <class S>
S max_abs(const Matrix<S>& a) {
  return max_abs(a.data());
}

template <class S>
S symmetry_defect(const Matrix<S>& a) {
  if (!a.is_square()) throw Error(Errc::InvalidOperator, "operator must be square");
  S worst(0);
  for (int i = 0; i < a.rows(); ++i)
    for (int j = i + 1; j < a.cols(); ++j) worst = std::max<S>(worst, abs_value(S(a(i, j) - a(j, i))));
  return worst;
}

template <class S>
bool is_symmetric(const Matrix<S>& a, const ScalarMode& mode) {
  return negligible(symmetry_defect(a), mode, to_double(max_abs(a)));
}

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix<double> vectors;      // column i pairs with values[i]
};

// Backed by Eigen's self-adjoint solver. Each eigenvector is sign-normalized
// (first entry above 1e-12 in magnitude is positive) and, inside clusters of
// equal eigenvalues, columns are ordered lexicographically.
inline EigenDecomposition eig_selfadjoint(const Matrix<double>& a, double tol = kDefaultTol) {
  if (!a.is_square()) throw Error(Errc::InvalidOperator, "operator must be square");
  const double scale = std::max(1.0, max_abs(a));
  if (symmetry_defect(a) > tol * scale) {
    throw Error(Errc::InvalidOperator, "operator is not symmetric");
  }
  const int n = a.rows();
  Eigen::MatrixXd em(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) em(i, j) = a(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(em);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::InvalidOperator, "eigen-decomposition did not converge");
  }
  std::vector<std::pair<double, Vector<double>>> pairs;
  for (int k = 0; k < n; ++k) {
    Vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[i] = solver.eigenvectors()(i, k);
    for (double x : v) {
      if (std::fabs(x) > 1e-12) {
        if (x < 0) v = scaled(-1.0, v);
        break;
      }
    }
    pairs.emplace_back(solver.eigenvalues()(k), std::move(v));
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& p, const auto& q) { return p.first < q.first; });
  EigenDecomposition out{{}, Matrix<double>(n, n)};
  for (int k = 0; k < n; ++k) {
    out.values.push_back(pairs[k].first);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = pairs[k].second[i];
  }
  return out;
}

/// Exact rank by fraction-free (Bareiss) elimination after clearing
/// denominators row by row.
inline int rank_exact(const Matrix<Rational>& a) {
  const int rows = a.rows();
  const int cols = a.cols();
  std::vector<std::vector<mpz_class>> m(static_cast<std::size_t>(rows),
                                        std::vector<mpz_class>(static_cast<std::size_t>(cols)));
  for (int r = 0; r < rows; ++r) {
    mpz_class l = 1;
    for (int c = 0; c < cols; ++c) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), a(r, c).get_den_mpz_t());
    for (int c = 0; c < cols; ++c) m[r][c] = a(r, c).get_num() * (l / a(r, c).get_den());
  }
  int rank = 0;
  mpz_class prev_pivot = 1;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][c] != 0) {
        pivot = r;
        break;
      }
    if (pivot < 0) continue;
    std::swap(m[pivot], m[rank]);
    for (int r = rank + 1; r < rows; ++r) {
      for (int k = c + 1; k < cols; ++k) {
        m[r][k] = (m[rank][c] * m[r][k] - m[r][c] * m[rank][k]) / prev_pivot;
      }
      m[r][c] = 0;
    }
    prev_pivot = m[rank][c];
    ++rank;
  }
  return rank;
}

template <class S>
int rank_with_mode(const Matrix<S>& a, const ScalarMode& mode) {
  require_mode<S>(mode);
  if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
    return rank_exact(a);
  } else {
    const auto eig = eig_selfadjoint(a, mode.tol);
    double spectral = 0.0;
    for (double v : eig.values) spectral = std::max(spectral, std::fabs(v));
    const double threshold = mode.tol * std::max(1.0, spectral);
    return static_cast<int>(std::count_if(eig.values.begin(), eig.values.end(),
                                          [&](double v) { return std::fabs(v) > threshold; }));
  }
}

/// Scales `v` to unit length when the result is representable: always in
/// Float mode, only for perfect-square squared norms in ExactRational mode.
/// Returns whether the vector is now unit.
template <class S>
bool normalize_if_possible(Vector<S>& v) {
  const S sq = squared_norm(v);
  if (sq == 0) return false;
  auto root = scalar_traits<S>::sqrt(sq);
  if (!root) return false;
  const S inv = S(1) / *root;
  for (auto& x : v) x *= inv;
  return true;
}

namespace detail {

// Gram-Schmidt step: remove the components along an orthogonal (not
// necessarily unit) basis, twice for floats.
template <class S>
Vector<S> residual_against(Vector<S> v, const std::vector<Vector<S>>& basis) {
  const int passes = scalar_traits<S>::kind == ScalarKind::Float ? 2 : 1;
  for (int pass = 0; pass < passes; ++pass) {
    for (const auto& b : basis) {
      const S coeff = dot(v, b) / squared_norm(b);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= coeff * b[i];
    }
  }
  return v;
}

// Floats: a candidate counts as dependent when less than sqrt(tol) of its
// length survives orthogonalization.
template <class S>
bool is_dependent(const Vector<S>& residual, const Vector<S>& original, const ScalarMode& mode) {
  if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
    (void)original;
    (void)mode;
    return is_zero_vector(residual);
  } else {
    return squared_norm(residual) <= mode.tol * squared_norm(original);
  }
}

}  // namespace detail

/// Orthogonal basis of span(vs), dropping dependent members. Floats come back
/// orthonormal; exact vectors are pairwise orthogonal and unit wherever the
/// squared norm is a rational square.
template <class S>
std::vector<Vector<S>> orthogonal_span_basis(const std::vector<Vector<S>>& vs,
                                             const ScalarMode& mode) {
  std::vector<Vector<S>> basis;
  for (const auto& v : vs) {
    if (squared_norm(v) == 0) continue;
    Vector<S> r = detail::residual_against(v, basis);
    if (detail::is_dependent(r, v, mode)) continue;
    normalize_if_possible(r);
    basis.push_back(std::move(r));
  }
  return basis;
}

/// Completes `vs` (linearly independent, common dimension m) to a basis of
/// R^m and returns the m - |vs| added vectors, each orthogonal to every input
/// and to each other. Normalization follows `orthogonal_span_basis`.
template <class S>
std::vector<Vector<S>> orthocomplement_basis(const std::vector<Vector<S>>& vs, int m,
                                             const ScalarMode& mode) {
  require_mode<S>(mode);
  if (m < 1) throw Error(Errc::InvalidDimension, "dimension must be positive");
  if (static_cast<int>(vs.size()) > m) throw Error(Errc::DegenerateInput, "too many vectors");
  std::vector<Vector<S>> basis;
  for (const auto& v : vs) {
    if (static_cast<int>(v.size()) != m) {
      throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
    }
    Vector<S> r = detail::residual_against(v, basis);
    if (squared_norm(v) == 0 || detail::is_dependent(r, v, mode)) {
      throw Error(Errc::DegenerateInput, "input vectors are linearly dependent");
    }
    basis.push_back(std::move(r));
  }
  std::vector<Vector<S>> added;
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  while (static_cast<int>(basis.size()) < m) {
    int best = -1;
    Vector<S> best_residual;
    S best_norm(0);
    for (int i = 0; i < m; ++i) {
      if (used[i]) continue;
      Vector<S> r = detail::residual_against(basis_vector<S>(m, i), basis);
      const S nrm = squared_norm(r);
      if (best < 0 || nrm > best_norm) {
        best = i;
        best_norm = nrm;
        best_residual = std::move(r);
        if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
          if (best_norm != 0) break;
        }
      }
    }
    used[best] = true;
    if (best_norm == 0) continue;
    normalize_if_possible(best_residual);
    basis.push_back(best_residual);
    added.push_back(std::move(best_residual));
  }
  return added;
}

template <class S>
std::vector<Vector<S>> orthocomplement_basis(const std::vector<Vector<S>>& vs,
                                             const ScalarMode& mode) {
  if (vs.empty()) throw Error(Errc::InvalidDimension, "cannot infer dimension from no vectors");
  return orthocomplement_basis(vs, static_cast<int>(vs.front().size()), mode);
}

/// Lower-triangular L with G = L L^T. Exact mode needs every pivot to be a
/// rational square.
template <class S>
Matrix<S> cholesky_lower(const Matrix<S>& g, const ScalarMode& mode) {
  if (!g.is_square() || !is_symmetric(g, mode)) {
    throw Error(Errc::InvalidOperator, "metric must be square and symmetric");
  }
  const int n = g.rows();
  Matrix<S> l(n, n);
  for (int j = 0; j < n; ++j) {
    S d = g(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0)) throw Error(Errc::InvalidOperator, "metric is not positive definite");
    auto root = scalar_traits<S>::sqrt(d);
    if (!root) {
      throw Error(Errc::NotRationallyRepresentable, "metric has no rational Cholesky factor");
    }
    l(j, j) = *root;
    for (int i = j + 1; i < n; ++i) {
      S s = g(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

template <class S>
Matrix<S> inverse_lower(const Matrix<S>& l) {
  const int n = l.rows();
  Matrix<S> inv(n, n);
  for (int j = 0; j < n; ++j) {
    inv(j, j) = S(1) / l(j, j);
    for (int i = j + 1; i < n; ++i) {
      S s(0);
      for (int k = j; k < i; ++k) s += l(i, k) * inv(k, j);
      inv(i, j) = -s / l(i, i);
    }
  }
  return inv;
}

}  // namespace act
