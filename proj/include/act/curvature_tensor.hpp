#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "act/linalg.hpp"
#include "act/random.hpp"
#include "act/scalar.hpp"

namespace act {

using IndexTuple = std::array<int, 4>;

inline std::string format_indices(const IndexTuple& t) {
  return "(" + std::to_string(t[0]) + "," + std::to_string(t[1]) + "," + std::to_string(t[2]) +
         "," + std::to_string(t[3]) + ")";
}

// Per-symmetry maxima of the violation over all index tuples. `worst_*`
// holds the first tuple attaining each maximum.
template <class S>
struct ValidationReport {
  int m = 0;
  S pair_exchange{0};  // R(x,y,z,w) - R(z,w,x,y)
  S antisym_12{0};     // R(x,y,z,w) + R(y,x,z,w)
  S antisym_34{0};     // R(x,y,z,w) + R(x,y,w,z)
  S bianchi{0};        // R(x,y,z,w) + R(y,z,x,w) + R(z,x,y,w)
  IndexTuple worst_pair_exchange{};
  IndexTuple worst_antisym_12{};
  IndexTuple worst_antisym_34{};
  IndexTuple worst_bianchi{};
  S scale{0};  // largest |component|
  bool accepted = false;

  bool slot_symmetries_ok(const ScalarMode& mode) const {
    const double s = to_double(scale);
    return negligible(pair_exchange, mode, s) && negligible(antisym_12, mode, s) &&
           negligible(antisym_34, mode, s);
  }
};

inline int infer_dimension(std::size_t count) {
  int m = 0;
  while (static_cast<std::size_t>(m + 1) * (m + 1) * (m + 1) * (m + 1) <= count) ++m;
  if (m < 2 || static_cast<std::size_t>(m) * m * m * m != count) {
    throw Error(Errc::InvalidShape,
                "component count " + std::to_string(count) + " is not m^4 for any m >= 2");
  }
  return m;
}

template <class S>
ValidationReport<S> validate(int m, std::span<const S> raw, const ScalarMode& mode) {
  require_mode<S>(mode);
  if (m < 2 || raw.size() != static_cast<std::size_t>(m) * m * m * m) {
    throw Error(Errc::InvalidShape, "component array is not m^4 with m >= 2");
  }
  auto at = [&](int i, int j, int k, int l) -> const S& {
    return raw[static_cast<std::size_t>(((i * m + j) * m + k) * m + l)];
  };
  ValidationReport<S> rep;
  rep.m = m;
  auto bump = [](S& worst, IndexTuple& where, const S& value, const IndexTuple& t) {
    const S a = abs_value(value);
    if (a > worst) {
      worst = a;
      where = t;
    }
  };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) {
          const IndexTuple t{i, j, k, l};
          const S& r = at(i, j, k, l);
          rep.scale = std::max<S>(rep.scale, abs_value(r));
          bump(rep.pair_exchange, rep.worst_pair_exchange, S(r - at(k, l, i, j)), t);
          bump(rep.antisym_12, rep.worst_antisym_12, S(r + at(j, i, k, l)), t);
          bump(rep.antisym_34, rep.worst_antisym_34, S(r + at(i, j, l, k)), t);
          bump(rep.bianchi, rep.worst_bianchi, S(r + at(j, k, i, l) + at(k, i, j, l)), t);
        }
  rep.accepted = rep.slot_symmetries_ok(mode) &&
                 negligible(rep.bianchi, mode, to_double(rep.scale));
  return rep;
}

template <class S>
ValidationReport<S> validate(std::span<const S> raw, const ScalarMode& mode) {
  return validate(infer_dimension(raw.size()), raw, mode);
}

/// Algebraic curvature tensor stored densely as R[i][j][k][l] = R(e_i,e_j,e_k,e_l)
/// in the standard orthonormal frame. Every instance has passed `validate`.
template <class S>
class CurvatureTensor {
 public:
  using scalar_type = S;

  CurvatureTensor() = default;

  static CurvatureTensor zero(int m, ScalarMode mode = default_mode<S>()) {
    require_mode<S>(mode);
    if (m < 2) throw Error(Errc::InvalidDimension, "curvature tensors need m >= 2");
    CurvatureTensor t;
    t.m_ = m;
    t.mode_ = mode;
    t.c_.assign(static_cast<std::size_t>(m) * m * m * m, S(0));
    return t;
  }

  // Throws SymmetryViolation (pair exchange / antisymmetry) or
  // BianchiViolation; never repairs the input.
  static CurvatureTensor from_components(int m, std::vector<S> components,
                                         ScalarMode mode = default_mode<S>()) {
    const auto rep = validate<S>(m, components, mode);
    if (!rep.slot_symmetries_ok(mode)) {
      IndexTuple where = rep.worst_pair_exchange;
      S worst = rep.pair_exchange;
      if (rep.antisym_12 > worst) worst = rep.antisym_12, where = rep.worst_antisym_12;
      if (rep.antisym_34 > worst) worst = rep.antisym_34, where = rep.worst_antisym_34;
      throw Error(Errc::SymmetryViolation,
                  "max violation " + to_string(worst) + " at " + format_indices(where));
    }
    if (!rep.accepted) {
      throw Error(Errc::BianchiViolation, "max violation " + to_string(rep.bianchi) + " at " +
                                              format_indices(rep.worst_bianchi));
    }
    CurvatureTensor t;
    t.m_ = m;
    t.mode_ = mode;
    t.c_ = std::move(components);
    t.refresh_nonzeros();
    return t;
  }

  int dim() const noexcept { return m_; }
  const ScalarMode& mode() const noexcept { return mode_; }

  const S& operator()(int i, int j, int k, int l) const { return c_[index(i, j, k, l)]; }
  std::span<const S> components() const noexcept { return c_; }

  /// max |R_ijkl|; the tensor norm used for every relative threshold.
  S norm() const { return max_abs(c_); }

  CurvatureTensor scaled(const S& t) const {
    CurvatureTensor out = *this;
    for (auto& x : out.c_) x *= t;
    out.refresh_nonzeros();
    return out;
  }

  /// Flat offsets of the nonzero components, ascending; lets contractions
  /// skip the (usually large) zero part of structured tensors.
  const std::vector<std::uint32_t>& nonzero_offsets() const noexcept { return nz_; }

  IndexTuple unflatten(std::uint32_t offset) const {
    const int m = m_;
    int n = static_cast<int>(offset);
    const int l = n % m;
    n /= m;
    const int k = n % m;
    n /= m;
    return {n / m, n % m, k, l};
  }

  template <class T>
  CurvatureTensor<T> cast(ScalarMode mode = default_mode<T>()) const {
    std::vector<T> comps;
    comps.reserve(c_.size());
    for (const auto& x : c_) comps.push_back(scalar_cast<T>(x));
    return CurvatureTensor<T>::from_components(m_, std::move(comps), mode);
  }

  friend bool operator==(const CurvatureTensor& a, const CurvatureTensor& b) {
    return a.m_ == b.m_ && a.c_ == b.c_;
  }

 private:
  std::size_t index(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * m_ + j) * m_ + k) * m_ + l);
  }

  void refresh_nonzeros() {
    nz_.clear();
    for (std::size_t n = 0; n < c_.size(); ++n)
      if (c_[n] != 0) nz_.push_back(static_cast<std::uint32_t>(n));
  }

  int m_ = 0;
  ScalarMode mode_ = default_mode<S>();
  std::vector<S> c_;
  std::vector<std::uint32_t> nz_;
};

/// Skew Theta with Theta^2 = -identity (a Hermitian almost complex structure).
template <class S>
class ComplexStructure {
 public:
  static ComplexStructure make(Matrix<S> theta, ScalarMode mode = default_mode<S>()) {
    require_mode<S>(mode);
    if (!theta.is_square() || theta.rows() < 2 || theta.rows() % 2 != 0) {
      throw Error(Errc::InvalidComplexStructure, "Theta must be square of even dimension");
    }
    const int m = theta.rows();
    const double scale = std::max(1.0, to_double(max_abs(theta)));
    const Matrix<S> skew_defect = theta + theta.transpose();
    Matrix<S> square_defect = theta * theta;
    square_defect += Matrix<S>::identity(m);
    if (!negligible(max_abs(skew_defect), mode, scale) ||
        !negligible(max_abs(square_defect), mode, scale * scale)) {
      throw Error(Errc::InvalidComplexStructure, "Theta must satisfy Theta^T = -Theta and Theta^2 = -I");
    }
    return ComplexStructure(std::move(theta));
  }

  /// Theta e_{2i} = e_{2i+1}, Theta e_{2i+1} = -e_{2i}.
  static ComplexStructure standard(int m) {
    if (m < 2 || m % 2 != 0) {
      throw Error(Errc::InvalidComplexStructure, "complex structures need even dimension");
    }
    Matrix<S> t(m, m);
    for (int i = 0; i < m; i += 2) {
      t(i + 1, i) = S(1);
      t(i, i + 1) = S(-1);
    }
    return ComplexStructure(std::move(t));
  }

  /// Q Theta Q^T for orthogonal Q.
  ComplexStructure conjugated(const Matrix<S>& q, ScalarMode mode = default_mode<S>()) const {
    return make(q * theta_ * q.transpose(), mode);
  }

  int dim() const noexcept { return theta_.rows(); }
  const Matrix<S>& matrix() const noexcept { return theta_; }
  Vector<S> apply(const Vector<S>& v) const { return theta_ * v; }

  friend bool operator==(const ComplexStructure& a, const ComplexStructure& b) {
    return a.theta_ == b.theta_;
  }

 private:
  explicit ComplexStructure(Matrix<S> theta) : theta_(std::move(theta)) {}
  Matrix<S> theta_;
};

/// Symmetric bilinear form (shape operator) feeding the Gauss equation.
template <class S>
class SymmetricForm {
 public:
  static SymmetricForm make(Matrix<S> phi, ScalarMode mode = default_mode<S>()) {
    require_mode<S>(mode);
    if (!phi.is_square() || phi.rows() < 1 || !is_symmetric(phi, mode)) {
      throw Error(Errc::InvalidOperator, "shape operator must be square and symmetric");
    }
    return SymmetricForm(std::move(phi));
  }

  int dim() const noexcept { return phi_.rows(); }
  const Matrix<S>& matrix() const noexcept { return phi_; }

 private:
  explicit SymmetricForm(Matrix<S> phi) : phi_(std::move(phi)) {}
  Matrix<S> phi_;
};

namespace detail {

template <class S, class F>
CurvatureTensor<S> tabulate(int m, const ScalarMode& mode, F&& component) {
  std::vector<S> c(static_cast<std::size_t>(m) * m * m * m);
  std::size_t n = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        for (int l = 0; l < m; ++l) c[n++] = component(i, j, k, l);
  return CurvatureTensor<S>::from_components(m, std::move(c), mode);
}

}  // namespace detail

/// c * R0 with R0(x,y)z = <y,z>x - <x,z>y (constant sectional curvature c).
template <class S>
CurvatureTensor<S> r0(int m, const S& c, ScalarMode mode = default_mode<S>()) {
  require_mode<S>(mode);
  if (m < 2) throw Error(Errc::InvalidDimension, "curvature tensors need m >= 2");
  return detail::tabulate<S>(m, mode, [&](int i, int j, int k, int l) -> S {
    const int v = (j == k && i == l ? 1 : 0) - (i == k && j == l ? 1 : 0);
    return v == 0 ? S(0) : S(c * v);
  });
}

/// c * R_Theta, R_Theta(x,y)z = <Ty,z>Tx - <Tx,z>Ty - 2<Tx,y>Tz.
template <class S>
CurvatureTensor<S> r_theta(const ComplexStructure<S>& theta, const S& c,
                           ScalarMode mode = default_mode<S>()) {
  const Matrix<S>& t = theta.matrix();  // t(r, col) = <Theta e_col, e_r>
  return detail::tabulate<S>(theta.dim(), mode, [&](int i, int j, int k, int l) -> S {
    return c * (t(k, j) * t(l, i) - t(k, i) * t(l, j) - 2 * t(j, i) * t(l, k));
  });
}

/// Gauss-equation tensor R(x,y,z,w) = phi(x,w) phi(y,z) - phi(x,z) phi(y,w).
template <class S>
CurvatureTensor<S> from_form(const SymmetricForm<S>& form, ScalarMode mode = default_mode<S>()) {
  const Matrix<S>& p = form.matrix();
  if (form.dim() < 2) throw Error(Errc::InvalidDimension, "curvature tensors need m >= 2");
  return detail::tabulate<S>(form.dim(), mode, [&](int i, int j, int k, int l) -> S {
    return p(i, l) * p(j, k) - p(i, k) * p(j, l);
  });
}

/// Componentwise linear combination; all terms must share m and mode.
template <class S>
CurvatureTensor<S> combine(const std::vector<std::pair<S, CurvatureTensor<S>>>& terms) {
  if (terms.empty()) throw Error(Errc::IncompatibleTensors, "nothing to combine");
  const int m = terms.front().second.dim();
  const ScalarMode mode = terms.front().second.mode();
  std::vector<S> c(static_cast<std::size_t>(m) * m * m * m, S(0));
  for (const auto& [coef, t] : terms) {
    if (t.dim() != m || !(t.mode() == mode)) {
      throw Error(Errc::IncompatibleTensors, "terms differ in dimension or scalar mode");
    }
    if (coef == 0) continue;
    auto src = t.components();
    for (std::size_t n = 0; n < c.size(); ++n) c[n] += coef * src[n];
  }
  return CurvatureTensor<S>::from_components(m, std::move(c), mode);
}

/// Signed sum of k Gauss tensors from random symmetric forms.
template <class S>
CurvatureTensor<S> random_act(int m, int k, std::uint64_t seed, ScalarMode mode = default_mode<S>()) {
  require_mode<S>(mode);
  if (m < 2) throw Error(Errc::InvalidDimension, "curvature tensors need m >= 2");
  if (k < 1) throw Error(Errc::InvalidDimension, "need at least one generator");
  Rng rng(seed, 0x616374);
  std::vector<std::pair<S, CurvatureTensor<S>>> terms;
  for (int g = 0; g < k; ++g) {
    auto phi = SymmetricForm<S>::make(random_symmetric<S>(m, rng), mode);
    const S sign = rng.coin() ? S(1) : S(-1);
    terms.emplace_back(sign, from_form(phi, mode));
  }
  return combine(terms);
}

/// R(x,y,z,w) for arbitrary vectors.
template <class S>
S evaluate(const CurvatureTensor<S>& r, const Vector<S>& x, const Vector<S>& y,
           const Vector<S>& z, const Vector<S>& w) {
  const int m = r.dim();
  for (const auto* v : {&x, &y, &z, &w})
    if (static_cast<int>(v->size()) != m) throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
  S acc(0);
  for (int i = 0; i < m; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < m; ++j) {
      if (y[j] == 0) continue;
      const S xy = x[i] * y[j];
      for (int k = 0; k < m; ++k) {
        if (z[k] == 0) continue;
        const S xyz = xy * z[k];
        for (int l = 0; l < m; ++l) acc += xyz * w[l] * r(i, j, k, l);
      }
    }
  }
  return acc;
}

/// The curvature operator: returns the vector R(x,y)z, i.e. the w-dual of
/// R(x,y,z,.).
template <class S>
Vector<S> apply(const CurvatureTensor<S>& r, const Vector<S>& x, const Vector<S>& y,
                const Vector<S>& z) {
  const int m = r.dim();
  for (const auto* v : {&x, &y, &z})
    if (static_cast<int>(v->size()) != m) throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
  Vector<S> out(static_cast<std::size_t>(m), S(0));
  for (int i = 0; i < m; ++i) {
    if (x[i] == 0) continue;
    for (int j = 0; j < m; ++j) {
      if (y[j] == 0) continue;
      for (int k = 0; k < m; ++k) {
        if (z[k] == 0) continue;
        const S coef = x[i] * y[j] * z[k];
        for (int l = 0; l < m; ++l) out[l] += coef * r(i, j, k, l);
      }
    }
  }
  return out;
}

/// Pull-back R'(u,v,w,z) = R(Bu,Bv,Bw,Bz). With B orthogonal and
/// B = Q^T, r_theta(Q Theta Q^T) equals pull_back(r_theta(Theta), Q^T).
template <class S>
CurvatureTensor<S> pull_back(const CurvatureTensor<S>& r, const Matrix<S>& b) {
  const int m = r.dim();
  if (b.rows() != m || b.cols() != m) throw Error(Errc::IncompatibleTensors, "basis change must be m x m");
  std::vector<S> cur(r.components().begin(), r.components().end());
  std::vector<S> next(cur.size());
  // Contract one slot at a time; after four passes the slot order is restored.
  for (int pass = 0; pass < 4; ++pass) {
    std::size_t n = 0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          for (int l = 0; l < m; ++l) {
            // cur is indexed (p, j, k, l) for the slot being contracted;
            // write rotated so the new index lands last.
            S acc(0);
            for (int p = 0; p < m; ++p) {
              const S& bp = b(p, l);
              if (bp == 0) continue;
              acc += bp * cur[static_cast<std::size_t>(((p * m + i) * m + j) * m + k)];
            }
            next[n++] = acc;
          }
    std::swap(cur, next);
  }
  return CurvatureTensor<S>::from_components(m, std::move(cur), r.mode());
}

/// Re-expresses components given in a basis with Gram matrix G in an
/// orthonormal frame (congruence by the inverse-transposed Cholesky factor).
template <class S>
CurvatureTensor<S> to_orthonormal_frame(const CurvatureTensor<S>& r, const Matrix<S>& gram) {
  const Matrix<S> l = cholesky_lower(gram, r.mode());
  return pull_back(r, inverse_lower(l).transpose());
}

/// Sectional curvature R(x,y,y,x) / (|x|^2|y|^2 - <x,y>^2).
template <class S>
S sectional_curvature(const CurvatureTensor<S>& r, const Vector<S>& x, const Vector<S>& y) {
  const S area = squared_norm(x) * squared_norm(y) - dot(x, y) * dot(x, y);
  if (area == 0) throw Error(Errc::DegenerateInput, "vectors span no 2-plane");
  return evaluate(r, x, y, y, x) / area;
}

}  // namespace act
