#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "act/curvature_tensor.hpp"
#include "act/linalg.hpp"

namespace act {

namespace detail {

template <class S>
void check_dim(const CurvatureTensor<S>& r, const Vector<S>& v) {
  if (static_cast<int>(v.size()) != r.dim()) {
    throw Error(Errc::IncompatibleTensors, "vector dimension does not match tensor");
  }
}

}  // namespace detail

/// Jacobi operator J(x): y -> R(y,x)x, as the matrix
/// J[a][b] = R(e_b, x, x, e_a).
template <class S>
SelfAdjointOperator<S> jacobi(const CurvatureTensor<S>& r, const Vector<S>& x) {
  detail::check_dim(r, x);
  const int m = r.dim();
  const Matrix<S> xx = Matrix<S>::outer(x, x);
  Matrix<S> j(m, m);
  // J[a][b] += x_i x_k R[b][i][k][a] over the nonzero components; the
  // tensor symmetries make the result exactly symmetric.
  for (std::uint32_t n : r.nonzero_offsets()) {
    const auto [b, i, k, a] = r.unflatten(n);
    const S& w = xx(i, k);
    if (w == 0) continue;
    j(a, b) += w * r.components()[n];
  }
  return j;
}

/// Polarized Jacobi operator J(x,y): z -> (R(z,x)y + R(z,y)x) / 2.
template <class S>
SelfAdjointOperator<S> jacobi_polarized(const CurvatureTensor<S>& r, const Vector<S>& x,
                                        const Vector<S>& y) {
  detail::check_dim(r, x);
  detail::check_dim(r, y);
  const int m = r.dim();
  Matrix<S> sym(m, m);  // (x_i y_k + y_i x_k) / 2
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < m; ++k) sym(i, k) = (x[i] * y[k] + y[i] * x[k]) / 2;
  Matrix<S> j(m, m);
  for (std::uint32_t n : r.nonzero_offsets()) {
    const auto [b, i, k, a] = r.unflatten(n);
    const S& w = sym(i, k);
    if (w == 0) continue;
    j(a, b) += w * r.components()[n];
  }
  return j;
}

/// r(x) = rank J(x); at most m - 1 since J(x)x = 0.
template <class S>
int jacobi_rank(const CurvatureTensor<S>& r, const Vector<S>& x, const ScalarMode& mode) {
  if (is_zero_vector(x)) throw Error(Errc::DegenerateInput, "x must be nonzero");
  return rank_with_mode(jacobi(r, x), mode);
}

template <class S>
int jacobi_rank(const CurvatureTensor<S>& r, const Vector<S>& x) {
  return jacobi_rank(r, x, r.mode());
}

/// Ricci form rho[a][b] = sum_i R[a][i][i][b], so rho(x,x) = tr J(x).
template <class S>
SelfAdjointOperator<S> ricci(const CurvatureTensor<S>& r) {
  const int m = r.dim();
  Matrix<S> rho(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      S acc(0);
      for (int i = 0; i < m; ++i) acc += r(a, i, i, b);
      rho(a, b) = acc;
    }
  return rho;
}

namespace detail {

// Orthogonal basis of Range(J) ordered for reports. Float: unit eigenvectors
// with eigenvalues above tol * max(1, |J|_2). Exact: the column space.
template <class S>
std::vector<Vector<S>> range_basis(const Matrix<S>& j, const ScalarMode& mode) {
  const int m = j.rows();
  if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
    std::vector<Vector<S>> cols;
    for (int c = 0; c < m; ++c) cols.push_back(j.column(c));
    return orthogonal_span_basis(cols, mode);
  } else {
    const auto eig = eig_selfadjoint(j, mode.tol);
    double spectral = 0.0;
    for (double v : eig.values) spectral = std::max(spectral, std::fabs(v));
    std::vector<Vector<S>> out;
    for (int k = 0; k < m; ++k)
      if (std::fabs(eig.values[k]) > mode.tol * std::max(1.0, spectral)) {
        out.push_back(eig.vectors.column(k));
      }
    return out;
  }
}

}  // namespace detail

/// Orthogonal basis of W(x) = R x + Range(J(x)), x first (normalized when
/// representable). Length 1 + r(x).
template <class S>
std::vector<Vector<S>> w_space(const CurvatureTensor<S>& r, const Vector<S>& x) {
  if (is_zero_vector(x)) throw Error(Errc::DegenerateInput, "x must be nonzero");
  std::vector<Vector<S>> gens{x};
  for (auto& v : detail::range_basis(jacobi(r, x), r.mode())) gens.push_back(std::move(v));
  return orthogonal_span_basis(gens, r.mode());
}

template <class S>
struct NamedResidual {
  std::string name;
  S value{0};
};

/// Frame realizing J(x) = diag(A,0,0), J(y) = diag(0,A,0),
/// J(x,y) = 1/2 [[0,A,0],[A,0,0],[0,0,0]] in the basis (e, f, g), plus the
/// residual of every identity checked on the way.
template <class S>
struct BlockStructureReport {
  std::vector<S> lambdas;  // diagonal of A, ascending
  std::vector<Vector<S>> e_basis;
  std::vector<Vector<S>> f_basis;  // f_i = 2 J(x,y) e_i / lambda_i
  std::vector<Vector<S>> g_basis;
  std::vector<NamedResidual<S>> residuals;

  S max_residual() const {
    S worst(0);
    for (const auto& r : residuals) worst = std::max<S>(worst, r.value);
    return worst;
  }
};

/// Checks the structure forced on J(x), J(y), J(x,y) by commutation when
/// x, y are orthonormal and J(x)y = 0. With `certified_tsankov` set, any
/// non-negligible residual raises StructureViolation.
///
/// Exact mode requires the nonzero spectrum of J(x) to be a single rational
/// eigenvalue with a rationally normalizable eigenbasis; otherwise
/// NotRationallyRepresentable.
template <class S>
BlockStructureReport<S> block_structure(const CurvatureTensor<S>& r, const Vector<S>& x,
                                        const Vector<S>& y, const ScalarMode& mode,
                                        bool certified_tsankov = false) {
  require_mode<S>(mode);
  detail::check_dim(r, x);
  detail::check_dim(r, y);
  const int m = r.dim();
  const Matrix<S> jx = jacobi(r, x);
  const Matrix<S> jy = jacobi(r, y);
  const Matrix<S> jxy = jacobi_polarized(r, x, y);
  const double op_scale = std::max({1.0, to_double(max_abs(jx)), to_double(max_abs(jy))});

  if (!negligible(S(squared_norm(x) - 1), mode, 1.0)) throw Error(Errc::PreconditionFailed, "x is not unit");
  if (!negligible(S(squared_norm(y) - 1), mode, 1.0)) throw Error(Errc::PreconditionFailed, "y is not unit");
  if (!negligible(dot(x, y), mode, 1.0)) throw Error(Errc::PreconditionFailed, "x and y are not orthogonal");
  if (!negligible(max_abs(Vector<S>(jx * y)), mode, op_scale)) {
    throw Error(Errc::PreconditionFailed, "J(x)y != 0");
  }

  BlockStructureReport<S> rep;
  if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
    const int rank = rank_exact(jx);
    if (rank > 0) {
      const S lambda = jx.trace() / rank;
      if (!(jx * jx == lambda * jx)) {
        throw Error(Errc::NotRationallyRepresentable,
                    "J(x) has more than one nonzero eigenvalue; use Float mode");
      }
      rep.e_basis = detail::range_basis(jx, mode);
      for (const auto& e : rep.e_basis)
        if (squared_norm(e) != 1) {
          throw Error(Errc::NotRationallyRepresentable, "Range(J(x)) has no rational orthonormal basis");
        }
      std::sort(rep.e_basis.begin(), rep.e_basis.end());
      rep.lambdas.assign(rep.e_basis.size(), lambda);
    }
  } else {
    const auto eig = eig_selfadjoint(jx, mode.tol);
    double spectral = 0.0;
    for (double v : eig.values) spectral = std::max(spectral, std::fabs(v));
    for (int k = 0; k < m; ++k)
      if (std::fabs(eig.values[k]) > mode.tol * std::max(1.0, spectral)) {
        rep.lambdas.push_back(eig.values[k]);
        rep.e_basis.push_back(eig.vectors.column(k));
      }
  }
  for (std::size_t i = 0; i < rep.e_basis.size(); ++i) {
    rep.f_basis.push_back(scaled(S(S(2) / rep.lambdas[i]), Vector<S>(jxy * rep.e_basis[i])));
  }

  std::vector<Vector<S>> ef = rep.e_basis;
  ef.insert(ef.end(), rep.f_basis.begin(), rep.f_basis.end());
  const auto span_ef = orthogonal_span_basis(ef, mode);
  rep.g_basis = orthocomplement_basis(span_ef, m, mode);

  auto add = [&](std::string name, const S& value) {
    rep.residuals.push_back({std::move(name), value});
  };
  add("J(y)x", max_abs(Vector<S>(jy * x)));
  add("J(x)J(y)", max_abs(jx * jy));
  add("J(y)^2+J(x)^2-4J(x,y)^2", max_abs(Matrix<S>(jy * jy + jx * jx - S(4) * (jxy * jxy))));
  add("J(x,y)J(x)-J(y)J(x,y)", max_abs(Matrix<S>(jxy * jx - jy * jxy)));
  add("J(x)J(x,y)-J(x,y)J(y)", max_abs(Matrix<S>(jx * jxy - jxy * jy)));

  const std::size_t rk = rep.e_basis.size();
  S ortho(0);
  for (std::size_t i = 0; i < ef.size(); ++i)
    for (std::size_t k = 0; k < ef.size(); ++k) {
      const S want = i == k ? S(1) : S(0);
      ortho = std::max<S>(ortho, abs_value(S(dot(ef[i], ef[k]) - want)));
    }
  add("frame orthonormality", ortho);

  std::vector<Vector<S>> frame = ef;
  frame.insert(frame.end(), rep.g_basis.begin(), rep.g_basis.end());
  const Matrix<S> b = Matrix<S>::from_columns(frame, m);
  const Matrix<S> bt = b.transpose();
  const int n = b.cols();
  Matrix<S> want_x(n, n), want_y(n, n), want_xy(n, n);
  for (std::size_t i = 0; i < rk; ++i) {
    const int ei = static_cast<int>(i);
    const int fi = static_cast<int>(rk + i);
    want_x(ei, ei) = rep.lambdas[i];
    want_y(fi, fi) = rep.lambdas[i];
    want_xy(ei, fi) = rep.lambdas[i] / 2;
    want_xy(fi, ei) = rep.lambdas[i] / 2;
  }
  add("block J(x)", max_abs(Matrix<S>(bt * jx * b - want_x)));
  add("block J(y)", max_abs(Matrix<S>(bt * jy * b - want_y)));
  add("block J(x,y)", max_abs(Matrix<S>(bt * jxy * b - want_xy)));

  if (certified_tsankov) {
    for (const auto& res : rep.residuals)
      if (!negligible(res.value, mode, op_scale * op_scale)) {
        throw Error(Errc::StructureViolation, res.name + " residual " + to_string(res.value));
      }
  }
  return rep;
}

}  // namespace act
