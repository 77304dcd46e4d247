#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "act/curvature_tensor.hpp"
#include "act/jacobi.hpp"
#include "act/random.hpp"

namespace act {

/// Index of the quadratic monomial v_i v_j (i <= j) in lexicographic order of
/// (i, j). Lexicographic order of (px, py) is then the lex order of
/// (i, j, k, l), i.e. descending lex monomial order with x_0 > ... > y_0 > ...
class PairIndex {
 public:
  explicit PairIndex(int m) : m_(m) {
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) pairs_.emplace_back(i, j);
  }

  int dim() const noexcept { return m_; }
  int count() const noexcept { return static_cast<int>(pairs_.size()); }

  int operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    return i * m_ - i * (i - 1) / 2 + (j - i);
  }

  std::pair<int, int> at(int p) const { return pairs_[static_cast<std::size_t>(p)]; }

 private:
  int m_;
  std::vector<std::pair<int, int>> pairs_;
};

/// One term of a matrix-valued polynomial in (x, y), given by exponent
/// vectors; input format for `BiQuadraticMatrixPoly::from_terms`.
template <class S>
struct MonomialTerm {
  int row = 0;
  int col = 0;
  std::vector<int> x_exponents;
  std::vector<int> y_exponents;
  S coeff{0};
};

/// m x m matrix whose entries are bihomogeneous polynomials of bidegree (2,2)
/// in (x, y). Coefficients are stored densely per entry on the canonical
/// monomials x_i x_j y_k y_l (i <= j, k <= l).
template <class S>
class BiQuadraticMatrixPoly {
 public:
  explicit BiQuadraticMatrixPoly(int m)
      : pairs_(m), coeffs_(static_cast<std::size_t>(m) * m * pairs_.count() * pairs_.count(), S(0)) {}

  /// Rejects any term whose degree in x or in y is not exactly 2.
  static BiQuadraticMatrixPoly from_terms(int m, const std::vector<MonomialTerm<S>>& terms) {
    BiQuadraticMatrixPoly p(m);
    for (const auto& t : terms) {
      if (t.row < 0 || t.row >= m || t.col < 0 || t.col >= m ||
          static_cast<int>(t.x_exponents.size()) != m || static_cast<int>(t.y_exponents.size()) != m) {
        throw Error(Errc::InvalidPolynomial, "term does not fit an m x m matrix in 2m variables");
      }
      auto expand = [](const std::vector<int>& e) {
        std::vector<int> idx;
        for (std::size_t v = 0; v < e.size(); ++v) {
          if (e[v] < 0) throw Error(Errc::InvalidPolynomial, "negative exponent");
          for (int c = 0; c < e[v]; ++c) idx.push_back(static_cast<int>(v));
        }
        return idx;
      };
      const auto xi = expand(t.x_exponents);
      const auto yi = expand(t.y_exponents);
      if (xi.size() != 2 || yi.size() != 2) {
        throw Error(Errc::InvalidPolynomial, "polynomial is not bihomogeneous of bidegree (2,2)");
      }
      p.add_term(t.row, t.col, xi[0], xi[1], yi[0], yi[1], t.coeff);
    }
    return p;
  }

  int dim() const noexcept { return pairs_.dim(); }
  const PairIndex& pairs() const noexcept { return pairs_; }

  S& coeff(int a, int b, int px, int py) { return coeffs_[offset(a, b, px, py)]; }
  const S& coeff(int a, int b, int px, int py) const { return coeffs_[offset(a, b, px, py)]; }

  /// Adds v * x_i x_j y_k y_l to entry (a, b).
  void add_term(int a, int b, int i, int j, int k, int l, const S& v) {
    coeff(a, b, pairs_(i, j), pairs_(k, l)) += v;
  }

  Matrix<S> evaluate(const Vector<S>& x, const Vector<S>& y) const {
    const int m = dim();
    if (static_cast<int>(x.size()) != m || static_cast<int>(y.size()) != m) {
      throw Error(Errc::IncompatibleTensors, "vector dimension mismatch");
    }
    const int np = pairs_.count();
    std::vector<S> xm(static_cast<std::size_t>(np)), ym(static_cast<std::size_t>(np));
    for (int p = 0; p < np; ++p) {
      const auto [i, j] = pairs_.at(p);
      xm[p] = x[i] * x[j];
      ym[p] = y[i] * y[j];
    }
    Matrix<S> out(m, m);
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b) {
        S acc(0);
        for (int px = 0; px < np; ++px) {
          if (xm[px] == 0) continue;
          S inner(0);
          for (int py = 0; py < np; ++py) {
            const S& c = coeff(a, b, px, py);
            if (c != 0) inner += c * ym[py];
          }
          acc += xm[px] * inner;
        }
        out(a, b) = acc;
      }
    return out;
  }

  S max_abs() const { return act::max_abs(coeffs_); }
  bool is_zero() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(), [](const S& c) { return c == 0; });
  }

  friend bool operator==(const BiQuadraticMatrixPoly& p, const BiQuadraticMatrixPoly& q) {
    return p.dim() == q.dim() && p.coeffs_ == q.coeffs_;
  }

 private:
  std::size_t offset(int a, int b, int px, int py) const {
    const std::size_t np = static_cast<std::size_t>(pairs_.count());
    return ((static_cast<std::size_t>(a) * dim() + b) * np + px) * np + py;
  }

  PairIndex pairs_;
  std::vector<S> coeffs_;
};

/// m x m matrix of bilinear forms sum L[a][b][j][l] x_j y_l; the quotient of
/// a commutator polynomial by the pairing <x,y>.
template <class S>
class BilinearMatrixPoly {
 public:
  explicit BilinearMatrixPoly(int m)
      : m_(m), coeffs_(static_cast<std::size_t>(m) * m * m * m, S(0)) {}

  int dim() const noexcept { return m_; }
  S& coeff(int a, int b, int j, int l) { return coeffs_[offset(a, b, j, l)]; }
  const S& coeff(int a, int b, int j, int l) const { return coeffs_[offset(a, b, j, l)]; }

  /// <x,y> * this, expanded into canonical bidegree (2,2) coefficients.
  BiQuadraticMatrixPoly<S> multiplied_by_pairing() const {
    BiQuadraticMatrixPoly<S> out(m_);
    for (int a = 0; a < m_; ++a)
      for (int b = 0; b < m_; ++b)
        for (int j = 0; j < m_; ++j)
          for (int l = 0; l < m_; ++l) {
            const S& c = coeff(a, b, j, l);
            if (c == 0) continue;
            for (int p = 0; p < m_; ++p) out.add_term(a, b, j, p, l, p, c);
          }
    return out;
  }

  friend bool operator==(const BilinearMatrixPoly& p, const BilinearMatrixPoly& q) {
    return p.m_ == q.m_ && p.coeffs_ == q.coeffs_;
  }

 private:
  std::size_t offset(int a, int b, int j, int l) const {
    return static_cast<std::size_t>(((a * m_ + b) * m_ + j) * m_ + l);
  }

  int m_;
  std::vector<S> coeffs_;
};

/// [J(x), J(y)] = J(x)J(y) - J(y)J(x). Since both factors are symmetric the
/// second product is the transpose of the first.
template <class S>
Matrix<S> commutator(const CurvatureTensor<S>& r, const Vector<S>& x, const Vector<S>& y) {
  const Matrix<S> p = jacobi(r, x) * jacobi(r, y);
  return p - p.transpose();
}

/// max|[J(x),J(y)]_ab| / (|x|^2 |y|^2): the commutator norm at the unit
/// vectors along x and y. Rational in exact mode.
template <class S>
S normalized_commutator_norm(const CurvatureTensor<S>& r, const Vector<S>& x, const Vector<S>& y) {
  const S denom = squared_norm(x) * squared_norm(y);
  if (denom == 0) throw Error(Errc::DegenerateInput, "witness vectors must be nonzero");
  return max_abs(commutator(r, x, y)) / denom;
}

/// Symbolic commutator C(x,y) = J(x)J(y) - J(y)J(x). Built from the quadratic
/// forms J(x)_ac = sum_{i<=j} q^{ac}_{ij} x_i x_j; only a < b entries are
/// expanded, the rest follow from antisymmetry of the commutator.
template <class S>
BiQuadraticMatrixPoly<S> commutator_poly(const CurvatureTensor<S>& r) {
  const int m = r.dim();
  BiQuadraticMatrixPoly<S> out(m);
  const PairIndex& pairs = out.pairs();
  // q[a*m + c] = sparse list of (pair index, coefficient)
  std::vector<std::vector<std::pair<int, S>>> q(static_cast<std::size_t>(m) * m);
  {
    std::vector<S> dense(static_cast<std::size_t>(m) * m * pairs.count(), S(0));
    for (std::uint32_t n : r.nonzero_offsets()) {
      const auto [c, i, j, a] = r.unflatten(n);  // contributes x_i x_j to J(x)_ac
      dense[(static_cast<std::size_t>(a) * m + c) * pairs.count() + pairs(i, j)] += r.components()[n];
    }
    for (int ac = 0; ac < m * m; ++ac)
      for (int p = 0; p < pairs.count(); ++p) {
        const S& v = dense[static_cast<std::size_t>(ac) * pairs.count() + p];
        if (v != 0) q[ac].emplace_back(p, v);
      }
  }
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        const auto& left = q[static_cast<std::size_t>(a) * m + c];
        const auto& right = q[static_cast<std::size_t>(c) * m + b];
        for (const auto& [pl, vl] : left)
          for (const auto& [pr, vr] : right) {
            const S prod = vl * vr;
            out.coeff(a, b, pl, pr) += prod;  // J(x)_ac J(y)_cb
            out.coeff(a, b, pr, pl) -= prod;  // J(y)_ac J(x)_cb
          }
      }
  const int np = pairs.count();
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b)
      for (int px = 0; px < np; ++px)
        for (int py = 0; py < np; ++py) out.coeff(b, a, px, py) = -out.coeff(a, b, px, py);
  return out;
}

/// Exact ideal-membership test for the principal ideal (<x,y>).
///
/// A single polynomial is a Groebner basis of the ideal it generates, so
/// multivariate division by <x,y> (leading term x_0 y_0 in the lex order of
/// PairIndex) leaves a zero remainder iff the entry is divisible. Each
/// division step solves for one unknown coefficient of the quotient, which is
/// back-substitution in the triangular linear system P = <x,y> * L.
/// `scale` sets the Float threshold tol * scale (default: max|coeff|).
template <class S>
std::optional<BilinearMatrixPoly<S>> divisible_by_pairing(const BiQuadraticMatrixPoly<S>& poly,
                                                          const ScalarMode& mode,
                                                          std::optional<double> scale = std::nullopt) {
  require_mode<S>(mode);
  const int m = poly.dim();
  const PairIndex& pairs = poly.pairs();
  const int np = pairs.count();
  const double threshold_scale = scale ? *scale : std::max(1.0, to_double(poly.max_abs()));
  BilinearMatrixPoly<S> quotient(m);
  std::vector<S> work(static_cast<std::size_t>(np) * np);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      for (int px = 0; px < np; ++px)
        for (int py = 0; py < np; ++py) work[static_cast<std::size_t>(px) * np + py] = poly.coeff(a, b, px, py);
      for (int px = 0; px < np; ++px) {
        const auto [i, j] = pairs.at(px);
        for (int py = 0; py < np; ++py) {
          const S c = work[static_cast<std::size_t>(px) * np + py];
          if (negligible(c, mode, threshold_scale)) continue;
          const auto [k, l] = pairs.at(py);
          // Leading term must be a multiple of x_0 y_0, else it lands in the
          // (unique, nonzero) remainder.
          if (i != 0 || k != 0) return std::nullopt;
          quotient.coeff(a, b, j, l) = c;
          for (int p = 0; p < m; ++p) {
            work[static_cast<std::size_t>(pairs(j, p)) * np + pairs(l, p)] -= c;
          }
        }
      }
    }
  return quotient;
}

enum class TsankovMethod { ExactDivisibility, Sampled, CoefficientExpansion };

constexpr std::string_view method_name(TsankovMethod m) {
  switch (m) {
    case TsankovMethod::ExactDivisibility: return "ExactDivisibility";
    case TsankovMethod::Sampled: return "Sampled";
    case TsankovMethod::CoefficientExpansion: return "CoefficientExpansion";
  }
  return "Unknown";
}

/// Pair (x, y) with [J(x), J(y)] != 0. In Float mode x and y are unit; in
/// exact mode they are rational direction vectors (the condition is
/// scale-invariant). `commutator_norm` is always the normalized value.
template <class S>
struct Witness {
  Vector<S> x;
  Vector<S> y;
  S commutator_norm{0};
};

template <class S>
struct TsankovVerdict {
  bool holds = false;
  std::optional<Witness<S>> witness;
  TsankovMethod method = TsankovMethod::ExactDivisibility;
  std::optional<BilinearMatrixPoly<S>> quotient;  // ExactDivisibility only
};

inline constexpr int kDefaultSamples = 200;

namespace detail {

template <class S>
double commutator_scale(const CurvatureTensor<S>& r) {
  const double n = to_double(r.norm());
  return std::max(n * n, std::numeric_limits<double>::min());
}

// Random y in x^perp. Exact: integer vector (x.x) z - (x.z) x. Float: random
// unit combination of orthocomplement_basis({x}).
template <class S>
Vector<S> random_orthogonal_to(const Vector<S>& x, Rng& rng, const ScalarMode& mode) {
  const int m = static_cast<int>(x.size());
  while (true) {
    if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
      const Vector<S> z = random_vector<S>(m, rng);
      Vector<S> y = scaled(squared_norm(x), z) - scaled(dot(x, z), x);
      if (!is_zero_vector(y)) return y;
    } else {
      const auto comp = orthocomplement_basis(std::vector<Vector<S>>{x}, m, mode);
      Vector<S> y(static_cast<std::size_t>(m), 0.0);
      for (const auto& c : comp) y = y + scaled(rng.gaussian(), c);
      if (normalize_if_possible(y)) return y;
    }
  }
}

template <class S>
Vector<S> random_probe(int m, Rng& rng) {
  if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
    return random_vector<S>(m, rng);
  } else {
    return random_unit_vector<S>(m, rng);
  }
}

template <class S>
Vector<S> unit_if_float(Vector<S> v) {
  if constexpr (scalar_traits<S>::kind == ScalarKind::Float) normalize_if_possible(v);
  return v;
}

// Largest normalized commutator over a deterministic candidate list built from
// basis vectors followed by `random_pairs` seeded random pairs.
template <class S>
std::optional<Witness<S>> search_witness(const CurvatureTensor<S>& r, bool orthogonal,
                                         std::uint64_t seed, int random_pairs) {
  const int m = r.dim();
  const ScalarMode& mode = r.mode();
  const double thresh_scale = commutator_scale(r);
  std::optional<Witness<S>> best;
  auto consider = [&](Vector<S> x, Vector<S> y) {
    x = unit_if_float(std::move(x));
    y = unit_if_float(std::move(y));
    S n = normalized_commutator_norm(r, x, y);
    if (negligible(n, mode, thresh_scale)) return;
    if (!best || n > best->commutator_norm) best = Witness<S>{std::move(x), std::move(y), std::move(n)};
  };
  auto e = [&](int i) { return basis_vector<S>(m, i); };
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      if (i == j) continue;
      if (orthogonal) {
        consider(e(i), e(j));
        for (int k = j + 1; k < m; ++k) {
          if (k == i) continue;
          consider(e(i), e(j) + e(k));
          consider(e(i), e(j) - e(k));
        }
      } else if (i < j) {
        consider(e(i), e(j));
        consider(e(i), e(i) + e(j));
      }
    }
  Rng rng(seed, 0x77697473);
  for (int s = 0; s < random_pairs || (!best && s < 50 * random_pairs); ++s) {
    Vector<S> x = random_probe<S>(m, rng);
    Vector<S> y = orthogonal ? random_orthogonal_to(x, rng, mode) : random_probe<S>(m, rng);
    consider(std::move(x), std::move(y));
  }
  return best;
}

}  // namespace detail

/// Decides whether J(x) and J(y) commute for all x, y. Holds iff every
/// coefficient of the commutator polynomial vanishes (Float: within
/// tol * |R|^2); otherwise carries the largest sampled violator.
template <class S>
TsankovVerdict<S> full_commutation_test(const CurvatureTensor<S>& r, std::uint64_t seed = 0) {
  TsankovVerdict<S> v;
  v.method = TsankovMethod::CoefficientExpansion;
  const auto poly = commutator_poly(r);
  v.holds = negligible(poly.max_abs(), r.mode(), detail::commutator_scale(r));
  if (!v.holds) {
    v.witness = detail::search_witness(r, /*orthogonal=*/false, seed, 16);
    if (!v.witness) throw Error(Errc::StructureViolation, "nonzero commutator polynomial but no witness");
  }
  return v;
}

/// Jacobi-Tsankov test: does x perp y imply [J(x), J(y)] = 0?
///
/// Exact: [J(x),J(y)] vanishes on the quadric <x,y> = 0 iff every entry of
/// the commutator polynomial is divisible by <x,y>; a decision procedure in
/// exact arithmetic. Failing tensors get a witness from `search_witness`.
///
/// Sampled: n_samples pairs (x random, y random in x^perp); holds iff every
/// normalized commutator is negligible, and the lowest-index violator is the
/// witness.
template <class S>
TsankovVerdict<S> tsankov_test(const CurvatureTensor<S>& r, TsankovMethod method,
                               int n_samples = kDefaultSamples, std::uint64_t seed = 0) {
  const ScalarMode& mode = r.mode();
  TsankovVerdict<S> v;
  v.method = method;
  if (method == TsankovMethod::ExactDivisibility) {
    v.quotient = divisible_by_pairing(commutator_poly(r), mode, detail::commutator_scale(r));
    v.holds = v.quotient.has_value();
    if (!v.holds) {
      v.witness = detail::search_witness(r, /*orthogonal=*/true, seed, 32);
      if (!v.witness) throw Error(Errc::StructureViolation, "commutator not divisible by <x,y> but no witness");
    }
    return v;
  }
  if (method != TsankovMethod::Sampled) {
    throw Error(Errc::PreconditionFailed, "tsankov_test supports ExactDivisibility or Sampled");
  }
  if (n_samples < 1) throw Error(Errc::PreconditionFailed, "Sampled mode needs n_samples >= 1");
  const int m = r.dim();
  const double thresh_scale = detail::commutator_scale(r);
  Rng rng(seed, 0x73616d70);
  v.holds = true;
  for (int s = 0; s < n_samples; ++s) {
    Vector<S> x = detail::random_probe<S>(m, rng);
    Vector<S> y = detail::random_orthogonal_to(x, rng, mode);
    S n = normalized_commutator_norm(r, x, y);
    if (!negligible(n, mode, thresh_scale)) {
      v.holds = false;
      v.witness = Witness<S>{std::move(x), std::move(y), std::move(n)};
      break;
    }
  }
  return v;
}

}  // namespace act
