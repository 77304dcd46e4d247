#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "act/curvature_tensor.hpp"
#include "act/jacobi.hpp"
#include "act/tsankov.hpp"

namespace act {

enum class ClassTag { Zero, ConstantCurvature, ComplexForm, NotTsankov };

constexpr std::string_view tag_name(ClassTag t) {
  switch (t) {
    case ClassTag::Zero: return "Zero";
    case ClassTag::ConstantCurvature: return "ConstantCurvature";
    case ClassTag::ComplexForm: return "ComplexForm";
    case ClassTag::NotTsankov: return "NotTsankov";
  }
  return "Unknown";
}

/// Outcome of `classify`. `c` is set for ConstantCurvature and ComplexForm,
/// `theta` for ComplexForm, `witness` for NotTsankov. `residual` is
/// |R - reconstruction| / |R| (max-abs norms) and is 0 for Zero and NotTsankov.
template <class S>
struct Classification {
  ClassTag tag = ClassTag::Zero;
  std::optional<S> c;
  std::optional<ComplexStructure<S>> theta;
  std::optional<Witness<S>> witness;
  S residual{0};
};

template <class S>
struct ComplexRecovery {
  S c;
  ComplexStructure<S> theta;
};

template <class S>
S relative_residual(const CurvatureTensor<S>& r, const CurvatureTensor<S>& approx) {
  const S nrm = r.norm();
  S worst(0);
  auto a = r.components();
  auto b = approx.components();
  for (std::size_t n = 0; n < a.size(); ++n) worst = std::max<S>(worst, abs_value(S(a[n] - b[n])));
  return nrm == 0 ? worst : S(worst / nrm);
}

/// Recovers (c, Theta) with R = c R_Theta from the Jacobi operators alone.
///
/// At a basis vector e_a with rank J(e_a) = 1, J(e_a) = 3c w w^T where
/// w = Theta e_a, which fixes c (trace / 3) and w up to sign. For j != a,
/// J(e_a, e_j) w = (3c/2) Theta e_j because <Theta e_a, Theta e_j> = 0. The
/// overall sign is fixed by making the first nonzero entry of Theta e_0
/// positive.
template <class S>
ComplexRecovery<S> recover_complex_structure(const CurvatureTensor<S>& r, const ScalarMode& mode) {
  require_mode<S>(mode);
  const int m = r.dim();
  if (m % 2 != 0) throw Error(Errc::UnsupportedDimension, "complex structures need even dimension");

  int base = -1;
  Matrix<S> jb;
  for (int a = 0; a < m && base < 0; ++a) {
    Matrix<S> j = jacobi(r, basis_vector<S>(m, a));
    if (rank_with_mode(j, mode) == 1) {
      base = a;
      jb = std::move(j);
    }
  }
  if (base < 0) throw Error(Errc::NotRankOne, "J(e_a) has rank != 1 at every basis vector");

  const S lambda = jb.trace();  // = 3c
  // w_t^2 = J_tt / lambda; take the largest representable one.
  int pivot = -1;
  S pivot_sq(0);
  S pivot_root(0);
  for (int t = 0; t < m; ++t) {
    const S sq = jb(t, t) / lambda;
    if (!(sq > pivot_sq)) continue;
    auto root = scalar_traits<S>::sqrt(sq);
    if (!root) continue;
    pivot = t;
    pivot_sq = sq;
    pivot_root = *root;
  }
  if (pivot < 0) {
    throw Error(Errc::NotRationallyRepresentable, "Theta e_a has no rational representative");
  }
  const Vector<S> w = scaled(S(S(1) / (lambda * pivot_root)), jb.column(pivot));

  Matrix<S> theta(m, m);
  const Vector<S> ea = basis_vector<S>(m, base);
  for (int j = 0; j < m; ++j) {
    const Vector<S> col = j == base
                              ? w
                              : scaled(S(S(2) / lambda), Vector<S>(jacobi_polarized(r, ea, basis_vector<S>(m, j)) * w));
    for (int i = 0; i < m; ++i) theta(i, j) = col[i];
  }
  const double unit = 1.0;
  for (int i = 0; i < m; ++i) {
    if (negligible(theta(i, 0), mode, unit)) continue;
    if (theta(i, 0) < 0) theta *= S(-1);
    break;
  }
  try {
    return {lambda / 3, ComplexStructure<S>::make(std::move(theta), mode)};
  } catch (const Error& e) {
    throw Error(Errc::ClassificationInconsistency, std::string("recovered Theta is invalid: ") + e.what());
  }
}

inline constexpr int kRankProbes = 8;

/// Decides Zero / ConstantCurvature(c) / ComplexForm(c, Theta) / NotTsankov.
///
/// Zero tensors first; then the exact Tsankov decision; then the generic rank
/// of J over up to eight seeded probes: rank m-1 means constant sectional
/// curvature, rank 1 means c R_Theta. Both cases are confirmed by exact (or
/// tol-bounded) reconstruction, and a failed reconstruction after a passing
/// Tsankov test raises ClassificationInconsistency.
template <class S>
Classification<S> classify(const CurvatureTensor<S>& r, const ScalarMode& mode, std::uint64_t seed = 0) {
  require_mode<S>(mode);
  const int m = r.dim();
  if (m < 3) throw Error(Errc::UnsupportedDimension, "classification needs m >= 3");
  Classification<S> out;
  if (negligible(r.norm(), mode, 1.0)) {
    out.tag = ClassTag::Zero;
    return out;
  }
  auto verdict = tsankov_test(r, TsankovMethod::ExactDivisibility, kDefaultSamples, seed);
  if (!verdict.holds) {
    out.tag = ClassTag::NotTsankov;
    out.witness = std::move(verdict.witness);
    return out;
  }

  Rng rng(seed, 0x72616e6b);
  int max_rank = 0;
  for (int probe = 0; probe < kRankProbes && max_rank < m - 1; ++probe) {
    max_rank = std::max(max_rank, jacobi_rank(r, detail::random_probe<S>(m, rng), mode));
  }

  const double unit = 1.0;
  if (max_rank == m - 1) {
    std::optional<S> c;
    for (int i = 0; i < m && !c; ++i)
      for (int j = i + 1; j < m && !c; ++j) {
        const S& sec = r(i, j, j, i);
        if (!negligible(sec, mode, to_double(r.norm()))) c = sec;
      }
    if (!c) throw Error(Errc::ClassificationInconsistency, "full rank Jacobi but no nonzero sectional curvature");
    out.residual = relative_residual(r, r0<S>(m, *c, r.mode()));
    if (!negligible(out.residual, mode, unit)) {
      throw Error(Errc::ClassificationInconsistency, "c R0 reconstruction residual " + to_string(out.residual));
    }
    out.tag = ClassTag::ConstantCurvature;
    out.c = std::move(c);
    return out;
  }
  if (max_rank == 1 && m % 2 == 0) {
    auto rec = recover_complex_structure(r, mode);
    out.residual = relative_residual(r, r_theta(rec.theta, rec.c, r.mode()));
    if (!negligible(out.residual, mode, unit)) {
      throw Error(Errc::ClassificationInconsistency,
                  "c R_Theta reconstruction residual " + to_string(out.residual));
    }
    out.tag = ClassTag::ComplexForm;
    out.c = std::move(rec.c);
    out.theta = std::move(rec.theta);
    return out;
  }
  throw Error(Errc::ClassificationInconsistency,
              "Jacobi-Tsankov tensor with generic rank " + std::to_string(max_rank));
}

template <class S>
Classification<S> classify(const CurvatureTensor<S>& r, std::uint64_t seed = 0) {
  return classify(r, r.mode(), seed);
}

struct OssermanReport {
  bool is_osserman = false;
  std::vector<double> reference_spectrum;
  double max_deviation = 0.0;
  int n_samples = 0;
};

namespace detail {

inline double spectrum_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
  return d;
}

template <class S>
CurvatureTensor<double> as_float(const CurvatureTensor<S>& r, double tol) {
  if constexpr (std::is_same_v<S, double>) {
    return r;
  } else {
    return r.template cast<double>(ScalarMode::floating(tol));
  }
}

template <class S>
double float_tol(const CurvatureTensor<S>& r) {
  return r.mode().is_exact() ? kDefaultTol : r.mode().tol;
}

}  // namespace detail

/// Compares the sorted spectrum of J(x) across seeded unit vectors. Spectra
/// are computed in floating point; the verdict threshold is
/// tol * max(1, largest |eigenvalue| seen).
template <class S>
OssermanReport osserman_check(const CurvatureTensor<S>& r, int n_samples, std::uint64_t seed = 0) {
  if (n_samples < 2) throw Error(Errc::PreconditionFailed, "osserman_check needs n_samples >= 2");
  const double tol = detail::float_tol(r);
  const auto rf = detail::as_float(r, tol);
  Rng rng(seed, 0x6f7373);
  OssermanReport rep;
  rep.n_samples = n_samples;
  double scale = 1.0;
  for (int s = 0; s < n_samples; ++s) {
    const auto x = random_unit_vector<double>(rf.dim(), rng);
    const auto spec = eig_selfadjoint(jacobi(rf, x), tol).values;
    for (double v : spec) scale = std::max(scale, std::fabs(v));
    if (s == 0) {
      rep.reference_spectrum = spec;
    } else {
      rep.max_deviation = std::max(rep.max_deviation, detail::spectrum_distance(spec, rep.reference_spectrum));
    }
  }
  rep.is_osserman = rep.max_deviation <= tol * scale;
  return rep;
}

struct SpectrumSample {
  std::vector<double> x;
  int rank = 0;
  int w_dim = 0;
  std::vector<double> spectrum;  // ascending
};

struct EigenCluster {
  double value = 0.0;
  int multiplicity = 0;
};

struct StructureReport {
  int m = 0;
  bool tsankov = false;
  std::map<int, int> rank_histogram;
  std::vector<SpectrumSample> samples;
  std::vector<std::vector<EigenCluster>> eigen_clusters;  // per sample
  // Only evaluated for nonzero Jacobi-Tsankov tensors of sub-maximal rank:
  // every J(x) has exactly the eigenvalues 0 and one nonzero value.
  std::optional<bool> two_eigenvalue_check;
  // Same case: max spectral distance between J(w) and J(x) for random unit
  // w in W(x).
  std::optional<double> w_similarity_deviation;
};

inline std::vector<EigenCluster> cluster_spectrum(const std::vector<double>& spec, double tol) {
  double scale = 1.0;
  for (double v : spec) scale = std::max(scale, std::fabs(v));
  std::vector<EigenCluster> out;
  for (double v : spec) {
    if (!out.empty() && std::fabs(v - out.back().value) <= tol * scale) {
      ++out.back().multiplicity;
    } else {
      out.push_back({v, 1});
    }
  }
  for (auto& c : out)
    if (std::fabs(c.value) <= tol * scale) c.value = 0.0;
  return out;
}

/// Diagnostics over seeded samples: rank histogram (ranks in the tensor's own
/// arithmetic), spectra and W(x) dimensions, plus the two-eigenvalue and
/// W(x)-similarity checks when the tensor is Tsankov with rank below m-1.
template <class S>
StructureReport structure_report(const CurvatureTensor<S>& r, int n_samples, std::uint64_t seed = 0) {
  if (n_samples < 1) throw Error(Errc::PreconditionFailed, "structure_report needs n_samples >= 1");
  const int m = r.dim();
  const double tol = detail::float_tol(r);
  const auto rf = detail::as_float(r, tol);
  StructureReport rep;
  rep.m = m;
  rep.tsankov = tsankov_test(r, TsankovMethod::ExactDivisibility, kDefaultSamples, seed).holds;
  Rng rng(seed, 0x73747275);
  for (int s = 0; s < n_samples; ++s) {
    const Vector<S> x = random_unit_vector<S>(m, rng);
    SpectrumSample sample;
    for (const auto& v : x) sample.x.push_back(to_double(v));
    sample.rank = jacobi_rank(r, x, r.mode());
    sample.w_dim = static_cast<int>(w_space(r, x).size());
    sample.spectrum = eig_selfadjoint(jacobi(rf, sample.x), tol).values;
    ++rep.rank_histogram[sample.rank];
    rep.eigen_clusters.push_back(cluster_spectrum(sample.spectrum, std::sqrt(tol)));
    rep.samples.push_back(std::move(sample));
  }
  const int max_rank = rep.rank_histogram.rbegin()->first;
  if (rep.tsankov && max_rank > 0 && max_rank < m - 1) {
    bool ok = true;
    for (const auto& clusters : rep.eigen_clusters) {
      const bool has_zero = std::any_of(clusters.begin(), clusters.end(), [](const auto& c) { return c.value == 0.0; });
      ok = ok && clusters.size() == 2 && has_zero;
    }
    rep.two_eigenvalue_check = ok;
    double dev = 0.0;
    for (const auto& sample : rep.samples) {
      const auto basis = w_space(rf, sample.x);
      Vector<double> w(static_cast<std::size_t>(m), 0.0);
      for (const auto& b : basis) w = w + scaled(rng.gaussian(), b);
      if (!normalize_if_possible(w)) continue;
      const auto spec_w = eig_selfadjoint(jacobi(rf, w), tol).values;
      dev = std::max(dev, detail::spectrum_distance(spec_w, sample.spectrum));
    }
    rep.w_similarity_deviation = dev;
  }
  return rep;
}

}  // namespace act
