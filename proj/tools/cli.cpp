#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "act/act.hpp"

namespace act::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <class S>
std::string join(const Vector<S>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + to_string(v[i]);
  return s;
}

template <class S>
std::string join_rows(const Matrix<S>& a) {
  std::string s;
  for (int i = 0; i < a.rows(); ++i) {
    if (i) s += ';';
    for (int j = 0; j < a.cols(); ++j) s += (j ? "," : "") + to_string(a(i, j));
  }
  return s;
}

template <class S>
Vector<S> parse_vector(const std::string& text, int m) {
  Vector<S> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(parse_scalar<S>(item));
  if (static_cast<int>(v.size()) != m) {
    throw Error(Errc::IncompatibleTensors, "vector has " + std::to_string(v.size()) + " entries, tensor has m = " +
                                               std::to_string(m));
  }
  return v;
}

double float_tolerance() {
  const char* env = std::getenv("ACT_TOL");
  if (!env) return kDefaultTol;
  double tol = 0.0;
  try {
    tol = scalar_traits<double>::parse(env);
  } catch (const Error&) {
    throw UsageError(std::string("ACT_TOL is not a number: ") + env);
  }
  if (!(tol > 0.0)) throw UsageError("ACT_TOL must be positive");
  return tol;
}

struct GenOptions {
  std::string type;
  int m = 0;
  std::string c = "1";
  std::string c2 = "1";
  std::uint64_t seed = 0;
  std::string phi;
  int k = 3;
  bool conjugate = false;
  std::string scalar = "rational";
  std::string storage = "sparse";
  std::string output;
};

template <class S>
Matrix<S> read_phi(const std::string& path) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_text_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::FormatError, path + ": malformed JSON at byte " + std::to_string(e.byte));
  }
  if (doc.is_object() && doc.contains("phi")) doc = doc["phi"];
  if (!doc.is_array() || doc.empty()) throw Error(Errc::FormatError, path + ": expected a square array");
  const int m = static_cast<int>(doc.size());
  Matrix<S> phi(m, m);
  for (int i = 0; i < m; ++i) {
    if (!doc[i].is_array() || static_cast<int>(doc[i].size()) != m) {
      throw Error(Errc::FormatError, path + ": expected a square array");
    }
    for (int j = 0; j < m; ++j) {
      const auto& v = doc[i][j];
      if (v.is_string()) {
        phi(i, j) = parse_scalar<S>(v.get<std::string>());
      } else if (v.is_number_integer()) {
        phi(i, j) = scalar_traits<S>::from_int(v.get<long>());
      } else if (v.is_number() && scalar_traits<S>::kind == ScalarKind::Float) {
        phi(i, j) = scalar_cast<S>(v.get<double>());
      } else {
        throw Error(Errc::FormatError, path + ": bad entry at [" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
    }
  }
  return phi;
}

template <class S>
CurvatureTensor<S> generate(const GenOptions& o, const ScalarMode& mode) {
  const S c = parse_scalar<S>(o.c);
  Rng rng(o.seed, 0x67656e);
  int m = o.m;
  if (o.type == "gauss" && !o.phi.empty()) {
    Matrix<S> phi = read_phi<S>(o.phi);
    if (m != 0 && m != phi.rows()) throw Error(Errc::InvalidDimension, "--m disagrees with the --phi matrix");
    return from_form(SymmetricForm<S>::make(std::move(phi), mode), mode).scaled(c);
  }
  if (m < 2) throw UsageError("--m is required (m >= 2)");
  if (o.type == "r0") return r0<S>(m, c, mode);
  if (o.type == "rtheta") {
    auto theta = ComplexStructure<S>::standard(m);
    if (o.conjugate) theta = theta.conjugated(random_orthogonal<S>(m, rng), mode);
    return r_theta(theta, c, mode);
  }
  if (o.type == "combo") {
    const S c2 = parse_scalar<S>(o.c2);
    return combine<S>({{c, r0<S>(m, S(1), mode)}, {c2, r_theta(ComplexStructure<S>::standard(m), S(1), mode)}});
  }
  if (o.type == "gauss") return from_form(SymmetricForm<S>::make(random_symmetric<S>(m, rng), mode), mode).scaled(c);
  if (o.type == "random") return random_act<S>(m, o.k, o.seed, mode);
  throw UsageError("unknown --type '" + o.type + "'");
}

int cmd_gen(const GenOptions& o, std::ostream& out) {
  const Storage storage = o.storage == "dense" ? Storage::Dense : Storage::Sparse;
  std::string text;
  if (o.scalar == "float") {
    text = dump_tensor(generate<double>(o, ScalarMode::floating(float_tolerance())), storage);
  } else {
    text = dump_tensor(generate<Rational>(o, ScalarMode::exact()), storage);
  }
  if (o.output.empty() || o.output == "-") {
    out << text;
  } else {
    std::ofstream f(o.output, std::ios::binary);
    if (!f) throw Error(Errc::FormatError, "cannot write '" + o.output + "'");
    f << text;
  }
  return kOk;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const auto raw = parse_tensor_raw(read_text_file(path));
  const double tol = float_tolerance();
  return std::visit(
      [&](const auto& t) {
        using S = typename std::decay_t<decltype(t.components)>::value_type;
        const ScalarMode mode = scalar_traits<S>::kind == ScalarKind::Float ? ScalarMode::floating(tol) : ScalarMode::exact();
        const auto rep = validate<S>(t.m, t.components, mode);
        out << "m=" << t.m << "\n";
        out << "check,max_violation,at\n";
        out << "pair_exchange," << to_string(rep.pair_exchange) << "," << format_indices(rep.worst_pair_exchange) << "\n";
        out << "antisym_12," << to_string(rep.antisym_12) << "," << format_indices(rep.worst_antisym_12) << "\n";
        out << "antisym_34," << to_string(rep.antisym_34) << "," << format_indices(rep.worst_antisym_34) << "\n";
        out << "bianchi," << to_string(rep.bianchi) << "," << format_indices(rep.worst_bianchi) << "\n";
        out << "accepted=" << (rep.accepted ? "true" : "false") << "\n";
        return rep.accepted ? kOk : kFailure;
      },
      raw);
}

int cmd_jacobi(const AnyTensor& any, const std::string& xs, std::ostream& out) {
  return std::visit(
      [&](const auto& r) {
        using S = typename std::decay_t<decltype(r)>::scalar_type;
        const auto x = parse_vector<S>(xs, r.dim());
        const auto j = jacobi(r, x);
        const double tol = r.mode().is_exact() ? kDefaultTol : r.mode().tol;
        const auto spec = eig_selfadjoint(j.template cast<double>(), tol).values;
        out << "x=" << join(x) << "\n";
        out << "rank=" << jacobi_rank(r, x) << "\n";
        for (int a = 0; a < j.rows(); ++a) out << "J[" << a << "]=" << join(j.column(a)) << "\n";
        out << "spectrum=" << join(spec) << "\n";
        return kOk;
      },
      any);
}

TsankovMethod method_from(const std::string& name) {
  if (name == "exact") return TsankovMethod::ExactDivisibility;
  if (name == "sampled") return TsankovMethod::Sampled;
  throw UsageError("unknown --method '" + name + "'");
}

int cmd_tsankov(const AnyTensor& any, const std::string& method, int samples, std::uint64_t seed, std::ostream& out) {
  const TsankovMethod how = method_from(method);
  return std::visit(
      [&](const auto& r) {
        const auto v = tsankov_test(r, how, samples, seed);
        out << "holds=" << (v.holds ? "true" : "false") << " method=" << method_name(v.method) << "\n";
        if (v.witness) {
          out << "witness_x=" << join(v.witness->x) << " witness_y=" << join(v.witness->y)
              << " comm_norm=" << to_string(v.witness->commutator_norm) << "\n";
        }
        return v.holds ? kOk : kFailure;
      },
      any);
}

int cmd_classify(const AnyTensor& any, std::uint64_t seed, std::ostream& out) {
  return std::visit(
      [&](const auto& r) {
        const auto cls = classify(r, seed);
        out << "tag=" << tag_name(cls.tag);
        if (cls.c) out << " c=" << to_string(*cls.c);
        if (cls.tag != ClassTag::NotTsankov) out << " residual=" << to_string(cls.residual);
        if (cls.witness) {
          out << " witness_x=" << join(cls.witness->x) << " witness_y=" << join(cls.witness->y)
              << " comm_norm=" << to_string(cls.witness->commutator_norm);
        }
        out << "\n";
        if (cls.theta) out << "theta=" << join_rows(cls.theta->matrix()) << "\n";
        return cls.tag == ClassTag::NotTsankov ? kFailure : kOk;
      },
      any);
}

int cmd_osserman(const AnyTensor& any, int samples, std::uint64_t seed, std::ostream& out) {
  const auto rep = std::visit([&](const auto& r) { return osserman_check(r, samples, seed); }, any);
  out << "is_osserman=" << (rep.is_osserman ? "true" : "false") << " samples=" << rep.n_samples
      << " max_deviation=" << to_string(rep.max_deviation) << "\n";
  out << "reference_spectrum=" << join(rep.reference_spectrum) << "\n";
  return kOk;
}

int cmd_report(const AnyTensor& any, int samples, std::uint64_t seed, std::ostream& out) {
  const auto rep = std::visit([&](const auto& r) { return structure_report(r, samples, seed); }, any);
  out << "m=" << rep.m << " samples=" << rep.samples.size() << " tsankov=" << (rep.tsankov ? "true" : "false") << "\n";
  out << "rank_histogram=";
  bool first = true;
  for (const auto& [rank, count] : rep.rank_histogram) {
    out << (first ? "" : ",") << rank << ":" << count;
    first = false;
  }
  out << "\n";
  if (rep.two_eigenvalue_check) out << "two_eigenvalue_check=" << (*rep.two_eigenvalue_check ? "true" : "false") << "\n";
  if (rep.w_similarity_deviation) out << "w_similarity_deviation=" << to_string(*rep.w_similarity_deviation) << "\n";
  out << "\nsample,rank,w_dim";
  for (int i = 0; i < rep.m; ++i) out << ",eig" << i;
  out << "\n";
  for (std::size_t s = 0; s < rep.samples.size(); ++s) {
    const auto& row = rep.samples[s];
    out << s << "," << row.rank << "," << row.w_dim;
    for (double v : row.spectrum) out << "," << to_string(v);
    out << "\n";
  }
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Algebraic curvature tensors: Jacobi operators, commutation test, classification", "act"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a curvature tensor file");
  gen_cmd->add_option("--type", gen.type, "r0 | rtheta | gauss | random | combo")
      ->required()
      ->check(CLI::IsMember({"r0", "rtheta", "gauss", "random", "combo"}));
  gen_cmd->add_option("--m", gen.m, "dimension");
  gen_cmd->add_option("--c", gen.c, "scale factor (integer, p/q or decimal)");
  gen_cmd->add_option("--c2", gen.c2, "combo: coefficient of R_Theta (c multiplies R0)");
  gen_cmd->add_option("--seed", gen.seed, "seed for random types and --conjugate");
  gen_cmd->add_option("--phi", gen.phi, "gauss: JSON file with the symmetric form");
  gen_cmd->add_option("--k", gen.k, "random: number of Gauss terms");
  gen_cmd->add_flag("--conjugate", gen.conjugate, "rtheta: conjugate Theta by a random rational rotation");
  gen_cmd->add_option("--scalar", gen.scalar, "rational | float")->check(CLI::IsMember({"rational", "float"}));
  gen_cmd->add_option("--storage", gen.storage, "sparse | dense")->check(CLI::IsMember({"sparse", "dense"}));
  gen_cmd->add_option("-o,--output", gen.output, "output path (stdout when omitted)");

  std::string file;
  auto add_file = [&](CLI::App* cmd) { cmd->add_option("file", file, "tensor file")->required(); };

  auto* validate_cmd = app.add_subcommand("validate", "print the symmetry violation table");
  add_file(validate_cmd);

  std::string xs;
  auto* jacobi_cmd = app.add_subcommand("jacobi", "print J(x) and its spectrum");
  add_file(jacobi_cmd);
  jacobi_cmd->add_option("--x", xs, "comma separated coordinates")->required();

  std::string method = "exact";
  int samples = kDefaultSamples;
  std::uint64_t seed = 0;
  auto* tsankov_cmd = app.add_subcommand("tsankov", "decide whether J(x), J(y) commute for all x orthogonal to y");
  add_file(tsankov_cmd);
  tsankov_cmd->add_option("--method", method, "exact | sampled")->check(CLI::IsMember({"exact", "sampled"}));
  tsankov_cmd->add_option("--samples", samples, "sampled: number of pairs")->check(CLI::PositiveNumber);
  tsankov_cmd->add_option("--seed", seed, "seed");

  auto* classify_cmd = app.add_subcommand("classify", "classify as Zero, ConstantCurvature, ComplexForm or NotTsankov");
  add_file(classify_cmd);
  classify_cmd->add_option("--seed", seed, "seed for rank probes and witness search");

  int osserman_samples = kDefaultSamples;
  auto* osserman_cmd = app.add_subcommand("osserman", "compare spectra of J(x) over random unit x");
  add_file(osserman_cmd);
  osserman_cmd->add_option("--samples", osserman_samples, "number of unit vectors")->check(CLI::Range(2, 1 << 20));
  osserman_cmd->add_option("--seed", seed, "seed");

  int report_samples = 20;
  auto* report_cmd = app.add_subcommand("report", "rank histogram, spectra and W(x) dimensions as CSV");
  add_file(report_cmd);
  report_cmd->add_option("--samples", report_samples, "number of unit vectors")->check(CLI::PositiveNumber);
  report_cmd->add_option("--seed", seed, "seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n" << app.help();
    return kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*validate_cmd) return cmd_validate(file, out);
    const AnyTensor tensor = load_tensor(file, float_tolerance());
    if (*jacobi_cmd) return cmd_jacobi(tensor, xs, out);
    if (*tsankov_cmd) return cmd_tsankov(tensor, method, samples, seed, out);
    if (*classify_cmd) return cmd_classify(tensor, seed, out);
    if (*osserman_cmd) return cmd_osserman(tensor, osserman_samples, seed, out);
    if (*report_cmd) return cmd_report(tensor, report_samples, seed, out);
  } catch (const UsageError& e) {
    err << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace act::cli
