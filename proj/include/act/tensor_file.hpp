#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "act/curvature_tensor.hpp"

// TensorFile: JSON text
//
//   {"m": 4, "scalar": "rational" | "float", "storage": "sparse" | "dense",
//    "entries": [...], "metric": [[...], ...]   (optional)}
//
// Sparse entries are {"i","j","k","l","v"} objects or [i,j,k,l,v] arrays with
// 0-based indices; each one is expanded to its orbit under the curvature
// symmetries. Dense entries are the m^4 values in row-major [i][j][k][l] order.
// Values are JSON integers or strings holding an integer, "p/q", or a decimal
// (with optional exponent). Float files may also use JSON numbers. When
// "metric" is present the components refer to a basis with that Gram matrix
// and are re-expressed in an orthonormal frame on load.

namespace act {

enum class Storage { Sparse, Dense };

using AnyTensor = std::variant<CurvatureTensor<Rational>, CurvatureTensor<double>>;

template <class S>
struct RawTensor {
  int m = 0;
  std::vector<S> components;
  std::optional<Matrix<S>> metric;
};

using AnyRawTensor = std::variant<RawTensor<Rational>, RawTensor<double>>;

/// The 8 index tuples related to (i,j,k,l) by pair exchange and the two
/// antisymmetries, with the sign each one picks up.
inline std::array<std::pair<IndexTuple, int>, 8> symmetry_orbit(const IndexTuple& t) {
  const auto [i, j, k, l] = t;
  return {{{{i, j, k, l}, 1},
           {{j, i, k, l}, -1},
           {{i, j, l, k}, -1},
           {{j, i, l, k}, 1},
           {{k, l, i, j}, 1},
           {{l, k, i, j}, -1},
           {{k, l, j, i}, -1},
           {{l, k, j, i}, 1}}};
}

namespace detail {

inline int line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

[[noreturn]] inline void format_error(const std::string& what) { throw Error(Errc::FormatError, what); }

template <class S>
S json_scalar(const nlohmann::json& v, const std::string& where) {
  try {
    if (v.is_string()) return parse_scalar<S>(v.get<std::string>());
    if (v.is_number_integer()) return scalar_traits<S>::from_int(v.get<long>());
    if (v.is_number_float()) {
      if constexpr (scalar_traits<S>::kind == ScalarKind::Float) return v.get<double>();
      format_error(where + ": rational values must be integers or strings");
    }
  } catch (const Error& e) {
    if (e.code() == Errc::FormatError) format_error(where + ": " + e.what());
    throw;
  }
  format_error(where + ": expected a number or numeric string");
}

inline int json_index(const nlohmann::json& v, int m, const std::string& where) {
  if (!v.is_number_integer()) format_error(where + ": index must be an integer");
  const long i = v.get<long>();
  if (i < 0 || i >= m) format_error(where + ": index " + std::to_string(i) + " out of range");
  return static_cast<int>(i);
}

template <class S>
RawTensor<S> read_entries(const nlohmann::json& doc, int m, bool dense) {
  RawTensor<S> out;
  out.m = m;
  const std::size_t n = static_cast<std::size_t>(m) * m * m * m;
  out.components.assign(n, S(0));
  if (!doc.contains("entries") || !doc["entries"].is_array()) format_error("missing array 'entries'");
  const auto& entries = doc["entries"];
  auto offset = [m](const IndexTuple& t) { return static_cast<std::size_t>(((t[0] * m + t[1]) * m + t[2]) * m + t[3]); };

  if (dense) {
    if (entries.size() != n) {
      format_error("dense storage needs " + std::to_string(n) + " entries, got " + std::to_string(entries.size()));
    }
    for (std::size_t p = 0; p < n; ++p) out.components[p] = json_scalar<S>(entries[p], "entries[" + std::to_string(p) + "]");
  } else {
    std::vector<char> assigned(n, 0);
    for (std::size_t p = 0; p < entries.size(); ++p) {
      const std::string where = "entries[" + std::to_string(p) + "]";
      const auto& e = entries[p];
      IndexTuple t{};
      S v;
      if (e.is_object()) {
        static constexpr std::array<const char*, 4> keys{"i", "j", "k", "l"};
        for (int a = 0; a < 4; ++a) {
          if (!e.contains(keys[a])) format_error(where + ": missing '" + keys[a] + "'");
          t[a] = json_index(e[keys[a]], m, where);
        }
        if (!e.contains("v")) format_error(where + ": missing 'v'");
        v = json_scalar<S>(e["v"], where);
      } else if (e.is_array() && e.size() == 5) {
        for (int a = 0; a < 4; ++a) t[a] = json_index(e[a], m, where);
        v = json_scalar<S>(e[4], where);
      } else {
        format_error(where + ": expected {i,j,k,l,v} or [i,j,k,l,v]");
      }
      for (const auto& [u, sign] : symmetry_orbit(t)) {
        const std::size_t off = offset(u);
        const S want = sign > 0 ? v : S(-v);
        if (assigned[off] && out.components[off] != want) {
          throw Error(Errc::ConflictingEntry, where + " " + format_indices(t) + " forces " + format_indices(u) + " = " +
                                                  to_string(want) + " but it is " + to_string(out.components[off]));
        }
        assigned[off] = 1;
        out.components[off] = want;
      }
    }
  }

  if (doc.contains("metric")) {
    const auto& g = doc["metric"];
    if (!g.is_array() || g.size() != static_cast<std::size_t>(m)) format_error("'metric' must be an m x m array");
    Matrix<S> gram(m, m);
    for (int a = 0; a < m; ++a) {
      if (!g[a].is_array() || g[a].size() != static_cast<std::size_t>(m)) format_error("'metric' must be an m x m array");
      for (int b = 0; b < m; ++b) gram(a, b) = json_scalar<S>(g[a][b], "metric[" + std::to_string(a) + "][" + std::to_string(b) + "]");
    }
    out.metric = std::move(gram);
  }
  return out;
}

}  // namespace detail

/// Parses a TensorFile and completes sparse orbits, without checking the
/// Bianchi identity. Throws FormatError or ConflictingEntry.
inline AnyRawTensor parse_tensor_raw(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::FormatError, "line " + std::to_string(detail::line_of(text, e.byte)) + ": malformed JSON");
  }
  if (!doc.is_object()) detail::format_error("line 1: top level must be an object");
  if (!doc.contains("m") || !doc["m"].is_number_integer()) detail::format_error("missing integer 'm'");
  const long m = doc["m"].get<long>();
  if (m < 2 || m > 64) detail::format_error("'m' must lie in [2, 64]");
  const std::string scalar = doc.value("scalar", std::string("rational"));
  const std::string storage = doc.value("storage", std::string("sparse"));
  if (storage != "sparse" && storage != "dense") detail::format_error("unknown storage '" + storage + "'");
  const bool dense = storage == "dense";
  if (scalar == "rational") return detail::read_entries<Rational>(doc, static_cast<int>(m), dense);
  if (scalar == "float") return detail::read_entries<double>(doc, static_cast<int>(m), dense);
  detail::format_error("unknown scalar '" + scalar + "'");
}

template <class S>
CurvatureTensor<S> realize(RawTensor<S> raw, const ScalarMode& mode) {
  auto r = CurvatureTensor<S>::from_components(raw.m, std::move(raw.components), mode);
  if (raw.metric) r = to_orthonormal_frame(r, *raw.metric);
  return r;
}

/// Parses and validates a TensorFile. Float tensors get tolerance `tol`.
inline AnyTensor parse_tensor(std::string_view text, double tol = kDefaultTol) {
  auto raw = parse_tensor_raw(text);
  if (auto* q = std::get_if<RawTensor<Rational>>(&raw)) return realize(std::move(*q), ScalarMode::exact());
  return realize(std::move(std::get<RawTensor<double>>(raw)), ScalarMode::floating(tol));
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::FormatError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline AnyTensor load_tensor(const std::string& path, double tol = kDefaultTol) {
  return parse_tensor(read_text_file(path), tol);
}

/// Serializes `r`. Sparse output lists one entry per nonzero symmetry orbit
/// (its lexicographically smallest tuple) in ascending order, so dumps are
/// canonical and reload to the identical tensor.
template <class S>
std::string dump_tensor(const CurvatureTensor<S>& r, Storage storage = Storage::Sparse) {
  const int m = r.dim();
  std::ostringstream os;
  os << "{\n  \"m\": " << m << ",\n  \"scalar\": \""
     << (scalar_traits<S>::kind == ScalarKind::ExactRational ? "rational" : "float") << "\",\n  \"storage\": \""
     << (storage == Storage::Sparse ? "sparse" : "dense") << "\",\n  \"entries\": [";
  bool first = true;
  if (storage == Storage::Sparse) {
    for (std::uint32_t n : r.nonzero_offsets()) {
      const IndexTuple t = r.unflatten(n);
      bool canonical = true;
      for (const auto& orbit_entry : symmetry_orbit(t)) canonical = canonical && !(orbit_entry.first < t);
      if (!canonical) continue;
      os << (first ? "\n" : ",\n") << "    {\"i\": " << t[0] << ", \"j\": " << t[1] << ", \"k\": " << t[2]
         << ", \"l\": " << t[3] << ", \"v\": \"" << to_string(r.components()[n]) << "\"}";
      first = false;
    }
  } else {
    const auto comps = r.components();
    for (std::size_t n = 0; n < comps.size(); ++n) {
      os << (n == 0 ? "\n    " : n % static_cast<std::size_t>(m) == 0 ? ",\n    " : ", ") << '"' << to_string(comps[n])
         << '"';
    }
    first = comps.empty();
  }
  os << (first ? "]" : "\n  ]") << "\n}\n";
  return os.str();
}

template <class S>
void save_tensor(const std::string& path, const CurvatureTensor<S>& r, Storage storage = Storage::Sparse) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::FormatError, "cannot write '" + path + "'");
  out << dump_tensor(r, storage);
}

}  // namespace act
