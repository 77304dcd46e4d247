#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <type_traits>

#include "act/error.hpp"

namespace act {

using Rational = mpq_class;

inline constexpr double kDefaultTol = 1e-9;

enum class ScalarKind { ExactRational, Float };

// Arithmetic backend selector. `tol` only matters for Float; exact
// comparisons never look at it.
struct ScalarMode {
  ScalarKind kind = ScalarKind::ExactRational;
  double tol = kDefaultTol;

  static ScalarMode exact() { return {ScalarKind::ExactRational, kDefaultTol}; }
  static ScalarMode floating(double tol = kDefaultTol) {
    if (!(tol > 0.0)) throw Error(Errc::InvalidMode, "Float tolerance must be positive");
    return {ScalarKind::Float, tol};
  }

  bool is_exact() const noexcept { return kind == ScalarKind::ExactRational; }
  friend bool operator==(const ScalarMode&, const ScalarMode&) = default;
};

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<double> {
  static constexpr ScalarKind kind = ScalarKind::Float;

  static double from_int(long v) { return static_cast<double>(v); }
  static double from_ratio(long num, long den) {
    return static_cast<double>(num) / static_cast<double>(den);
  }
  static double abs(double v) { return std::fabs(v); }
  static double to_double(double v) { return v; }

  static std::optional<double> sqrt(double v) {
    if (v < 0.0) return std::nullopt;
    return std::sqrt(v);
  }

  // Shortest representation that reads back bit-identically.
  static std::string to_string(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
  }

  static double parse(std::string_view text) {
    std::string s(text);
    if (auto slash = s.find('/'); slash != std::string::npos) {
      return parse(s.substr(0, slash)) / parse(s.substr(slash + 1));
    }
    const char* first = s.data();
    if (!s.empty() && s.front() == '+') ++first;
    double out = 0.0;
    auto res = std::from_chars(first, s.data() + s.size(), out);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      throw Error(Errc::FormatError, "not a number: '" + s + "'");
    }
    return out;
  }
};

template <>
struct scalar_traits<Rational> {
  static constexpr ScalarKind kind = ScalarKind::ExactRational;

  static Rational from_int(long v) { return Rational(v); }
  static Rational from_ratio(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  static Rational abs(const Rational& v) { return ::abs(v); }
  static double to_double(const Rational& v) { return v.get_d(); }

  // Rational square root, present only when numerator and denominator are
  // both perfect squares.
  static std::optional<Rational> sqrt(const Rational& v) {
    if (sgn(v) < 0) return std::nullopt;
    const mpz_class& num = v.get_num();
    const mpz_class& den = v.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t())) {
      return std::nullopt;
    }
    Rational r(::sqrt(num), ::sqrt(den));
    r.canonicalize();
    return r;
  }

  static std::string to_string(const Rational& v) { return v.get_str(); }

  // Accepts "p/q", integers, and decimals with optional exponent; decimals
  // are converted exactly (0.1 is 1/10, not the nearest double).
  static Rational parse(std::string_view text) {
    std::string s(text);
    auto fail = [&] { return Error(Errc::FormatError, "not a rational: '" + s + "'"); };
    if (s.empty()) throw fail();
    if (s.find('/') != std::string::npos) {
      Rational q;
      std::string t = s.front() == '+' ? s.substr(1) : s;
      if (q.set_str(t, 10) != 0 || q.get_den() == 0) throw fail();
      q.canonicalize();
      return q;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (s[pos] == '+' || s[pos] == '-') negative = s[pos++] == '-';
    std::string digits;
    long frac_digits = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < s.size(); ++pos) {
      char ch = s[pos];
      if (ch >= '0' && ch <= '9') {
        digits.push_back(ch);
        any_digit = true;
        if (seen_point) ++frac_digits;
      } else if (ch == '.' && !seen_point) {
        seen_point = true;
      } else {
        break;
      }
    }
    if (!any_digit) throw fail();
    long exponent = 0;
    if (pos < s.size()) {
      if (s[pos] != 'e' && s[pos] != 'E') throw fail();
      ++pos;
      std::string_view rest(s.data() + pos, s.size() - pos);
      if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
      auto res = std::from_chars(rest.data(), rest.data() + rest.size(), exponent);
      if (rest.empty() || res.ec != std::errc() || res.ptr != rest.data() + rest.size()) {
        throw fail();
      }
      if (exponent > 100000 || exponent < -100000) throw fail();
    }
    mpz_class num(digits, 10);
    long shift = exponent - frac_digits;
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
    Rational q = shift >= 0 ? Rational(num * power) : Rational(num, power);
    q.canonicalize();
    return negative ? Rational(-q) : q;
  }
};

template <class S>
ScalarMode default_mode() {
  return scalar_traits<S>::kind == ScalarKind::Float ? ScalarMode::floating()
                                                      : ScalarMode::exact();
}

// Rejects a mode whose kind disagrees with the compile-time scalar.
template <class S>
void require_mode(const ScalarMode& mode) {
  if (mode.kind != scalar_traits<S>::kind) {
    throw Error(Errc::InvalidMode, "scalar mode does not match the tensor's arithmetic");
  }
  if (mode.kind == ScalarKind::Float && !(mode.tol > 0.0)) {
    throw Error(Errc::InvalidMode, "Float tolerance must be positive");
  }
}

/// Zero test used throughout: exact equality for rationals, `|v| <= tol*scale`
/// for floats.
template <class S>
bool negligible(const S& v, const ScalarMode& mode, double scale) {
  if constexpr (scalar_traits<S>::kind == ScalarKind::ExactRational) {
    return sgn(v) == 0;
  } else {
    return std::fabs(v) <= mode.tol * scale;
  }
}

template <class S>
std::string to_string(const S& v) {
  return scalar_traits<S>::to_string(v);
}

template <class S>
S parse_scalar(std::string_view text) {
  return scalar_traits<S>::parse(text);
}

template <class S>
double to_double(const S& v) {
  return scalar_traits<S>::to_double(v);
}

template <class S>
S abs_value(const S& v) {
  return scalar_traits<S>::abs(v);
}

template <class To, class From>
To scalar_cast(const From& v) {
  if constexpr (std::is_same_v<To, From>) {
    return v;
  } else if constexpr (std::is_same_v<To, double>) {
    return to_double(v);
  } else {
    return Rational(v);
  }
}

}  // namespace act
