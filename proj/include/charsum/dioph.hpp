#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "charsum/errors.hpp"
#include "json.hpp"

namespace charsum::dioph {

using i64 = std::int64_t;

struct Convergent {
  i64 b = 0;
  i64 r = 1;
  friend bool operator==(const Convergent&, const Convergent&) = default;
};

struct RationalApprox {
  i64 b = 0;
  i64 r = 1;
  double quality = 0.0;  // |alpha - b/r|
  double M = 0.0;
};

enum class Arc { Minor, MajorNonExceptional, MajorExceptional };

inline std::string to_string(Arc a) {
  switch (a) {
    case Arc::Minor: return "Minor";
    case Arc::MajorNonExceptional: return "MajorNonExceptional";
    case Arc::MajorExceptional: return "MajorExceptional";
  }
  return "?";
}

struct ArcClass {
  Arc tag = Arc::Minor;
  RationalApprox approx;
  double threshold = 0.0;  // ln y
  i64 exceptional_modulus = 1;
  double margin = 0.0;  // |r - ln y|
  std::string M_source;  // "formula", "capped" or "override"
};

namespace detail {

using i128 = __int128;

// Denominators past this are dropped from expansions.
inline constexpr i64 kMaxDenominator = i64{1} << 62;

// alpha = num / 2^shift exactly, with shift clamped at 125 (|alpha| < 2^-70
// is then rounded, which only affects denominators beyond kMaxDenominator).
struct Dyadic {
  i128 num = 0;
  int shift = 0;
};

inline Dyadic exact_dyadic(double alpha) {
  if (!std::isfinite(alpha)) throw DomainError("alpha must be finite");
  if (std::abs(alpha) >= 0x1p62) throw DomainError("|alpha| must be below 2^62");
  int exp = 0;
  const double mant = std::frexp(alpha, &exp);  // alpha = mant * 2^exp, |mant| in [0.5, 1)
  auto m = static_cast<i64>(std::ldexp(mant, 53));
  int shift = 53 - exp;
  while (shift > 0 && (m % 2 == 0) && m != 0) {
    m /= 2;
    --shift;
  }
  if (m == 0) return {0, 0};
  if (shift <= 0) return {static_cast<i128>(m) << (-shift), 0};
  constexpr int kMaxShift = 125;
  if (shift > kMaxShift) {
    const int drop = shift - kMaxShift;
    m = drop >= 63 ? 0 : static_cast<i64>(std::llround(std::ldexp(static_cast<double>(m), -drop)));
    shift = kMaxShift;
  }
  return {m, shift};
}

inline i128 floor_div(i128 a, i128 b) {
  i128 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

}  // namespace detail

/// Convergents of the continued fraction of alpha (taken as the exact value
/// of the double), at most `depth` of them, with strictly increasing
/// denominators. When a_1 = 1 the zeroth convergent shares denominator 1 with
/// the first and is skipped.
inline std::vector<Convergent> continued_fraction(double alpha, int depth) {
  if (depth < 1) throw DomainError("continued_fraction requires depth >= 1");
  using detail::i128;
  const auto [num0, shift] = detail::exact_dyadic(alpha);
  i128 num = num0;
  i128 den = shift == 0 ? 1 : (i128{1} << shift);
  std::vector<Convergent> out;
  // (p, q) = (p_{-1}, q_{-1}) = (1, 0) and (p_prev, q_prev) = (p_{-2}, q_{-2}) = (0, 1).
  i128 p_prev = 0, q_prev = 1, p = 1, q = 0;
  while (true) {
    const i128 a = detail::floor_div(num, den);
    const i128 rem = num - a * den;
    const i128 p_next = a * p + p_prev;
    const i128 q_next = a * q + q_prev;
    if (q_next > detail::kMaxDenominator || p_next > detail::kMaxDenominator ||
        p_next < -detail::kMaxDenominator) {
      break;
    }
    p_prev = p;
    q_prev = q;
    p = p_next;
    q = q_next;
    Convergent c{static_cast<i64>(p), static_cast<i64>(q)};
    if (!out.empty() && out.back().r == c.r) {
      out.back() = c;
    } else {
      out.push_back(c);
    }
    if (rem == 0) break;
    num = den;
    den = rem;
  }
  if (static_cast<int>(out.size()) > depth) out.resize(static_cast<std::size_t>(depth));
  return out;
}

/// b/r with 1 <= r <= M, gcd(b, r) = 1, |alpha - b/r| <= 1/(rM): the last
/// convergent with denominator at most M.
inline RationalApprox dirichlet_approx(double alpha, double M) {
  if (!(M >= 2.0)) throw DomainError("dirichlet_approx requires M >= 2");
  if (M > 1e18) throw DomainError("dirichlet_approx requires M <= 1e18");
  const auto convergents = continued_fraction(alpha, 200);
  Convergent best = convergents.front();  // denominator 1
  for (const auto& c : convergents) {
    if (static_cast<double>(c.r) > M) break;
    best = c;
  }
  const long double q = std::fabs(static_cast<long double>(alpha) -
                                  static_cast<long double>(best.b) / static_cast<long double>(best.r));
  return {best.b, best.r, static_cast<double>(q), M};
}

/// N = min(x, 1/|r alpha - b|), the length scale attached to an approximation.
inline double approx_length(double alpha, const RationalApprox& a, double x) {
  const double d = std::fabs(static_cast<double>(a.r) * alpha - static_cast<double>(a.b));
  return d == 0.0 ? x : std::min(x, 1.0 / d);
}

inline constexpr double kDefaultMCap = 1e12;

/// exp(exp(ln ln y / ln ln ln y)).
inline double approximation_window(double y) {
  if (!(y >= 16.0)) throw DomainError("approximation_window requires y >= 16");
  const double ll = std::log(std::log(y));
  return std::exp(std::exp(ll / std::log(ll)));
}

inline ArcClass classify_arc(double alpha, double y, i64 m,
                             std::optional<double> M_override = std::nullopt) {
  if (!(y >= 16.0)) throw DomainError("classify_arc requires y >= 16");
  if (m < 1) throw DomainError("classify_arc requires an exceptional modulus m >= 1");
  ArcClass out;
  double M = 0.0;
  if (M_override) {
    M = *M_override;
    out.M_source = "override";
  } else {
    const double formula = approximation_window(y);
    M = std::min(formula, kDefaultMCap);
    out.M_source = formula > kDefaultMCap ? "capped" : "formula";
  }
  if (!(M >= 2.0)) throw DomainError("classify_arc: M < 2 for this y");
  out.approx = dirichlet_approx(alpha, M);
  out.threshold = std::log(y);
  out.exceptional_modulus = m;
  const auto r = static_cast<double>(out.approx.r);
  out.margin = std::fabs(r - out.threshold);
  if (r > out.threshold) {
    out.tag = Arc::Minor;
  } else if (out.approx.r % m == 0) {
    out.tag = Arc::MajorExceptional;
  } else {
    out.tag = Arc::MajorNonExceptional;
  }
  return out;
}

inline nlohmann::json to_json(const RationalApprox& a) {
  return {{"b", a.b}, {"r", a.r}, {"quality", a.quality}, {"M", a.M}};
}

inline nlohmann::json to_json(const ArcClass& c, double alpha) {
  return {{"alpha", alpha},
          {"b", c.approx.b},
          {"r", c.approx.r},
          {"quality", c.approx.quality},
          {"M", c.approx.M},
          {"M_source", c.M_source},
          {"arc_tag", to_string(c.tag)},
          {"threshold", c.threshold},
          {"m", c.exceptional_modulus},
          {"margin", c.margin}};
}

}  // namespace charsum::dioph
