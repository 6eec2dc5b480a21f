#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/characters.hpp"
#include "charsum/detail/summation.hpp"
#include "charsum/multfun.hpp"
#include "json.hpp"

namespace charsum::expsums {

using arith::i64;
using arith::u64;
using characters::DirichletCharacter;
using multfun::CMFunction;
using cplx = std::complex<double>;

inline constexpr i64 kSumCap = 10'000'000;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sampled partial sums of one of the module's sums.
struct SumProfile {
  std::string kind;
  nlohmann::json params = nlohmann::json::object();
  std::vector<double> grid;  // t (or n) of each sample
  std::vector<cplx> values;
  double max_abs = 0.0;
  double argmax = 0.0;

  void push(double at, cplx value) {
    grid.push_back(at);
    values.push_back(value);
    if (std::abs(value) > max_abs) {
      max_abs = std::abs(value);
      argmax = at;
    }
  }

  [[nodiscard]] cplx final_value() const {
    return values.empty() ? cplx{} : values.back();
  }
};

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

inline i64 checked_length(double x, const char* what) {
  if (!(x >= 0.0)) throw DomainError(std::string(what) + ": length must be >= 0");
  const i64 cap = std::min(kSumCap, arith::limits().sum_cap);
  if (x > static_cast<double>(cap)) {
    throw CapExceeded(std::string(what) + ": more than " + std::to_string(cap) +
                      " terms requested");
  }
  return static_cast<i64>(std::floor(x));
}

inline bool smooth_cut(i64 n, double y, const std::vector<std::uint32_t>& spf) {
  // True if n has a prime factor > y.
  while (n > 1) {
    if (static_cast<double>(spf[n]) > y) return true;
    n /= spf[n];
  }
  return false;
}

}  // namespace detail

/// CSV with header t_or_n,re,im,abs; doubles in round-trip precision.
inline void write_csv(std::ostream& os, const SumProfile& profile) {
  os << "t_or_n,re,im,abs\n";
  for (std::size_t i = 0; i < profile.values.size(); ++i) {
    const auto v = profile.values[i];
    os << detail::format_double(profile.grid[i]) << ',' << detail::format_double(v.real())
       << ',' << detail::format_double(v.imag()) << ','
       << detail::format_double(std::abs(v)) << '\n';
  }
}

inline nlohmann::json summary_json(const SumProfile& profile) {
  const cplx last = profile.final_value();
  return {{"kind", profile.kind},
          {"params", profile.params},
          {"samples", profile.values.size()},
          {"max_abs", profile.max_abs},
          {"argmax", profile.argmax},
          {"final", {last.real(), last.imag()}}};
}

/// S_chi(t) = sum_{n <= t} chi(n).
inline cplx char_sum(const DirichletCharacter& chi, double t) {
  const i64 n_max = detail::checked_length(t, "char_sum");
  charsum::detail::CompensatedComplexSum acc;
  for (i64 n = 1; n <= n_max; ++n) acc += chi(n);
  return acc.value();
}

/// S_chi(t) for every integer t <= q; S_chi is a step function so these cut
/// points realize max_{t <= q} |S_chi(t)|.
inline SumProfile max_char_sum(const DirichletCharacter& chi) {
  const u64 q = chi.modulus();
  detail::checked_length(static_cast<double>(q), "max_char_sum");
  SumProfile profile;
  profile.kind = "char_sum";
  profile.params = {{"modulus", q}, {"index", chi.index()}};
  profile.grid.reserve(q);
  profile.values.reserve(q);
  charsum::detail::CompensatedComplexSum acc;
  for (u64 t = 1; t <= q; ++t) {
    acc += chi(static_cast<i64>(t));
    profile.push(static_cast<double>(t), acc.value());
  }
  return profile;
}

/// Running sums of f(n)/n e(n alpha) over y-smooth n; samples every n up to
/// `dense_limit`, then on a geometric grid of roughly `samples` points.
inline SumProfile weighted_expsum_profile(const CMFunction& f, double x, double y,
                                          double alpha, i64 dense_limit = 10'000,
                                          i64 samples = 1000) {
  if (!(x >= 1.0)) throw DomainError("weighted_expsum: x must be >= 1");
  const i64 n_max = detail::checked_length(x, "weighted_expsum");
  const CMFunction fy = std::isfinite(y) ? f.smooth_restricted(y) : f;
  const auto vals = fy.values_up_to(n_max);
  SumProfile profile;
  profile.kind = "weighted_expsum";
  profile.params = {{"x", x}, {"alpha", alpha}};
  profile.params["y"] = std::isfinite(y) ? nlohmann::json(y) : nlohmann::json("inf");
  const double ratio =
      n_max > dense_limit && samples > 0
          ? std::pow(static_cast<double>(n_max) / static_cast<double>(dense_limit),
                     1.0 / static_cast<double>(samples))
          : 1.0;
  double next_sample = static_cast<double>(dense_limit);
  charsum::detail::CompensatedComplexSum acc;
  for (i64 n = 1; n <= n_max; ++n) {
    const cplx v = vals[n];
    if (v != cplx{}) {
      acc += v / static_cast<double>(n) *
             charsum::detail::unit_exp(static_cast<long double>(n) * alpha);
    }
    if (n <= dense_limit || n == n_max || static_cast<double>(n) >= next_sample) {
      profile.push(static_cast<double>(n), acc.value());
      if (n > dense_limit) {
        while (next_sample <= static_cast<double>(n)) next_sample *= ratio;
      }
    }
  }
  return profile;
}

/// sum_{n <= x, n y-smooth} f(n)/n e(n alpha). Pass y = kInfinity for no
/// smoothness restriction.
inline cplx weighted_expsum(const CMFunction& f, double x, double y, double alpha) {
  if (!(x >= 1.0)) throw DomainError("weighted_expsum: x must be >= 1");
  const i64 n_max = detail::checked_length(x, "weighted_expsum");
  const CMFunction fy = std::isfinite(y) ? f.smooth_restricted(y) : f;
  const auto vals = fy.values_up_to(n_max);
  charsum::detail::CompensatedComplexSum acc;
  for (i64 n = 1; n <= n_max; ++n) {
    if (vals[n] == cplx{}) continue;
    acc += vals[n] / static_cast<double>(n) *
           charsum::detail::unit_exp(static_cast<long double>(n) * alpha);
  }
  return acc.value();
}

struct PolyaResult {
  cplx main_term;  // tau(chi)/(2 pi i) sum_{1<=|n|<=N} conj chi(n)/n (1 - e(-nt/q))
  cplx exact;      // S_chi(t)
  double residual = 0.0;
};

/// Main term of Polya's Fourier expansion of S_chi(t), with its distance to
/// the exact partial sum.
inline PolyaResult polya_expansion(const DirichletCharacter& chi, double t, i64 N) {
  if (!chi.is_primitive() || chi.is_principal()) {
    throw DomainError("polya_expansion requires a primitive nonprincipal character");
  }
  if (N < 1) throw DomainError("polya_expansion requires N >= 1");
  detail::checked_length(static_cast<double>(N), "polya_expansion");
  const double q = static_cast<double>(chi.modulus());
  const cplx tau = characters::gauss_sum(chi).value;
  const double parity = static_cast<double>(chi.parity());
  charsum::detail::CompensatedComplexSum acc;
  for (i64 n = 1; n <= N; ++n) {
    const cplx c = std::conj(chi(n));
    if (c == cplx{}) continue;
    const long double arg = static_cast<long double>(n) * t / q;
    // n and -n together: conj chi(-n) = chi(-1) conj chi(n).
    const cplx bracket = (1.0 - charsum::detail::unit_exp(-arg)) -
                         parity * (1.0 - charsum::detail::unit_exp(arg));
    acc += c / static_cast<double>(n) * bracket;
  }
  const cplx main = tau / cplx(0.0, 2.0 * std::numbers::pi) * acc.value();
  const cplx exact = char_sum(chi, t);
  return {main, exact, std::abs(main - exact)};
}

struct IdentitySides {
  cplx lhs;
  cplx rhs;
};

/// Both sides of the exact identity expressing
///   sum_{n <= N, n y-smooth} f(n)/n e(bn/r)
/// through character sums mod r/d, d | r.
inline IdentitySides gs_identity_sides(const CMFunction& f, i64 b, i64 r, double N, double y) {
  if (b == 0) throw DomainError("gs_identity_sides requires b != 0");
  if (r < 1) throw DomainError("gs_identity_sides requires r >= 1");
  if (std::gcd(b < 0 ? -b : b, r) != 1) throw DomainError("gs_identity_sides requires gcd(b, r) = 1");
  if (!(N >= 1.0)) throw DomainError("gs_identity_sides requires N >= 1");
  const i64 n_max = detail::checked_length(N, "gs_identity_sides");
  const CMFunction fy = std::isfinite(y) ? f.smooth_restricted(y) : f;
  const auto vals = fy.values_up_to(n_max);

  charsum::detail::CompensatedComplexSum lhs;
  for (i64 n = 1; n <= n_max; ++n) {
    if (vals[n] == cplx{}) continue;
    const i64 phase = static_cast<i64>(arith::reduce(b, static_cast<u64>(r)) *
                                       static_cast<u64>(n) % static_cast<u64>(r));
    lhs += vals[n] / static_cast<double>(n) * charsum::detail::unit_root(phase, r);
  }

  charsum::detail::CompensatedComplexSum rhs;
  for (u64 d : arith::divisors(static_cast<u64>(r))) {
    if (!arith::is_smooth(d, y)) continue;
    const cplx fd = static_cast<i64>(d) <= n_max ? vals[d] : fy(static_cast<i64>(d));
    if (fd == cplx{}) continue;
    const u64 modulus = static_cast<u64>(r) / d;
    const double phi = static_cast<double>(arith::totient(modulus));
    const i64 inner_len = static_cast<i64>(std::floor(N / static_cast<double>(d)));
    charsum::detail::CompensatedComplexSum over_psi;
    for (const auto& psi : characters::enumerate_characters(modulus)) {
      const cplx psib = std::conj(psi(b));
      if (psib == cplx{}) continue;
      charsum::detail::CompensatedComplexSum inner;
      for (i64 n = 1; n <= inner_len; ++n) {
        if (vals[n] == cplx{}) continue;
        inner += vals[n] * std::conj(psi(n)) / static_cast<double>(n);
      }
      over_psi += characters::gauss_sum(psi).value * psib * inner.value();
    }
    rhs += fd / static_cast<double>(d) / phi * over_psi.value();
  }
  return {lhs.value(), rhs.value()};
}

/// sum_{1 <= |n| <= N, |n| y-smooth} conj chi(n)/n e(n alpha), folding n and
/// -n into one term so that even characters cancel exactly at alpha = 0.
inline cplx two_sided_sum(const DirichletCharacter& chi, i64 N, double alpha,
                          double y = kInfinity) {
  if (N < 1) throw DomainError("two_sided_sum requires N >= 1");
  detail::checked_length(static_cast<double>(N), "two_sided_sum");
  const double parity = static_cast<double>(chi.parity());
  std::vector<std::uint32_t> spf;
  if (std::isfinite(y)) spf = arith::smallest_prime_factors(N);
  charsum::detail::CompensatedComplexSum acc;
  for (i64 n = 1; n <= N; ++n) {
    const cplx c = std::conj(chi(n));
    if (c == cplx{}) continue;
    if (!spf.empty() && detail::smooth_cut(n, y, spf)) continue;
    const long double arg = static_cast<long double>(n) * alpha;
    const cplx bracket =
        charsum::detail::unit_exp(arg) - parity * charsum::detail::unit_exp(-arg);
    acc += c / static_cast<double>(n) * bracket;
  }
  return acc.value();
}

struct HildebrandResult {
  cplx lhs;   // sum_{n <= x, (n,k)=1} g(n)/n
  cplx main;  // prod_{p | k} (1 - g(p)/p) sum_{n <= x} g(n)/n
  double residual = 0.0;
};

inline HildebrandResult hildebrand_residual(const CMFunction& g, double x, i64 k) {
  if (!(x >= 1.0)) throw DomainError("hildebrand_residual requires x >= 1");
  if (k < 1) throw DomainError("hildebrand_residual requires k >= 1");
  const i64 n_max = detail::checked_length(x, "hildebrand_residual");
  const auto vals = g.values_up_to(n_max);
  charsum::detail::CompensatedComplexSum coprime, full;
  for (i64 n = 1; n <= n_max; ++n) {
    if (vals[n] == cplx{}) continue;
    const cplx term = vals[n] / static_cast<double>(n);
    full += term;
    if (std::gcd(n, k) == 1) coprime += term;
  }
  cplx product{1.0, 0.0};
  for (auto [p, e] : arith::factor(static_cast<u64>(k)).factors) {
    product *= 1.0 - g.prime_value(static_cast<i64>(p)) / static_cast<double>(p);
  }
  const cplx main = product * full.value();
  return {coprime.value(), main, std::abs(coprime.value() - main)};
}

}  // namespace charsum::expsums
