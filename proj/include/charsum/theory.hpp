#pragma once

// Closed-form constants, the roots-of-unity minimum identity, and numeric
// evaluators for the right-hand sides of the main upper bounds.

#include <cmath>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "charsum/errors.hpp"
#include "json.hpp"

namespace charsum::theory {

inline constexpr double kPi = std::numbers::pi;

/// 1 - (g/pi) sin(pi/g), the saving exponent for odd order g.
inline double delta_g(int g) {
  if (g < 3 || g % 2 == 0) throw DomainError("delta_g requires an odd g >= 3");
  return 1.0 - static_cast<double>(g) / kPi * std::sin(kPi / g);
}

/// F_N(w) = cos(2 pi {w} / N) + tan(pi/N) sin(2 pi {w} / N).
inline double F_N(int N, double omega) {
  if (N < 6) throw DomainError("F_N requires N >= 6");
  const double frac = omega - std::floor(omega);
  const double angle = 2.0 * kPi * frac / N;
  return std::cos(angle) + std::tan(kPi / N) * std::sin(angle);
}

/// Composite Simpson mean of F_N over [0, 1).
inline double F_N_mean(int N, int panels = 10'000) {
  if (panels % 2 != 0) ++panels;
  const double h = 1.0 / panels;
  // F_N(1^-) = 1 = F_N(0), so the periodic formula is continuous at 1.
  auto f = [N](double w) { return F_N(N, w); };
  double sum = f(0.0) + f(1.0);
  for (int i = 1; i < panels; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * f(i * h);
  return sum * h / 3.0;
}

struct SumminParams {
  int g = 3;       // odd, >= 3
  int k = 2;       // even, >= 2
  double theta = 0.0;  // in (-1/2, 1/2]

  SumminParams(int g_, int k_, double theta_) : g(g_), k(k_), theta(theta_) {
    if (g < 3 || g % 2 == 0) throw DomainError("SumminParams: g must be odd and >= 3");
    if (k < 2 || k % 2 != 0) throw DomainError("SumminParams: k must be even and >= 2");
    if (!(theta > -0.5 && theta <= 0.5)) {
      throw DomainError("SumminParams: theta must lie in (-1/2, 1/2]");
    }
  }

  [[nodiscard]] int d() const { return std::gcd(g, k); }
  [[nodiscard]] int k_star() const { return k / d(); }
};

/// (1/k) sum_{l mod k} min_{z in mu_g u {0}} (1 - Re z e(theta - l/k)),
/// by enumeration of every (l, z).
inline double summin_lhs(const SumminParams& p) {
  double total = 0.0;
  for (int l = 0; l < p.k; ++l) {
    double best = 1.0;  // z = 0
    for (int j = 0; j < p.g; ++j) {
      const double arg = static_cast<double>(j) / p.g + p.theta - static_cast<double>(l) / p.k;
      best = std::min(best, 1.0 - std::cos(2.0 * kPi * arg));
    }
    total += best;
  }
  return total / p.k;
}

/// Closed form 1 - sin(pi/g) / (k* tan(pi/(g k*))) F_{g k*}(-g k* theta).
inline double summin_rhs(const SumminParams& p) {
  const int ks = p.k_star();
  const int N = p.g * ks;
  return 1.0 - std::sin(kPi / p.g) / (ks * std::tan(kPi / N)) * F_N(N, -static_cast<double>(N) * p.theta);
}

/// 1 - sin(pi/g) / (k* sin(pi/(g k*))), the minimum of the closed form over theta.
inline double summin_floor(const SumminParams& p) {
  const int ks = p.k_star();
  return 1.0 - std::sin(kPi / p.g) / (ks * std::sin(kPi / (p.g * ks)));
}

// ---------------------------------------------------------------------------
// Bound evaluators. Unquantified o(1) exponents default to 0 and unnamed
// absolute constants to 1; both are echoed back in the result.

struct BoundOptions {
  double o1 = 0.0;        // added to the 2/3 exponent
  double constant = 1.0;  // overall implicit constant
  double C = 1.0;         // the C in e^{C sqrt(log log y)}
};

struct BoundValue {
  std::string name;
  double value = 0.0;
  BoundOptions options;
  nlohmann::json terms = nlohmann::json::object();
};

inline nlohmann::json to_json(const BoundValue& b) {
  return {{"name", b.name},
          {"value", b.value},
          {"o1", b.options.o1},
          {"constant", b.options.constant},
          {"C", b.options.C},
          {"terms", b.terms}};
}

/// (log y) e^{-M} + (log y)^{2/3 + o(1)}, M the mimicry quantity of f against
/// its exceptional character.
inline BoundValue bound_rhs_theorem1(double y, double m_value, BoundOptions opt = {}) {
  if (!(y >= 16.0)) throw DomainError("bound_rhs_theorem1 requires y >= 16");
  const double ly = std::log(y);
  const double main = ly * std::exp(-m_value);
  const double err = std::pow(ly, 2.0 / 3.0 + opt.o1);
  return {"theorem1", opt.constant * (main + err), opt, {{"main", main}, {"error", err}}};
}

/// log r + (log r)^{5/2} / sqrt(r) log y + log log y.
inline BoundValue bound_rhs_minor(double r, double y, BoundOptions opt = {}) {
  if (!(r >= 2.0)) throw DomainError("bound_rhs_minor requires r >= 2");
  if (!(y >= 16.0)) throw DomainError("bound_rhs_minor requires y >= 16");
  const double lr = std::log(r);
  const double a = lr;
  const double b = std::pow(lr, 2.5) / std::sqrt(r) * std::log(y);
  const double c = std::log(std::log(y));
  return {"minor", opt.constant * (a + b + c), opt, {{"log_r", a}, {"middle", b}, {"loglog_y", c}}};
}

/// r^{-1/2} (log y)^{2/3+o(1)} + sqrt(r) e^{C sqrt(log log y)}
///   + [m | r] sqrt(m)/phi(m) (log y) e^{-M}.
inline BoundValue bound_rhs_major(long long r, long long m, long long phi_m, double y,
                                  double m_value, BoundOptions opt = {}) {
  if (r < 1) throw DomainError("bound_rhs_major requires r >= 1");
  if (m < 1 || phi_m < 1) throw DomainError("bound_rhs_major requires m, phi(m) >= 1");
  if (!(y >= 16.0)) throw DomainError("bound_rhs_major requires y >= 16");
  const double ly = std::log(y);
  const double sr = std::sqrt(static_cast<double>(r));
  const double a = std::pow(ly, 2.0 / 3.0 + opt.o1) / sr;
  const double b = sr * std::exp(opt.C * std::sqrt(std::log(ly)));
  const double c = (r % m == 0) ? std::sqrt(static_cast<double>(m)) /
                                      static_cast<double>(phi_m) * ly * std::exp(-m_value)
                                : 0.0;
  return {"major", opt.constant * (a + b + c), opt,
          {{"nonexceptional", a}, {"mid", b}, {"exceptional", c}}};
}

/// (log x) e^{-M(f; x, T)} + 1/sqrt(T).
inline BoundValue bound_rhs_halasz(double x, double T, double m_value, BoundOptions opt = {}) {
  if (!(x >= 2.0)) throw DomainError("bound_rhs_halasz requires x >= 2");
  if (!(T >= 1.0)) throw DomainError("bound_rhs_halasz requires T >= 1");
  const double a = std::log(x) * std::exp(-m_value);
  const double b = 1.0 / std::sqrt(T);
  return {"halasz", opt.constant * (a + b), opt, {{"main", a}, {"tail", b}}};
}

}  // namespace charsum::theory
