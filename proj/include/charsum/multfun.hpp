#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/characters.hpp"
#include "json.hpp"

namespace charsum::multfun {

using arith::i64;
using arith::u64;
using cplx = std::complex<double>;

/// A completely multiplicative f: Z -> closed unit disc, given by its values
/// at the primes p <= support. The represented function is
///   n -> prod over p^e || n of (value(p) * p^{it})^e,
/// set to zero on integers with a prime factor above the smooth cutoff.
class CMFunction {
 public:
  /// values[i] is f at the i-th prime; primes must be all primes <= support.
  CMFunction(i64 support, std::vector<cplx> values, double twist = 0.0,
             std::optional<double> cutoff = std::nullopt)
      : support_(support), twist_(twist), cutoff_(cutoff) {
    if (support < 1) throw DomainError("CMFunction: support bound must be >= 1");
    primes_ = std::make_shared<const std::vector<i64>>(
        support >= 2 ? arith::primes_up_to(static_cast<double>(support))
                     : std::vector<i64>{});
    if (values.size() != primes_->size()) {
      throw DomainError("CMFunction: need one value per prime <= support");
    }
    for (const auto& v : values) {
      if (!(std::abs(v) <= 1.0 + 1e-12)) {
        throw DomainError("CMFunction: prime value outside the unit disc");
      }
    }
    values_ = std::make_shared<const std::vector<cplx>>(std::move(values));
    if (cutoff_ && !(*cutoff_ >= 1.0)) {
      throw DomainError("CMFunction: smooth cutoff must be >= 1");
    }
  }

  static CMFunction one(i64 support) {
    const auto count = support >= 2 ? arith::primes_up_to(static_cast<double>(support)).size() : 0;
    return {support, std::vector<cplx>(count, cplx{1.0, 0.0})};
  }

  [[nodiscard]] i64 support() const { return support_; }
  [[nodiscard]] double twist() const { return twist_; }
  [[nodiscard]] std::optional<double> cutoff() const { return cutoff_; }
  [[nodiscard]] const std::vector<i64>& primes() const { return *primes_; }
  /// Untwisted value at the i-th prime (before smooth cutoff).
  [[nodiscard]] const std::vector<cplx>& raw_values() const { return *values_; }

  /// f(p), twist and cutoff applied.
  [[nodiscard]] cplx prime_value(i64 p) const {
    if (cutoff_ && static_cast<double>(p) > *cutoff_) return {0.0, 0.0};
    if (p > support_) {
      throw SupportError("prime " + std::to_string(p) +
                         " is beyond the support bound " + std::to_string(support_));
    }
    const auto it = std::lower_bound(primes_->begin(), primes_->end(), p);
    if (it == primes_->end() || *it != p) {
      throw DomainError(std::to_string(p) + " is not prime");
    }
    return apply_twist((*values_)[static_cast<std::size_t>(it - primes_->begin())], p);
  }

  [[nodiscard]] cplx operator()(i64 n) const {
    if (n == 0) return {0.0, 0.0};
    cplx out{1.0, 0.0};
    // f(-1)^2 = f(1) = 1; we take f(-1) = 1, matching |n|-based definitions.
    for (auto [p, e] : arith::factor(static_cast<u64>(n < 0 ? -n : n)).factors) {
      const cplx v = prime_value(static_cast<i64>(p));
      for (int i = 0; i < e; ++i) out *= v;
    }
    return out;
  }

  /// f(0..n) in one pass through a smallest-prime-factor sieve (f(0) = 0).
  [[nodiscard]] std::vector<cplx> values_up_to(i64 n) const {
    if (n > kRangeCap) throw CapExceeded("values_up_to: length exceeds cap");
    const i64 needed = cutoff_ ? std::min<i64>(n, static_cast<i64>(std::floor(*cutoff_))) : n;
    if (needed > support_) {
      // Every prime in (support, needed] would be required.
      const auto ps = arith::primes_up_to(static_cast<double>(needed));
      if (!ps.empty() && ps.back() > support_) {
        throw SupportError("values_up_to: prime " + std::to_string(ps.back()) +
                           " is beyond the support bound " + std::to_string(support_));
      }
    }
    std::vector<cplx> out(static_cast<std::size_t>(std::max<i64>(n, 0) + 1));
    if (n >= 1) out[1] = {1.0, 0.0};
    if (n < 2) return out;
    const auto spf = arith::smallest_prime_factors(n);
    std::size_t next_prime = 0;
    for (i64 k = 2; k <= n; ++k) {
      const i64 p = spf[k];
      if (p == k) {
        if (cutoff_ && static_cast<double>(p) > *cutoff_) {
          out[k] = {0.0, 0.0};
        } else {
          while ((*primes_)[next_prime] < p) ++next_prime;
          out[k] = apply_twist((*values_)[next_prime], p);
        }
      } else {
        out[k] = out[p] * out[k / p];
      }
    }
    return out;
  }

  [[nodiscard]] CMFunction twisted(double t) const {
    CMFunction copy = *this;
    copy.twist_ += t;
    return copy;
  }

  [[nodiscard]] CMFunction smooth_restricted(double y) const {
    CMFunction copy = *this;
    copy.cutoff_ = cutoff_ ? std::min(*cutoff_, y) : y;
    return copy;
  }

  /// Pointwise conjugate (twist negated).
  [[nodiscard]] CMFunction conj() const {
    std::vector<cplx> v(*values_);
    for (auto& z : v) z = std::conj(z);
    return {support_, std::move(v), -twist_, cutoff_};
  }

  /// Pointwise product on the common support.
  friend CMFunction operator*(const CMFunction& a, const CMFunction& b) {
    const i64 support = std::min(a.support_, b.support_);
    const std::size_t count = std::min(a.primes_->size(), b.primes_->size());
    std::vector<cplx> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = (*a.values_)[i] * (*b.values_)[i];
    std::optional<double> cutoff = a.cutoff_;
    if (b.cutoff_) cutoff = cutoff ? std::min(*cutoff, *b.cutoff_) : *b.cutoff_;
    return {support, std::move(v), a.twist_ + b.twist_, cutoff};
  }

  static constexpr i64 kRangeCap = 10'000'000;

 private:
  [[nodiscard]] cplx apply_twist(cplx v, i64 p) const {
    if (twist_ == 0.0) return v;
    const double angle = twist_ * std::log(static_cast<double>(p));
    return v * cplx{std::cos(angle), std::sin(angle)};
  }

  i64 support_;
  double twist_;
  std::optional<double> cutoff_;
  std::shared_ptr<const std::vector<i64>> primes_;
  std::shared_ptr<const std::vector<cplx>> values_;
};

inline cplx evaluate(const CMFunction& f, i64 n) { return f(n); }

/// f_y: equal to f on y-smooth integers, zero elsewhere.
inline CMFunction smooth_restrict(const CMFunction& f, double y) {
  if (!(y >= 2.0)) throw DomainError("smooth_restrict requires y >= 2");
  return f.smooth_restricted(y);
}

/// n -> f(n) n^{it}.
inline CMFunction twist(const CMFunction& f, double t) { return f.twisted(t); }

inline CMFunction from_character(const characters::DirichletCharacter& chi,
                                 i64 support) {
  const auto primes = support >= 2 ? arith::primes_up_to(static_cast<double>(support))
                                   : std::vector<i64>{};
  std::vector<cplx> v(primes.size());
  for (std::size_t i = 0; i < primes.size(); ++i) v[i] = chi(primes[i]);
  return {support, std::move(v)};
}

/// Values for every prime up to the largest listed one; gaps are an error.
inline CMFunction from_prime_pattern(const std::map<i64, cplx>& values) {
  if (values.empty()) return CMFunction::one(1);
  const i64 support = values.rbegin()->first;
  const auto primes = arith::primes_up_to(static_cast<double>(std::max<i64>(support, 2)));
  std::vector<cplx> v;
  v.reserve(primes.size());
  for (i64 p : primes) {
    const auto it = values.find(p);
    if (it == values.end()) {
      throw DomainError("from_prime_pattern: missing value for prime " + std::to_string(p));
    }
    v.push_back(it->second);
  }
  if (v.size() != values.size()) {
    throw DomainError("from_prime_pattern: keys must be exactly the primes up to the largest");
  }
  return {support, std::move(v)};
}

/// Prime values uniform on the unit circle, or on the disc when `disc` is set.
template <typename Rng>
CMFunction random_function(i64 support, Rng& rng, bool disc = false) {
  const auto primes = support >= 2 ? arith::primes_up_to(static_cast<double>(support))
                                   : std::vector<i64>{};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<cplx> v(primes.size());
  for (auto& z : v) {
    const double angle = 2.0 * std::numbers::pi * unit(rng);
    const double radius = disc ? std::sqrt(unit(rng)) : 1.0;
    z = std::polar(radius, angle);
  }
  return {support, std::move(v)};
}

// ---------------------------------------------------------------------------
// Serialization: {"support": P, "values": {"p": [re, im], ...}, "twist": t,
//                 "cutoff": y | null}

inline nlohmann::json to_json(const CMFunction& f) {
  nlohmann::json values = nlohmann::json::object();
  for (std::size_t i = 0; i < f.primes().size(); ++i) {
    const auto z = f.raw_values()[i];
    values[std::to_string(f.primes()[i])] = {z.real(), z.imag()};
  }
  nlohmann::json out = {{"support", f.support()}, {"values", values}, {"twist", f.twist()}};
  out["cutoff"] = f.cutoff() ? nlohmann::json(*f.cutoff()) : nlohmann::json(nullptr);
  return out;
}

inline CMFunction function_from_json(const nlohmann::json& j) {
  std::map<i64, cplx> values;
  for (const auto& [key, z] : j.at("values").items()) {
    values[std::stoll(key)] = {z.at(0).get<double>(), z.at(1).get<double>()};
  }
  CMFunction f = from_prime_pattern(values);
  if (j.contains("support")) {
    const i64 support = j.at("support").get<i64>();
    if (support != f.support()) {
      // A support past the largest listed prime with no primes in between.
      const auto ps = arith::primes_up_to(static_cast<double>(std::max<i64>(support, 2)));
      if (ps.size() != f.primes().size()) {
        throw DomainError("function JSON: support has primes without values");
      }
      f = CMFunction(support, f.raw_values());
    }
  }
  if (j.contains("twist")) f = f.twisted(j.at("twist").get<double>());
  if (j.contains("cutoff") && !j.at("cutoff").is_null()) {
    f = f.smooth_restricted(j.at("cutoff").get<double>());
  }
  return f;
}

}  // namespace charsum::multfun
