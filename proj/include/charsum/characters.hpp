#pragma once

#include <array>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/detail/summation.hpp"
#include "json.hpp"

namespace charsum::characters {

using arith::i64;
using arith::u64;

/// A Dirichlet character mod q, identified by its exponent vector on the
/// generators of arith::UnitGroup(q): chi(g_i) = e(exponent_i / order(g_i)).
///
/// All values are tracked as exact phases: for a unit n, chi(n) = e(j/K)
/// where K is the order of chi and j = phase(n).
class DirichletCharacter {
 public:
  static constexpr std::size_t kMaxRank = 16;

  DirichletCharacter(std::shared_ptr<const arith::UnitGroup> group,
                     std::vector<u64> exponents)
      : group_(std::move(group)), exponents_(std::move(exponents)) {
    if (!group_) throw DomainError("DirichletCharacter: null unit group");
    const auto gens = group_->generators();
    if (exponents_.size() != gens.size()) {
      throw DomainError("DirichletCharacter: exponent vector has wrong length");
    }
    order_ = 1;
    for (std::size_t i = 0; i < gens.size(); ++i) {
      exponents_[i] %= gens[i].order;
      const u64 local = gens[i].order / std::gcd(exponents_[i], gens[i].order);
      order_ = std::lcm(order_, local);
    }
    // chi(g_i) = e(w_i / K). K need not be a multiple of ord_i, so reduce
    // exponent_i / ord_i by d = gcd first; the reduced denominator divides K.
    weights_.resize(gens.size());
    for (std::size_t i = 0; i < gens.size(); ++i) {
      const u64 d = std::gcd(exponents_[i], gens[i].order);
      const u64 reduced_den = gens[i].order / d;  // divides order_
      weights_[i] = exponents_[i] / d * (order_ / reduced_den) % order_;
    }
    conductor_ = compute_conductor();
    const auto minus_one = phase(-1);
    parity_ = (minus_one && *minus_one != 0) ? -1 : 1;
  }

  static DirichletCharacter principal(u64 q) {
    auto g = arith::unit_group(q);
    return {g, std::vector<u64>(g->rank(), 0)};
  }

  /// The index-th character in canonical enumeration order (mixed radix over
  /// generator orders, first generator most significant).
  static DirichletCharacter from_index(u64 q, u64 index) {
    auto g = arith::unit_group(q);
    if (index >= g->phi()) {
      throw DomainError("character index " + std::to_string(index) +
                        " out of range for modulus " + std::to_string(q));
    }
    const auto gens = g->generators();
    std::vector<u64> exps(gens.size());
    for (std::size_t i = gens.size(); i-- > 0;) {
      exps[i] = index % gens[i].order;
      index /= gens[i].order;
    }
    return {g, std::move(exps)};
  }

  /// Quadratic character (n/p) for an odd prime p.
  static DirichletCharacter legendre(u64 p) {
    if (p < 3 || !arith::is_prime(p)) {
      throw DomainError("legendre requires an odd prime");
    }
    auto g = arith::unit_group(p);
    return {g, {(p - 1) / 2}};
  }

  /// The nontrivial character mod 4.
  static DirichletCharacter chi_minus4() { return from_index(4, 1); }

  [[nodiscard]] u64 modulus() const { return group_->modulus(); }
  [[nodiscard]] const arith::UnitGroup& group() const { return *group_; }
  [[nodiscard]] const std::shared_ptr<const arith::UnitGroup>& group_ptr() const {
    return group_;
  }
  [[nodiscard]] const std::vector<u64>& exponents() const { return exponents_; }
  [[nodiscard]] u64 order() const { return order_; }
  [[nodiscard]] int parity() const { return parity_; }
  [[nodiscard]] bool is_even() const { return parity_ == 1; }
  [[nodiscard]] u64 conductor() const { return conductor_; }
  [[nodiscard]] bool is_primitive() const { return conductor_ == modulus(); }
  [[nodiscard]] bool is_principal() const { return order_ == 1; }

  [[nodiscard]] u64 index() const {
    u64 idx = 0;
    const auto gens = group_->generators();
    for (std::size_t i = 0; i < gens.size(); ++i) {
      idx = idx * gens[i].order + exponents_[i];
    }
    return idx;
  }

  /// j in [0, order) with chi(n) = e(j / order); nullopt when gcd(n, q) > 1.
  [[nodiscard]] std::optional<u64> phase(i64 n) const {
    std::array<u64, kMaxRank> logs{};
    if (!group_->logs(n, std::span<u64>(logs.data(), group_->rank()))) {
      return std::nullopt;
    }
    u64 j = 0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      j = (j + arith::mul_mod(weights_[i], logs[i], order_)) % order_;
    }
    return j;
  }

  [[nodiscard]] std::complex<double> operator()(i64 n) const {
    const auto j = phase(n);
    if (!j) return {0.0, 0.0};
    return charsum::detail::unit_root(static_cast<long long>(*j),
                                      static_cast<long long>(order_));
  }

  [[nodiscard]] DirichletCharacter conj() const {
    std::vector<u64> exps(exponents_.size());
    const auto gens = group_->generators();
    for (std::size_t i = 0; i < exps.size(); ++i) {
      exps[i] = (gens[i].order - exponents_[i]) % gens[i].order;
    }
    return {group_, std::move(exps)};
  }

  [[nodiscard]] DirichletCharacter pow(u64 k) const {
    std::vector<u64> exps(exponents_.size());
    const auto gens = group_->generators();
    for (std::size_t i = 0; i < exps.size(); ++i) {
      exps[i] = arith::mul_mod(exponents_[i], k, gens[i].order);
    }
    return {group_, std::move(exps)};
  }

  friend DirichletCharacter operator*(const DirichletCharacter& a,
                                      const DirichletCharacter& b) {
    if (a.modulus() != b.modulus()) {
      throw DomainError("character product requires equal moduli");
    }
    std::vector<u64> exps(a.exponents_.size());
    const auto gens = a.group_->generators();
    for (std::size_t i = 0; i < exps.size(); ++i) {
      exps[i] = (a.exponents_[i] + b.exponents_[i]) % gens[i].order;
    }
    return {a.group_, std::move(exps)};
  }

  friend bool operator==(const DirichletCharacter& a, const DirichletCharacter& b) {
    return a.modulus() == b.modulus() && a.exponents_ == b.exponents_;
  }

 private:
  // Per prime-power component, the least f such that chi is trivial on
  // units = 1 mod p^f.
  [[nodiscard]] u64 compute_conductor() const {
    u64 m = 1;
    const auto comps = group_->components();
    const auto gens = group_->generators();
    for (std::size_t c = 0; c < comps.size(); ++c) {
      const u64 p = comps[c].prime;
      const int e = comps[c].exponent;
      int f = 0;
      if (p == 2) {
        u64 sign = 0, five = 0;
        for (std::size_t i = 0; i < gens.size(); ++i) {
          if (gens[i].component != c) continue;
          if (gens[i].local == comps[c].modulus - 1) {
            sign = exponents_[i];
          } else {
            five = exponents_[i];
          }
        }
        if (five != 0) {
          f = e - std::countr_zero(five);
        } else if (sign != 0) {
          f = 2;
        }
      } else {
        for (std::size_t i = 0; i < gens.size(); ++i) {
          if (gens[i].component != c || exponents_[i] == 0) continue;
          int v = 0;
          u64 a = exponents_[i];
          while (a % p == 0 && v < e - 1) {
            a /= p;
            ++v;
          }
          f = e - v;
        }
      }
      for (int i = 0; i < f; ++i) m *= p;
    }
    return m;
  }

  std::shared_ptr<const arith::UnitGroup> group_;
  std::vector<u64> exponents_;
  std::vector<u64> weights_;
  u64 order_ = 1;
  u64 conductor_ = 1;
  int parity_ = 1;
};

/// All phi(q) characters mod q in canonical index order (index 0 is principal).
inline std::vector<DirichletCharacter> enumerate_characters(u64 q) {
  auto g = arith::unit_group(q);
  std::vector<DirichletCharacter> out;
  out.reserve(g->phi());
  for (u64 i = 0; i < g->phi(); ++i) out.push_back(DirichletCharacter::from_index(q, i));
  return out;
}

/// Primitive characters of every conductor m in [1, bound), ordered by
/// conductor then index. The trivial character mod 1 is included.
inline std::vector<DirichletCharacter> primitive_characters_below(u64 bound) {
  std::vector<DirichletCharacter> out;
  for (u64 m = 1; m < bound; ++m) {
    if (m % 4 == 2) continue;  // no primitive characters when m = 2 mod 4
    for (auto& chi : enumerate_characters(m)) {
      if (chi.is_primitive()) out.push_back(std::move(chi));
    }
  }
  return out;
}

inline std::complex<double> evaluate(const DirichletCharacter& chi, i64 n) {
  return chi(n);
}

/// Conductor m* and the primitive character mod m* inducing chi.
inline std::pair<u64, DirichletCharacter> conductor_and_primitive(
    const DirichletCharacter& chi) {
  const u64 m = chi.conductor();
  if (m == chi.modulus()) return {m, chi};
  auto target = arith::unit_group(m);
  const auto gens = target->generators();
  std::vector<u64> exps(gens.size());
  const u64 q = chi.modulus();
  for (std::size_t i = 0; i < gens.size(); ++i) {
    // Lift the generator to a unit mod q in the same class mod m.
    u64 lift = gens[i].value;
    while (std::gcd(lift, q) != 1) lift += m;
    const u64 j = *chi.phase(static_cast<i64>(lift));
    // e(j/K) must be an ord_i-th root of unity.
    const u64 scaled = j * gens[i].order;
    if (scaled % chi.order() != 0) {
      throw Error("conductor_and_primitive: inconsistent inducing character");
    }
    exps[i] = scaled / chi.order() % gens[i].order;
  }
  return {m, DirichletCharacter(target, std::move(exps))};
}

struct GaussSumValue {
  std::complex<double> value;
  DirichletCharacter character;
};

inline constexpr u64 kGaussSumCap = 1'000'000;

/// tau(chi) = sum_{n <= q} chi(n) e(n/q), summed with exact phase reduction.
inline GaussSumValue gauss_sum(const DirichletCharacter& chi) {
  const u64 q = chi.modulus();
  if (q > kGaussSumCap) throw CapExceeded("gauss_sum: modulus exceeds cap");
  const u64 K = chi.order();
  charsum::detail::CompensatedComplexSum acc;
  for (u64 n = 1; n <= q; ++n) {
    const auto j = chi.phase(static_cast<i64>(n));
    if (!j) continue;
    // chi(n) e(n/q) = e((j q + n K) / (K q))
    const u64 num = (*j * q + n * K) % (K * q);
    acc += charsum::detail::unit_root(static_cast<long long>(num),
                                      static_cast<long long>(K * q));
  }
  return {acc.value(), chi};
}

/// mu(q/m*) psi*(q/m*) tau(psi*), the Gauss sum of psi through its
/// primitive inducing character.
inline std::complex<double> gauss_sum_induced(const DirichletCharacter& psi) {
  const auto [m, primitive] = conductor_and_primitive(psi);
  const u64 ratio = psi.modulus() / m;
  const int mu = arith::moebius(ratio);
  if (mu == 0) return {0.0, 0.0};
  const auto value = primitive(static_cast<i64>(ratio));
  return static_cast<double>(mu) * value * gauss_sum(primitive).value;
}

/// Number of residues a mod m with xi(a) = e(ell/k), k the order of xi.
inline u64 coset_count(const DirichletCharacter& xi, i64 ell) {
  if (xi.is_principal()) throw DomainError("coset_count requires a nonprincipal character");
  const u64 k = xi.order();
  const u64 target = arith::reduce(ell, k);
  u64 count = 0;
  for (u64 a = 0; a < xi.modulus(); ++a) {
    const auto j = xi.phase(static_cast<i64>(a));
    if (j && *j == target) ++count;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::json to_json(const DirichletCharacter& chi) {
  return {{"modulus", chi.modulus()},
          {"index", chi.index()},
          {"exponent_vector", chi.exponents()},
          {"order", chi.order()},
          {"conductor", chi.conductor()},
          {"parity", chi.parity()}};
}

inline DirichletCharacter character_from_json(const nlohmann::json& j) {
  const u64 q = j.at("modulus").get<u64>();
  auto g = arith::unit_group(q);
  DirichletCharacter chi(g, j.at("exponent_vector").get<std::vector<u64>>());
  if (j.contains("order") && j.at("order").get<u64>() != chi.order()) {
    throw DomainError("character JSON: order field disagrees with exponents");
  }
  return chi;
}

}  // namespace charsum::characters
