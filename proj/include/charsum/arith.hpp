#pragma once

// Exact integer substrate: sieving, factorization, modular arithmetic,
// discrete logarithms and the cyclic decomposition of (Z/qZ)^*.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "charsum/errors.hpp"

namespace charsum::arith {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using u128 = unsigned __int128;

/// Process-wide resource limits. Adjusted by the CLI from its RunConfig.
struct Limits {
  i64 sieve_cap = 200'000'000;
  u64 factor_cap = 4'000'000'000'000'000'000ULL;
  u64 unit_group_cap = 1'000'000'000'000ULL;
  std::int64_t sum_cap = 10'000'000;  // terms in any single partial sum
};

inline Limits& limits() {
  static Limits l;
  return l;
}

// ---------------------------------------------------------------------------
// Modular helpers

inline u64 mul_mod(u64 a, u64 b, u64 m) {
  return static_cast<u64>(static_cast<u128>(a) * b % m);
}

inline u64 pow_mod(u64 base, u64 exp, u64 m) {
  if (m == 1) return 0;
  u64 result = 1;
  base %= m;
  while (exp > 0) {
    if (exp & 1) result = mul_mod(result, base, m);
    base = mul_mod(base, base, m);
    exp >>= 1;
  }
  return result;
}

/// Least nonnegative residue of n mod m, valid for negative n.
inline u64 reduce(i64 n, u64 m) {
  const i64 mm = static_cast<i64>(m);
  i64 r = n % mm;
  if (r < 0) r += mm;
  return static_cast<u64>(r);
}

/// Inverse of a mod m; nullopt when gcd(a, m) > 1.
inline std::optional<u64> inverse_mod(u64 a, u64 m) {
  if (m == 1) return 0;
  __int128 t = 0, new_t = 1;
  __int128 r = m, new_r = a % m;
  while (new_r != 0) {
    const __int128 q = r / new_r;
    t -= q * new_t;
    std::swap(t, new_t);
    r -= q * new_r;
    std::swap(r, new_r);
  }
  if (r != 1) return std::nullopt;
  if (t < 0) t += m;
  return static_cast<u64>(t);
}

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL,
                29ULL, 31ULL, 37ULL}) {
    if (n % p == 0) return n == p;
  }
  u64 d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // These bases are deterministic for all 64-bit n.
  for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL,
                1795265022ULL}) {
    a %= n;
    if (a == 0) continue;
    u64 x = pow_mod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (int r = 1; r < s; ++r) {
      x = mul_mod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Prime cache

namespace detail {

inline std::vector<std::uint32_t> eratosthenes(i64 bound) {
  std::vector<std::uint32_t> primes;
  if (bound < 2) return primes;
  primes.push_back(2);
  // Index i stands for the odd number 2i + 1.
  const i64 half = (bound - 1) / 2;
  std::vector<bool> composite(static_cast<std::size_t>(half + 1), false);
  for (i64 i = 1; i <= half; ++i) {
    if (composite[i]) continue;
    const i64 p = 2 * i + 1;
    primes.push_back(static_cast<std::uint32_t>(p));
    for (i64 j = (p * p - 1) / 2; j <= half; j += p) composite[j] = true;
  }
  return primes;
}

inline constexpr char kPrimeCacheMagic[8] = {'C', 'S', 'P', 'R',
                                             'I', 'M', 'E', '1'};

inline void put_u64(std::ostream& os, u64 v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline bool get_u64(std::istream& is, u64& v) {
  unsigned char b[8];
  if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<u64>(b[i]) << (8 * i);
  return true;
}

}  // namespace detail

/// Immutable list of all primes up to `bound`.
struct PrimeSnapshot {
  i64 bound = 0;
  std::vector<std::uint32_t> primes;
};

/// Writes a snapshot in the versioned on-disk format (see docs/prime_cache.md).
inline void write_prime_cache(const std::filesystem::path& path,
                              const PrimeSnapshot& snap) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("cannot write prime cache: " + tmp);
    os.write(detail::kPrimeCacheMagic, 8);
    detail::put_u64(os, static_cast<u64>(snap.bound));
    detail::put_u64(os, snap.primes.size());
    for (std::uint32_t p : snap.primes) {
      unsigned char b[4] = {static_cast<unsigned char>(p),
                            static_cast<unsigned char>(p >> 8),
                            static_cast<unsigned char>(p >> 16),
                            static_cast<unsigned char>(p >> 24)};
      os.write(reinterpret_cast<const char*>(b), 4);
    }
    if (!os) throw Error("short write to prime cache: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

/// Reads a cache file; nullopt if absent, truncated, or not version 1.
inline std::optional<PrimeSnapshot> read_prime_cache(
    const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) return std::nullopt;
  char magic[8];
  if (!is.read(magic, 8) ||
      std::memcmp(magic, detail::kPrimeCacheMagic, 8) != 0) {
    return std::nullopt;
  }
  u64 bound = 0, count = 0;
  if (!detail::get_u64(is, bound) || !detail::get_u64(is, count)) {
    return std::nullopt;
  }
  if (bound > static_cast<u64>(INT64_MAX) || count > bound) return std::nullopt;
  PrimeSnapshot snap;
  snap.bound = static_cast<i64>(bound);
  snap.primes.resize(count);
  std::vector<unsigned char> raw(count * 4);
  if (!is.read(reinterpret_cast<char*>(raw.data()),
               static_cast<std::streamsize>(raw.size()))) {
    return std::nullopt;
  }
  for (u64 i = 0; i < count; ++i) {
    snap.primes[i] = static_cast<std::uint32_t>(raw[4 * i]) |
                     static_cast<std::uint32_t>(raw[4 * i + 1]) << 8 |
                     static_cast<std::uint32_t>(raw[4 * i + 2]) << 16 |
                     static_cast<std::uint32_t>(raw[4 * i + 3]) << 24;
    if (i > 0 && snap.primes[i] <= snap.primes[i - 1]) return std::nullopt;
  }
  if (count > 0 && snap.primes.back() > bound) return std::nullopt;
  return snap;
}

/// Shared, grow-only prime table. Each snapshot handed out is immutable.
class PrimeCache {
 public:
  static PrimeCache& instance() {
    static PrimeCache cache;
    return cache;
  }

  /// Directory for the persisted cache; empty disables persistence.
  void set_directory(std::filesystem::path dir) {
    std::lock_guard lock(mutex_);
    directory_ = std::move(dir);
  }

  std::filesystem::path file() const {
    std::lock_guard lock(mutex_);
    return directory_.empty() ? std::filesystem::path{}
                              : directory_ / "primes-v1.bin";
  }

  std::shared_ptr<const PrimeSnapshot> at_least(i64 bound) {
    require_cap(bound <= limits().sieve_cap,
                "sieve bound " + std::to_string(bound) + " exceeds cap " +
                    std::to_string(limits().sieve_cap));
    require_cap(bound <= kMaxBound, "sieve bound exceeds the u32 prime format");
    std::lock_guard lock(mutex_);
    if (snapshot_ && snapshot_->bound >= bound) return snapshot_;
    const i64 target = std::min<i64>(
        std::min(limits().sieve_cap, kMaxBound),
        std::max<i64>({bound, kMinBound,
                       snapshot_ ? 2 * snapshot_->bound : i64{0}}));
    if (!directory_.empty()) {
      if (auto loaded = read_prime_cache(directory_ / "primes-v1.bin");
          loaded && loaded->bound >= bound) {
        snapshot_ = std::make_shared<const PrimeSnapshot>(std::move(*loaded));
        return snapshot_;
      }
    }
    auto fresh = std::make_shared<PrimeSnapshot>();
    fresh->bound = target;
    fresh->primes = detail::eratosthenes(target);
    snapshot_ = fresh;
    if (!directory_.empty()) {
      try {
        write_prime_cache(directory_ / "primes-v1.bin", *fresh);
      } catch (const std::exception&) {
        // An unwritable cache directory only costs a re-sieve next time.
      }
    }
    return snapshot_;
  }

  static constexpr i64 kMinBound = 1'000'000;
  static constexpr i64 kMaxBound = 0xFFFFFFFFLL;

 private:
  static void require_cap(bool ok, const std::string& msg) {
    if (!ok) throw CapExceeded(msg);
  }

  mutable std::mutex mutex_;
  std::filesystem::path directory_;
  std::shared_ptr<const PrimeSnapshot> snapshot_;
};

/// Exactly the primes <= x, ascending.
inline std::vector<i64> primes_up_to(double x) {
  if (!(x >= 2.0)) throw DomainError("primes_up_to requires x >= 2");
  if (x > static_cast<double>(limits().sieve_cap)) {
    throw CapExceeded("primes_up_to: bound exceeds sieve cap");
  }
  const i64 bound = static_cast<i64>(std::floor(x));
  auto snap = PrimeCache::instance().at_least(bound);
  const auto end =
      std::upper_bound(snap->primes.begin(), snap->primes.end(),
                       static_cast<std::uint32_t>(bound));
  return {snap->primes.begin(), end};
}

/// Smallest prime factor of every n <= bound (spf[0] = spf[1] = 0).
inline std::vector<std::uint32_t> smallest_prime_factors(i64 bound) {
  if (bound > limits().sieve_cap) {
    throw CapExceeded("smallest_prime_factors: bound exceeds sieve cap");
  }
  std::vector<std::uint32_t> spf(static_cast<std::size_t>(std::max<i64>(bound, 1) + 1), 0);
  std::vector<std::uint32_t> primes;
  for (i64 i = 2; i <= bound; ++i) {
    if (spf[i] == 0) {
      spf[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (std::uint32_t p : primes) {
      const i64 next = static_cast<i64>(p) * i;
      if (p > spf[i] || next > bound) break;
      spf[next] = p;
    }
  }
  return spf;
}

// ---------------------------------------------------------------------------
// Factorization

struct Factorization {
  u64 n = 1;
  std::vector<std::pair<u64, int>> factors;  // increasing primes, exponent >= 1

  [[nodiscard]] u64 recompose() const {
    u64 out = 1;
    for (auto [p, e] : factors) {
      for (int i = 0; i < e; ++i) out *= p;
    }
    return out;
  }

  [[nodiscard]] u64 largest_prime() const {
    return factors.empty() ? 1 : factors.back().first;
  }
};

namespace detail {

inline u64 pollard_brent(u64 n, std::mt19937_64& rng) {
  if (n % 2 == 0) return 2;
  for (;;) {
    const u64 c = rng() % (n - 1) + 1;
    u64 y = rng() % n;
    const u64 m = 128;
    u64 g = 1, r = 1, q = 1, x = 0, ys = 0;
    auto f = [&](u64 v) { return (mul_mod(v, v, n) + c) % n; };
    while (g == 1) {
      x = y;
      for (u64 i = 0; i < r; ++i) y = f(y);
      u64 k = 0;
      while (k < r && g == 1) {
        ys = y;
        for (u64 i = 0; i < std::min(m, r - k); ++i) {
          y = f(y);
          q = mul_mod(q, x > y ? x - y : y - x, n);
        }
        g = std::gcd(q, n);
        k += m;
      }
      r *= 2;
    }
    if (g == n) {
      do {
        ys = f(ys);
        g = std::gcd(x > ys ? x - ys : ys - x, n);
      } while (g == 1);
    }
    if (g != n) return g;
  }
}

inline void split_large(u64 n, std::map<u64, int>& out, std::mt19937_64& rng) {
  if (n == 1) return;
  if (is_prime(n)) {
    ++out[n];
    return;
  }
  const u64 d = pollard_brent(n, rng);
  split_large(d, out, rng);
  split_large(n / d, out, rng);
}

}  // namespace detail

inline constexpr i64 kTrialDivisionBound = 1'000'000;

/// Trial division by cached primes up to 10^6, Pollard-rho for what remains.
inline Factorization factor(u64 n) {
  if (n == 0) throw DomainError("factor requires n >= 1");
  if (n > limits().factor_cap) throw CapExceeded("factor: n exceeds cap");
  Factorization result;
  result.n = n;
  if (n == 1) return result;
  auto snap = PrimeCache::instance().at_least(kTrialDivisionBound);
  u64 rest = n;
  for (std::uint32_t p32 : snap->primes) {
    const u64 p = p32;
    if (p * p > rest || p > static_cast<u64>(kTrialDivisionBound)) break;
    if (rest % p != 0) continue;
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    result.factors.emplace_back(p, e);
  }
  if (rest > 1) {
    const u64 bound = static_cast<u64>(kTrialDivisionBound);
    if (rest < bound * bound || is_prime(rest)) {
      result.factors.emplace_back(rest, 1);
    } else {
      std::map<u64, int> large;
      std::mt19937_64 rng(rest);
      detail::split_large(rest, large, rng);
      for (auto [p, e] : large) result.factors.emplace_back(p, e);
    }
  }
  return result;
}

/// True iff every prime factor of n is <= y (so n = 1 is always smooth).
inline bool is_smooth(u64 n, double y) {
  if (n == 0) throw DomainError("is_smooth requires n >= 1");
  if (n == 1) return true;
  if (static_cast<double>(n) <= y) return true;
  if (y < 2.0) return false;
  return static_cast<double>(factor(n).largest_prime()) <= y;
}

inline std::vector<u64> divisors(u64 n) {
  std::vector<u64> out{1};
  for (auto [p, e] : factor(n).factors) {
    const std::size_t base = out.size();
    u64 pk = 1;
    for (int k = 1; k <= e; ++k) {
      pk *= p;
      for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline u64 totient(u64 n) {
  if (n == 0) throw DomainError("totient requires n >= 1");
  u64 phi = n;
  for (auto [p, e] : factor(n).factors) phi = phi / p * (p - 1);
  return phi;
}

inline int moebius(u64 n) {
  if (n == 0) throw DomainError("moebius requires n >= 1");
  int sign = 1;
  for (auto [p, e] : factor(n).factors) {
    if (e > 1) return 0;
    sign = -sign;
  }
  return sign;
}

inline u64 divisor_count(u64 n) {
  if (n == 0) throw DomainError("divisor_count requires n >= 1");
  u64 count = 1;
  for (auto [p, e] : factor(n).factors) count *= static_cast<u64>(e + 1);
  return count;
}

/// Solution of the congruences x = r_i (mod m_i), reduced into [0, prod m_i).
inline u64 crt(std::span<const std::pair<i64, i64>> congruences) {
  u128 modulus = 1;
  u64 x = 0;
  for (auto [residue, m] : congruences) {
    if (m < 1) throw DomainError("crt: moduli must be positive");
    if (std::gcd(static_cast<u64>(modulus), static_cast<u64>(m)) != 1) {
      throw DomainError("crt: moduli are not pairwise coprime");
    }
    const u64 mm = static_cast<u64>(m);
    const u128 next = modulus * mm;
    if (next > (static_cast<u128>(1) << 62)) {
      throw CapExceeded("crt: product of moduli exceeds 2^62");
    }
    // x' = x + modulus * k with k = (r - x) * modulus^{-1} mod m.
    const u64 r = reduce(residue, mm);
    const u64 inv = *inverse_mod(static_cast<u64>(modulus % mm), mm);
    const u64 diff = (r + mm - x % mm) % mm;
    const u64 k = mul_mod(diff, inv, mm);
    x = static_cast<u64>(x + modulus * k);
    modulus = next;
  }
  return x;
}

inline u64 crt(std::initializer_list<std::pair<i64, i64>> congruences) {
  return crt(std::span<const std::pair<i64, i64>>(congruences.begin(),
                                                  congruences.size()));
}

// ---------------------------------------------------------------------------
// Orders, primitive roots, discrete logarithms

/// Order of a in a group of known order group_order (a must be a unit mod m).
inline u64 multiplicative_order(u64 a, u64 m, u64 group_order) {
  u64 order = group_order;
  for (auto [p, e] : factor(group_order).factors) {
    for (int i = 0; i < e; ++i) {
      if (pow_mod(a, order / p, m) == 1) {
        order /= p;
      } else {
        break;
      }
    }
  }
  return order;
}

/// Smallest primitive root of the odd prime p (1 for p = 2).
inline u64 primitive_root(u64 p) {
  if (!is_prime(p)) throw DomainError("primitive_root requires a prime");
  if (p == 2) return 1;
  const auto fac = factor(p - 1);
  for (u64 g = 2;; ++g) {
    bool ok = true;
    for (auto [ell, e] : fac.factors) {
      if (pow_mod(g, (p - 1) / ell, p) == 1) {
        ok = false;
        break;
      }
    }
    if (ok) return g;
  }
}

/// Baby-step giant-step: least x in [0, order) with base^x = target (mod m).
inline std::optional<u64> bsgs(u64 base, u64 target, u64 m, u64 order) {
  base %= m;
  target %= m;
  if (m == 1) return 0;
  if (target == 1 % m) return 0;
  const u64 step = static_cast<u64>(std::ceil(std::sqrt(static_cast<double>(order))));
  std::unordered_map<u64, u64> baby;
  baby.reserve(static_cast<std::size_t>(step) * 2);
  u64 cur = 1;
  for (u64 j = 0; j < step; ++j) {
    baby.emplace(cur, j);
    cur = mul_mod(cur, base, m);
  }
  const auto inv = inverse_mod(base, m);
  if (!inv) return std::nullopt;
  const u64 giant = pow_mod(*inv, step, m);
  u64 gamma = target;
  for (u64 i = 0; i <= step; ++i) {
    if (auto it = baby.find(gamma); it != baby.end()) {
      const u64 x = i * step + it->second;
      if (x < order) return x;
    }
    gamma = mul_mod(gamma, giant, m);
  }
  return std::nullopt;
}

/// Exponent x with base^x = target (mod p), 0 <= x < ord(base).
inline u64 discrete_log(u64 base, u64 target, u64 p) {
  if (!is_prime(p)) throw DomainError("discrete_log requires a prime modulus");
  base %= p;
  target %= p;
  if (base == 0 || target == 0) {
    throw DomainError("discrete_log: arguments must be units");
  }
  const u64 order = multiplicative_order(base, p, p - 1);
  if (auto x = bsgs(base, target, p, order)) return *x;
  throw DomainError("discrete_log: target is outside the subgroup of base");
}

// ---------------------------------------------------------------------------
// Unit group (Z/qZ)^* as a product of cyclic groups

struct PrimePowerComponent {
  u64 prime = 0;
  int exponent = 0;
  u64 modulus = 1;  // prime^exponent
};

struct UnitGenerator {
  u64 value = 1;      // generator lifted to a residue mod q
  u64 local = 1;      // generator as a residue mod its component modulus
  u64 order = 1;
  std::size_t component = 0;
};

/// Cyclic decomposition of (Z/qZ)^*: odd prime powers are cyclic on their
/// smallest primitive root; 4 contributes <-1>; 2^k, k >= 3, contributes
/// <-1> x <5>. Generators are listed by increasing prime, -1 before 5.
class UnitGroup {
 public:
  static constexpr u64 kLogTableCap = 2'000'000;

  explicit UnitGroup(u64 q) : modulus_(q) {
    if (q == 0) throw DomainError("UnitGroup requires q >= 1");
    if (q > limits().unit_group_cap) throw CapExceeded("UnitGroup: modulus exceeds cap");
    for (auto [p, e] : factor(q).factors) {
      PrimePowerComponent c{p, e, 1};
      for (int i = 0; i < e; ++i) c.modulus *= p;
      const std::size_t idx = components_.size();
      components_.push_back(c);
      if (p == 2) {
        if (e >= 2) add_generator(idx, c.modulus - 1, 2);
        if (e >= 3) add_generator(idx, 5, c.modulus >> 2);
      } else {
        u64 g = primitive_root(p);
        if (e >= 2 && pow_mod(g, p - 1, p * p) == 1) g += p;
        add_generator(idx, g, c.modulus / p * (p - 1));
      }
    }
    phi_ = 1;
    for (const auto& g : generators_) phi_ *= g.order;
    if (q <= kLogTableCap) build_table();
  }

  [[nodiscard]] u64 modulus() const { return modulus_; }
  [[nodiscard]] u64 phi() const { return phi_; }
  [[nodiscard]] std::size_t rank() const { return generators_.size(); }
  [[nodiscard]] std::span<const UnitGenerator> generators() const { return generators_; }
  [[nodiscard]] std::span<const PrimePowerComponent> components() const {
    return components_;
  }

  [[nodiscard]] bool is_unit(i64 n) const {
    return std::gcd(reduce(n, modulus_), modulus_) == 1;
  }

  /// Exponent vector of n on the generators; false if n is not a unit.
  bool logs(i64 n, std::span<u64> out) const {
    const u64 r = reduce(n, modulus_);
    if (!table_.empty()) {
      const std::size_t k = rank();
      const std::uint32_t* row = table_.data() + r * k;
      if (row[0] == kNotUnit) return false;
      for (std::size_t i = 0; i < k; ++i) out[i] = row[i];
      return true;
    }
    if (std::gcd(r, modulus_) != 1) return false;
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      out[i] = local_log(i, r);
    }
    return true;
  }

  [[nodiscard]] std::optional<std::vector<u64>> logs(i64 n) const {
    std::vector<u64> out(rank());
    if (!logs(n, out)) return std::nullopt;
    return out;
  }

  /// Product of generator powers, mod q.
  [[nodiscard]] u64 element(std::span<const u64> exponents) const {
    u64 x = 1 % modulus_;
    for (std::size_t i = 0; i < generators_.size(); ++i) {
      x = mul_mod(x, pow_mod(generators_[i].value, exponents[i], modulus_), modulus_);
    }
    return x;
  }

 private:
  static constexpr std::uint32_t kNotUnit = 0xFFFFFFFFu;

  void add_generator(std::size_t component, u64 local, u64 order) {
    const auto& c = components_[component];
    UnitGenerator g;
    g.local = local % c.modulus;
    g.order = order;
    g.component = component;
    // Lift: local on this component, 1 on the others.
    const u64 rest = modulus_ / c.modulus;
    const std::pair<i64, i64> cong[2] = {
        {static_cast<i64>(g.local), static_cast<i64>(c.modulus)},
        {1, static_cast<i64>(rest)}};
    g.value = crt(std::span<const std::pair<i64, i64>>(cong, 2));
    generators_.push_back(g);
  }

  [[nodiscard]] u64 local_log(std::size_t gi, u64 r) const {
    const auto& g = generators_[gi];
    const auto& c = components_[g.component];
    const u64 x = r % c.modulus;
    if (c.prime != 2) return *bsgs(g.local, x, c.modulus, g.order);
    const bool negative = x % 4 == 3;
    if (g.local == c.modulus - 1) return negative ? 1 : 0;
    const u64 y = negative ? c.modulus - x : x;
    return *bsgs(5, y, c.modulus, g.order);
  }

  void build_table() {
    const std::size_t k = rank();
    if (k == 0) return;
    table_.assign(static_cast<std::size_t>(modulus_) * k, kNotUnit);
    // Enumerate exponent vectors in odometer order, tracking the element.
    std::vector<u64> exps(k, 0);
    u64 x = 1 % modulus_;
    for (u64 count = 0; count < phi_; ++count) {
      std::uint32_t* row = table_.data() + x * k;
      for (std::size_t i = 0; i < k; ++i) row[i] = static_cast<std::uint32_t>(exps[i]);
      for (std::size_t i = k; i-- > 0;) {
        ++exps[i];
        x = mul_mod(x, generators_[i].value, modulus_);
        if (exps[i] < generators_[i].order) break;
        exps[i] = 0;  // g_i^{order} = 1, so x is already back in place
      }
    }
  }

  u64 modulus_;
  u64 phi_ = 1;
  std::vector<PrimePowerComponent> components_;
  std::vector<UnitGenerator> generators_;
  std::vector<std::uint32_t> table_;
};

/// Memoized unit group for small moduli; larger moduli are built fresh.
inline std::shared_ptr<const UnitGroup> unit_group(u64 q) {
  constexpr u64 kMemoCap = 100'000;
  if (q > kMemoCap) return std::make_shared<const UnitGroup>(q);
  static std::mutex mutex;
  static std::unordered_map<u64, std::shared_ptr<const UnitGroup>> memo;
  std::lock_guard lock(mutex);
  auto& slot = memo[q];
  if (!slot) slot = std::make_shared<const UnitGroup>(q);
  return slot;
}

}  // namespace charsum::arith
