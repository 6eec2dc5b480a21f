#pragma once

// Slow, independent reference implementations used to check the library.
// Nothing here calls into charsum.

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <numeric>
#include <vector>

namespace oracle {

using i64 = std::int64_t;
using u64 = std::uint64_t;
using cplx = std::complex<double>;

inline bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

inline std::vector<i64> primes_up_to(i64 x) {
  std::vector<i64> out;
  for (i64 n = 2; n <= x; ++n) {
    if (is_prime(static_cast<u64>(n))) out.push_back(n);
  }
  return out;
}

inline std::map<u64, int> factor(u64 n) {
  std::map<u64, int> out;
  for (u64 d = 2; d * d <= n; ++d) {
    while (n % d == 0) {
      ++out[d];
      n /= d;
    }
  }
  if (n > 1) ++out[n];
  return out;
}

inline u64 totient(u64 n) {
  u64 count = 0;
  for (u64 a = 1; a <= n; ++a) {
    if (std::gcd(a, n) == 1) ++count;
  }
  return n == 1 ? 1 : count;
}

inline int moebius(u64 n) {
  int mu = 1;
  for (auto [p, e] : factor(n)) {
    if (e > 1) return 0;
    mu = -mu;
  }
  return mu;
}

inline u64 pow_mod(u64 b, u64 e, u64 m) {
  u64 r = 1 % m;
  b %= m;
  while (e) {
    if (e & 1) r = static_cast<u64>(static_cast<unsigned __int128>(r) * b % m);
    b = static_cast<u64>(static_cast<unsigned __int128>(b) * b % m);
    e >>= 1;
  }
  return r;
}

inline u64 order_mod(u64 a, u64 m) {
  u64 x = a % m, k = 1;
  while (x != 1 % m) {
    x = x * a % m;
    ++k;
  }
  return k;
}

/// e(x) in long double.
inline cplx e(long double x) {
  const long double angle = 2.0L * std::numbers::pi_v<long double> * x;
  return {static_cast<double>(std::cos(angle)), static_cast<double>(std::sin(angle))};
}

/// Values chi(0..q-1) of any function given as a callable.
template <typename Chi>
std::vector<cplx> table(const Chi& chi, u64 q) {
  std::vector<cplx> out(q);
  for (u64 n = 0; n < q; ++n) out[n] = chi(static_cast<i64>(n));
  return out;
}

/// Least d | q such that the table is 1 on every unit n = 1 mod d.
inline u64 conductor(const std::vector<cplx>& t) {
  const u64 q = t.size();
  for (u64 d = 1; d <= q; ++d) {
    if (q % d != 0) continue;
    bool ok = true;
    for (u64 n = 1; n < q && ok; n += d) {
      if (std::gcd(n, q) == 1 && std::abs(t[n] - cplx(1.0, 0.0)) > 1e-9) ok = false;
    }
    if (q == 1 || ok) return d;
  }
  return q;
}

/// Number of primitive characters mod q: sum_{d | q} mu(q/d) phi(d).
inline u64 primitive_count(u64 q) {
  i64 total = 0;
  for (u64 d = 1; d <= q; ++d) {
    if (q % d == 0) total += moebius(q / d) * static_cast<i64>(totient(d));
  }
  return static_cast<u64>(total);
}

inline cplx gauss_sum(const std::vector<cplx>& t) {
  const u64 q = t.size();
  cplx s{};
  for (u64 n = 1; n <= q; ++n) {
    s += t[n % q] * e(static_cast<long double>(n) / static_cast<long double>(q));
  }
  return s;
}

/// Legendre symbol by Euler's criterion.
inline int legendre(i64 a, u64 p) {
  const u64 r = pow_mod(static_cast<u64>(((a % static_cast<i64>(p)) + static_cast<i64>(p)) %
                                         static_cast<i64>(p)),
                        (p - 1) / 2, p);
  if (r == 0) return 0;
  return r == 1 ? 1 : -1;
}

/// Best approximation of the second kind: the r <= M minimizing |r alpha - b|
/// (first such r on ties), found by scanning every denominator.
struct Farey {
  i64 b;
  i64 r;
};
inline Farey best_second_kind(long double alpha, i64 M) {
  Farey best{static_cast<i64>(std::llround(alpha)), 1};
  long double best_err = std::fabs(alpha - static_cast<long double>(best.b));
  for (i64 r = 2; r <= M; ++r) {
    const i64 b = std::llround(alpha * r);
    const long double err = std::fabs(alpha * r - b);
    if (err < best_err - 1e-18L) {
      best = {b, r};
      best_err = err;
    }
  }
  return best;
}

}  // namespace oracle
