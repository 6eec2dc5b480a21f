#pragma once

// Self-check suites behind `charsum verify <suite>`. Each suite returns a
// per-case report; a suite passes iff every case does.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "charsum/charsum.hpp"
#include "json.hpp"

namespace charsum::verify {

struct Tolerances {
  double gauss = 1e-6;
  double identity = 1e-8;  // relative to 1 + |lhs|
  double summin = 1e-12;
  double vanishing = 1e-12;
  double triangle = 1e-10;
};

struct SuiteConfig {
  Tolerances tol;
  std::uint64_t seed = 20240601;
  int identity_cases = 100;
  int triangle_cases = 500;
  std::uint64_t gauss_qmax = 200;
  std::uint64_t coset_mmax = 200;
  std::uint64_t vanishing_qmax = 100;
};

struct SuiteReport {
  std::string suite;
  std::size_t passed = 0;
  std::size_t failed = 0;
  nlohmann::json cases = nlohmann::json::array();
  [[nodiscard]] bool ok() const { return failed == 0; }
};

inline nlohmann::json to_json(const SuiteReport& r) {
  return {{"suite", r.suite},
          {"passed", r.passed},
          {"failed", r.failed},
          {"ok", r.ok()},
          {"cases", r.cases}};
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"gs-identity", "summin",   "gauss",
                                                 "coset",       "triangle", "vanishing"};
  return names;
}

namespace detail {

using arith::i64;
using arith::u64;

struct Case {
  nlohmann::json info;
  bool ok = false;
};

inline void collect(SuiteReport& report, std::vector<Case> cases) {
  for (auto& c : cases) {
    c.info["ok"] = c.ok;
    (c.ok ? report.passed : report.failed) += 1;
    report.cases.push_back(std::move(c.info));
  }
}

inline nlohmann::json cplx_json(std::complex<double> z) { return {z.real(), z.imag()}; }

}  // namespace detail

inline SuiteReport run_gauss(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteReport report{"gauss"};
  const auto chis = characters::primitive_characters_below(cfg.gauss_qmax + 1);
  auto cases = charsum::detail::parallel_map(chis.size(), [&](std::size_t i) {
    const auto& chi = chis[i];
    const double mag = std::abs(characters::gauss_sum(chi).value);
    const double err = std::abs(mag - std::sqrt(static_cast<double>(chi.modulus())));
    return Case{{{"q", chi.modulus()}, {"index", chi.index()}, {"abs_tau", mag}, {"error", err}},
                err <= cfg.tol.gauss};
  });
  collect(report, std::move(cases));
  return report;
}

inline SuiteReport run_summin(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteReport report{"summin"};
  std::vector<theory::SumminParams> grid;
  for (int g : {3, 5, 7, 9, 15}) {
    for (int k = 2; k <= 24; k += 2) {
      grid.emplace_back(g, k, 0.0);
      for (int j = 1; j <= 101; ++j) grid.emplace_back(g, k, -0.5 + j / 101.0);
    }
  }
  auto cases = charsum::detail::parallel_map(grid.size(), [&](std::size_t i) {
    const auto& p = grid[i];
    const double lhs = theory::summin_lhs(p), rhs = theory::summin_rhs(p);
    const double err = std::abs(lhs - rhs);
    return Case{{{"g", p.g}, {"k", p.k}, {"theta", p.theta}, {"lhs", lhs}, {"rhs", rhs},
                 {"error", err}},
                err <= cfg.tol.summin};
  });
  collect(report, std::move(cases));
  return report;
}

inline SuiteReport run_coset(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteReport report{"coset"};
  std::vector<u64> moduli;
  for (u64 m = 3; m <= cfg.coset_mmax; ++m) moduli.push_back(m);  // m <= 2: no nonprincipal xi
  auto per_m = charsum::detail::parallel_map(moduli.size(), [&](std::size_t i) {
    const u64 m = moduli[i];
    const u64 phi = arith::totient(m);
    std::size_t chars = 0, bad = 0;
    nlohmann::json first_bad = nullptr;
    for (const auto& xi : characters::enumerate_characters(m)) {
      if (xi.is_principal()) continue;
      ++chars;
      for (u64 l = 0; l < xi.order(); ++l) {
        const u64 c = characters::coset_count(xi, static_cast<i64>(l));
        if (c * xi.order() != phi) {
          if (bad++ == 0) first_bad = {{"index", xi.index()}, {"ell", l}, {"count", c}};
        }
      }
    }
    return Case{{{"m", m}, {"characters", chars}, {"mismatches", bad}, {"first_mismatch", first_bad}},
                bad == 0};
  });
  collect(report, std::move(per_m));
  return report;
}

inline SuiteReport run_vanishing(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteReport report{"vanishing"};
  std::vector<characters::DirichletCharacter> chis;
  for (u64 q = 1; q <= cfg.vanishing_qmax; ++q) {
    for (auto& chi : characters::enumerate_characters(q)) {
      if (chi.is_even()) chis.push_back(std::move(chi));
    }
  }
  auto cases = charsum::detail::parallel_map(chis.size(), [&](std::size_t i) {
    const auto& chi = chis[i];
    const double v = std::abs(expsums::two_sided_sum(chi, 1000, 0.0));
    return Case{{{"q", chi.modulus()}, {"index", chi.index()}, {"abs", v}}, v <= cfg.tol.vanishing};
  });
  collect(report, std::move(cases));
  return report;
}

/// Random completely multiplicative functions paired with b, r, N, y.
inline SuiteReport run_gs_identity(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteReport report{"gs-identity"};
  struct Params {
    multfun::CMFunction f;
    i64 b, r;
    double N, y;
  };
  std::mt19937_64 rng(cfg.seed);
  std::vector<Params> params;
  // The hand case first: sum_{n <= 4} e(n/2)/n = -7/12.
  params.push_back({multfun::CMFunction::one(4), 1, 2, 4.0, expsums::kInfinity});
  std::uniform_int_distribution<i64> r_dist(1, 30), n_dist(1, 2000);
  const double ys[] = {10.0, 50.0, expsums::kInfinity};
  for (int i = 0; i < cfg.identity_cases; ++i) {
    const i64 r = r_dist(rng);
    i64 b = 0;
    std::uniform_int_distribution<i64> b_dist(-r, r);
    do {
      b = b_dist(rng);
    } while (b == 0 || std::gcd(b < 0 ? -b : b, r) != 1);
    const auto N = static_cast<double>(n_dist(rng));
    const double y = ys[rng() % 3];
    const auto support = static_cast<i64>(std::max<double>(N, static_cast<double>(r)));
    params.push_back({multfun::random_function(support, rng, (rng() & 1) != 0), b, r, N, y});
  }
  auto cases = charsum::detail::parallel_map(params.size(), [&](std::size_t i) {
    const auto& p = params[i];
    const auto sides = expsums::gs_identity_sides(p.f, p.b, p.r, p.N, p.y);
    const double err = std::abs(sides.lhs - sides.rhs);
    nlohmann::json info = {{"case", i},       {"b", p.b},
                           {"r", p.r},        {"N", p.N},
                           {"lhs", cplx_json(sides.lhs)}, {"rhs", cplx_json(sides.rhs)},
                           {"error", err}};
    info["y"] = std::isfinite(p.y) ? nlohmann::json(p.y) : nlohmann::json("inf");
    bool ok = err <= cfg.tol.identity * (1.0 + std::abs(sides.lhs));
    if (i == 0) ok = ok && std::abs(sides.lhs - std::complex<double>(-7.0 / 12.0, 0.0)) <= 1e-12;
    return Case{std::move(info), ok};
  });
  collect(report, std::move(cases));
  return report;
}

/// D(f1,g1) + D(f2,g2) >= D(f1 f2, g1 g2) at X = 10^4 over random quadruples
/// mixing characters and random functions.
inline SuiteReport run_triangle(const SuiteConfig& cfg) {
  using namespace detail;
  SuiteReport report{"triangle"};
  constexpr i64 kX = 10'000;
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  const auto chis = characters::primitive_characters_below(60);
  auto draw = [&]() {
    if (rng() % 2 == 0) {
      return multfun::from_character(chis[rng() % chis.size()], kX);
    }
    return multfun::random_function(kX, rng, (rng() & 1) != 0);
  };
  struct Quad {
    multfun::CMFunction f1, g1, f2, g2;
  };
  std::vector<Quad> quads;
  for (int i = 0; i < cfg.triangle_cases; ++i) {
    auto f1 = draw();
    auto g1 = draw();
    auto f2 = draw();
    auto g2 = draw();
    quads.push_back({std::move(f1), std::move(g1), std::move(f2), std::move(g2)});
  }
  auto cases = charsum::detail::parallel_map(quads.size(), [&](std::size_t i) {
    const auto& q = quads[i];
    const double a = mimicry::distance(q.f1, q.g1, kX);
    const double b = mimicry::distance(q.f2, q.g2, kX);
    const double c = mimicry::distance(q.f1 * q.f2, q.g1 * q.g2, kX);
    return Case{{{"case", i}, {"d1", a}, {"d2", b}, {"d12", c}, {"slack", a + b - c}},
                a + b >= c - cfg.tol.triangle};
  });
  collect(report, std::move(cases));
  return report;
}

inline SuiteReport run_suite(const std::string& name, const SuiteConfig& cfg) {
  if (name == "gauss") return run_gauss(cfg);
  if (name == "summin") return run_summin(cfg);
  if (name == "coset") return run_coset(cfg);
  if (name == "vanishing") return run_vanishing(cfg);
  if (name == "gs-identity") return run_gs_identity(cfg);
  if (name == "triangle") return run_triangle(cfg);
  throw DomainError("unknown verify suite '" + name + "'");
}

}  // namespace charsum::verify
