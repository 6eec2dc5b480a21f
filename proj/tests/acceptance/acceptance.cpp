// Acceptance run: one PASS/FAIL line per criterion, diagnostics as CSV.
//
//   acceptance [artifact-dir]
//
// Exit status is nonzero when any asserted criterion fails. Criterion 14 is
// reported only.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "charsum/charsum.hpp"
#include "charsum/verify.hpp"

namespace fs = std::filesystem;
namespace ch = charsum::characters;
namespace es = charsum::expsums;
namespace mf = charsum::multfun;
using charsum::arith::i64;
using charsum::arith::u64;
using ch::DirichletCharacter;
using nlohmann::json;

namespace {

constexpr double kGaussTol = 1e-6;
constexpr double kIdentityTol = 1e-8;
constexpr double kSumminTol = 1e-12;
constexpr double kFTol = 1e-12;
constexpr double kMeanTol = 1e-6;
constexpr double kVanishTol = 1e-12;
constexpr double kTriangleSlack = 1e-10;
constexpr double kMimicDistTol = 1e-8;
constexpr double kMimicTTol = 1e-6;
constexpr double kLogGrowth = 0.1;
constexpr double kPolyaFraction = 1.0 / 7.0;

struct Outcome {
  bool ok;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

charsum::verify::SuiteConfig suite_config() {
  charsum::verify::SuiteConfig cfg;
  cfg.tol.gauss = kGaussTol;
  cfg.tol.identity = kIdentityTol;
  cfg.tol.summin = kSumminTol;
  cfg.tol.vanishing = kVanishTol;
  cfg.tol.triangle = kTriangleSlack;
  return cfg;
}

std::string suite_detail(const charsum::verify::SuiteReport& r) {
  return std::to_string(r.passed) + "/" + std::to_string(r.passed + r.failed) + " cases";
}

Outcome c1_gauss() {
  double worst = 0;
  std::size_t n = 0;
  for (const auto& chi : ch::primitive_characters_below(201)) {
    worst = std::max(worst, std::abs(std::abs(ch::gauss_sum(chi).value) -
                                     std::sqrt(static_cast<double>(chi.modulus()))));
    ++n;
  }
  return {worst <= kGaussTol, std::to_string(n) + " primitive characters, max error " + fmt(worst)};
}

Outcome c2_identity() {
  const auto r = charsum::verify::run_gs_identity(suite_config());
  const auto hand = es::gs_identity_sides(mf::CMFunction::one(4), 1, 2, 4, es::kInfinity);
  const bool hand_ok = std::abs(hand.lhs - std::complex<double>(-7.0 / 12.0, 0.0)) <= 1e-12;
  return {r.ok() && hand_ok && r.passed + r.failed == 101,
          suite_detail(r) + ", hand case lhs " + fmt(hand.lhs.real())};
}

Outcome c3_summin() {
  const auto r = charsum::verify::run_summin(suite_config());
  const double v = charsum::theory::summin_lhs({3, 2, 0.0});
  const double w = charsum::theory::summin_rhs({3, 2, 0.0});
  const bool hand = std::abs(v - 0.25) <= kSumminTol && std::abs(w - 0.25) <= kSumminTol;
  return {r.ok() && hand, suite_detail(r) + ", (3,2,0) -> " + fmt(v)};
}

Outcome c4_delta3() {
  const double d = charsum::theory::delta_g(3);
  return {std::round(d * 1000.0) / 1000.0 == 0.173, "delta_3 = " + fmt(d)};
}

Outcome c5_fn() {
  using charsum::theory::F_N;
  bool ok = true;
  std::string detail;
  for (int N : {6, 10, 30}) {
    const double pi_n = std::numbers::pi / N;
    ok = ok && std::abs(F_N(N, 0.0) - 1.0) <= kFTol;
    ok = ok && std::abs(F_N(N, 0.5) * std::cos(pi_n) - 1.0) <= kFTol;
    const double mean = charsum::theory::F_N_mean(N);
    const double target = N / std::numbers::pi * std::tan(pi_n);
    ok = ok && std::abs(mean - target) <= kMeanTol;
    const int steps = 2000;
    const double h = 1.0 / steps;
    for (int i = 1; i < steps; ++i) {
      const double w = i * h;
      ok = ok && F_N(N, w - h) + F_N(N, w + h) - 2 * F_N(N, w) <= 1e-12;  // concave
      ok = ok && std::abs(F_N(N, w) - F_N(N, 1.0 - w)) <= 1e-12;          // symmetric about 1/2
    }
    detail += "N=" + std::to_string(N) + " mean err " + fmt(std::abs(mean - target)) + "; ";
  }
  return {ok, detail};
}

Outcome c6_vanishing() {
  const auto r = charsum::verify::run_vanishing(suite_config());
  return {r.ok(), suite_detail(r) + " (even characters, q <= 100)"};
}

Outcome c7_coset() {
  const auto r = charsum::verify::run_coset(suite_config());
  return {r.ok(), suite_detail(r) + " (moduli 3..200)"};
}

Outcome c8_triangle() {
  const auto r = charsum::verify::run_triangle(suite_config());
  return {r.ok() && r.passed == 500, suite_detail(r) + " at X = 1e4"};
}

Outcome c9_dirichlet() {
  std::mt19937_64 rng(909);
  using i128 = __int128;
  std::size_t bad = 0;
  for (int i = 0; i < 1000; ++i) {
    // alpha = N / 2^s with |N| < 2^53 is an exact double, so the inequality
    // is checked in integers: |N r - b 2^s| M <= 2^s.
    const i64 N = static_cast<i64>(rng() % (i64{1} << 54)) - (i64{1} << 53);
    const int s = 40 + static_cast<int>(rng() % 13);
    const double alpha = std::ldexp(static_cast<double>(N), -s);
    const i64 M = static_cast<i64>(rng() % 10'000'000) + 2;
    const auto a = charsum::dioph::dirichlet_approx(alpha, static_cast<double>(M));
    const i128 err = static_cast<i128>(N) * a.r - static_cast<i128>(a.b) * (i128{1} << s);
    const bool ok = a.r >= 1 && a.r <= M && (err < 0 ? -err : err) * M <= (i128{1} << s);
    bad += !ok;
  }
  const auto pi = charsum::dioph::dirichlet_approx(std::numbers::pi, 100);
  const bool pi_ok = pi.b == 22 && pi.r == 7;
  return {bad == 0 && pi_ok, std::to_string(1000 - bad) + "/1000 random; (pi, 100) -> " +
                                 std::to_string(pi.b) + "/" + std::to_string(pi.r)};
}

Outcome c10_mquantity() {
  bool ok = true;
  std::string detail;
  const auto one = mf::CMFunction::one(10'000);
  for (double t0 : {0.0, 0.5, 3.0, -7.0}) {
    const auto r = charsum::mimicry::m_quantity(one.twisted(t0), 1e4, 10.0);
    ok = ok && std::abs(r.distance_sq) <= kMimicDistTol && std::abs(r.minimizing_t - t0) <= kMimicTTol;
    detail += "t0=" + fmt(t0) + " -> t=" + fmt(r.minimizing_t) + " M=" + fmt(r.distance_sq) + "; ";
  }
  return {ok, detail};
}

Outcome c11_log_growth() {
  bool ok = true;
  std::string detail;
  const auto chi = DirichletCharacter::chi_minus4();
  for (double x : {1e3, 1e4, 1e5, 1e6}) {
    const auto f = mf::from_character(chi, static_cast<i64>(x));
    const double v = std::abs(es::weighted_expsum(f, x, es::kInfinity, 0.25));
    const double ratio = v / std::log(x);
    ok = ok && ratio >= kLogGrowth;
    detail += "x=" + fmt(x) + " |S|/ln x=" + fmt(ratio) + "; ";
  }
  return {ok, detail};
}

Outcome c12_polya_lower() {
  const auto chis = ch::primitive_characters_below(301);
  const auto ratios = charsum::detail::parallel_map(chis.size(), [&](std::size_t i) {
    return es::max_char_sum(chis[i]).max_abs / std::sqrt(static_cast<double>(chis[i].modulus()));
  });
  double worst = 1e9;
  std::size_t where = 0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (ratios[i] < worst) {
      worst = ratios[i];
      where = i;
    }
  }
  return {worst >= kPolyaFraction,
          std::to_string(ratios.size()) + " characters, min max|S|/sqrt q = " + fmt(worst) + " at q=" +
              std::to_string(chis[where].modulus()) + " index " +
              std::to_string(chis[where].index())};
}

std::vector<charsum::extremal::GrowthRecord> g_cubic;

Outcome c13_extremal(const fs::path& dir) {
  namespace ex = charsum::extremal;
  const auto pattern = ex::build_target(3, ex::default_xi(), 13);
  g_cubic = ex::search_matching_character(pattern, 1, 1'000'000, 13);
  if (g_cubic.empty()) return {false, "no matching character with q <= 1e6"};
  const auto& w = g_cubic.front();
  // Independent check of the witness by evaluating the character.
  const auto chi = DirichletCharacter::from_index(w.q, w.index);
  bool ok = chi.order() == 3;
  for (auto [p, j] : pattern.coprime_targets(13)) {
    const auto want = std::polar(1.0, 2.0 * std::numbers::pi * j / 3.0);
    ok = ok && std::abs(chi(p) - want) <= 1e-9;
  }
  json archive = ex::to_json(w);
  archive["character"] = ch::to_json(chi);
  archive["matches"] = g_cubic.size();
  std::ofstream(dir / "extremal_witness.json") << archive.dump(2) << "\n";
  return {ok, "witness q=" + std::to_string(w.q) + " index " + std::to_string(w.index) + ", " +
                  std::to_string(g_cubic.size()) + " matches up to 1e6"};
}

// Least-squares fit y = a + b x.
std::pair<double, double> fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {(sy - b * sx) / n, b};
}

Outcome c14_diagnostics(const fs::path& dir) {
  namespace mm = charsum::mimicry;
  namespace ex = charsum::extremal;
  std::vector<std::string> notes;

  // Scan minima of D(chi, xi n^{i beta}; y)^2 / ln ln y against delta_g.
  {
    std::ofstream os(dir / "scan_min_ratios.csv");
    os << "g,q,index,xi_q,xi_index,y,delta_g,min_ratio,argmin_beta,slack\n";
    std::vector<double> betas;
    for (int i = 0; i <= 100; ++i) betas.push_back(-5.0 + 0.1 * i);
    double worst = 1e9;
    for (auto [q, g] : std::vector<std::pair<u64, int>>{{7, 3}, {13, 3}, {19, 3}, {11, 5}, {29, 7}}) {
      const auto chi = ex::order_g_character(q, g, 1);
      for (const auto& xi : {DirichletCharacter::chi_minus4(), DirichletCharacter::legendre(3)}) {
        for (double y : {1e4, 1e5, 1e6}) {
          const auto t = mm::distance_lowerbound_scan(chi, xi, y, betas);
          os << g << ',' << q << ',' << chi.index() << ',' << xi.modulus() << ',' << xi.index() << ','
             << y << ',' << t.delta_g << ',' << t.min_ratio << ',' << t.argmin_beta << ','
             << t.slack() << '\n';
          worst = std::min(worst, t.min_ratio / t.delta_g);
        }
      }
    }
    notes.push_back("scan min ratio/delta_g " + fmt(worst));
  }

  // Polya residuals: residual vs N, fitted log residual = a + b log N.
  {
    std::ofstream os(dir / "polya_residuals.csv");
    os << "q,index,t,N,residual,residual_over_envelope\n";
    std::vector<double> lx, ly;
    double c_hat = 0;  // smallest C with residual <= C (1 + q ln q / N)
    for (u64 q : {11ULL, 37ULL, 101ULL, 211ULL}) {
      const auto chi = DirichletCharacter::legendre(q);
      for (i64 N : {100, 1000, 10000, 100000}) {
        double worst = 0;
        for (int k = 1; k <= 9; ++k) {
          const double t = q * k / 10.0 + 0.25;  // never an integer, where S_chi jumps
          const auto r = es::polya_expansion(chi, t, N);
          const double env = 1.0 + static_cast<double>(q) * std::log(static_cast<double>(q)) / N;
          os << q << ',' << chi.index() << ',' << t << ',' << N << ',' << r.residual << ','
             << r.residual / env << '\n';
          c_hat = std::max(c_hat, r.residual / env);
          worst = std::max(worst, r.residual);
        }
        lx.push_back(std::log(static_cast<double>(N)));
        ly.push_back(std::log(worst));
      }
    }
    const auto [a, b] = fit(lx, ly);
    os << "# fit: log max residual = " << a << " + " << b << " log N\n";
    os << "# calibrated envelope constant C = " << c_hat << "\n";
    notes.push_back("polya exponent " + fmt(b) + ", C " + fmt(c_hat));
  }

  // Hildebrand residuals for random g.
  {
    std::ofstream os(dir / "hildebrand_residuals.csv");
    os << "seed,k,x,residual\n";
    std::vector<double> lx, ly;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      std::mt19937_64 rng(seed);
      const auto g = mf::random_function(1'000'000, rng);
      for (i64 k : {6, 30}) {
        for (double x : {1e3, 1e4, 1e5, 1e6}) {
          const auto r = es::hildebrand_residual(g, x, k);
          os << seed << ',' << k << ',' << x << ',' << r.residual << '\n';
          lx.push_back(std::log(x));
          ly.push_back(std::log(std::max(r.residual, 1e-300)));
        }
      }
    }
    const auto [a, b] = fit(lx, ly);
    os << "# fit: log residual = " << a << " + " << b << " log x\n";
    notes.push_back("hildebrand exponent " + fmt(b));
  }

  // Growth: Paley baseline and the cubic matches from criterion 13.
  {
    const auto paley = ex::growth_report(ex::paley_baseline(3, 100'000));
    std::ofstream os(dir / "growth_paley.csv");
    ex::write_csv(os, paley);
    std::ofstream(dir / "growth_paley.json") << ex::summary_json(paley).dump(2) << "\n";
    notes.push_back("paley slope " + (paley.slope ? fmt(*paley.slope) : std::string("n/a")));
  }
  if (!g_cubic.empty()) {
    const auto cubic = ex::growth_report(g_cubic);
    std::ofstream os(dir / "growth_cubic.csv");
    ex::write_csv(os, cubic);
    std::ofstream(dir / "growth_cubic.json") << ex::summary_json(cubic).dump(2) << "\n";
    notes.push_back("cubic slope " + (cubic.slope ? fmt(*cubic.slope) : std::string("n/a")));
  }
  std::string detail;
  for (const auto& n : notes) detail += n + "; ";
  return {true, "reported in " + dir.string() + ": " + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_artifacts");
  fs::create_directories(dir);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"gauss sum magnitude", c1_gauss},
      {"summation identity", c2_identity},
      {"summin closed form", c3_summin},
      {"delta_3", c4_delta3},
      {"F_N properties", c5_fn},
      {"even two-sided sums vanish", c6_vanishing},
      {"coset counts", c7_coset},
      {"triangle inequality", c8_triangle},
      {"dirichlet approximation", c9_dirichlet},
      {"twist recovery", c10_mquantity},
      {"logarithmic growth at 1/4", c11_log_growth},
      {"max character sum lower bound", c12_polya_lower},
      {"extremal sweep witness", [&] { return c13_extremal(dir); }},
      {"diagnostics", [&] { return c14_diagnostics(dir); }},
  };

  std::ofstream log(dir / "acceptance.txt", std::ios::trunc);
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool reported_only = i + 1 == 14;
    if (!o.ok && !reported_only) ++failures;
    char line[4096];
    std::snprintf(line, sizeof line, "%s %2zu %s: %s (%.1fs)\n", o.ok ? "PASS" : "FAIL", i + 1,
                  criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fputs(line, stdout);
    std::fflush(stdout);
    log << line << std::flush;
  }
  return failures == 0 ? 0 : 1;
}
