#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/characters.hpp"
#include "charsum/detail/parallel.hpp"
#include "charsum/detail/summation.hpp"
#include "charsum/expsums.hpp"
#include "charsum/theory.hpp"
#include "json.hpp"

namespace charsum::extremal {

using arith::i64;
using arith::u64;
using characters::DirichletCharacter;

/// z_p = e(root_index[p] / g) for each prime p <= P.
struct TargetPattern {
  int g = 3;
  DirichletCharacter xi;
  i64 P = 0;
  std::map<i64, int> root_index;
  double achieved_sum = 0.0;  // sum_{p <= P} Re z_p conj(xi(p)) / p

  /// Primes p <= limit coprime to g, in increasing order, with their targets.
  [[nodiscard]] std::vector<std::pair<i64, int>> coprime_targets(i64 limit) const {
    std::vector<std::pair<i64, int>> out;
    for (auto [p, j] : root_index) {
      if (p > limit) break;
      if (g % p != 0) out.emplace_back(p, j);
    }
    return out;
  }
};

/// The odd character used when none is given: chi_{-4}, whose order 2 is
/// coprime to every odd g.
inline DirichletCharacter default_xi() { return DirichletCharacter::chi_minus4(); }

/// Per prime, the z in mu_g maximizing Re z conj(xi(p)); ties go to the
/// smallest argument. z = 0 is never optimal for odd g.
inline TargetPattern build_target(int g, const DirichletCharacter& xi, i64 P) {
  if (g < 3 || g % 2 == 0) throw DomainError("build_target requires an odd g >= 3");
  if (xi.parity() != -1) throw DomainError("build_target requires an odd xi");
  if (P < 2) throw DomainError("build_target requires P >= 2");
  TargetPattern out{g, xi, P, {}, 0.0};
  const auto k = static_cast<i64>(xi.order());
  const i64 gk = g * k;
  charsum::detail::CompensatedSum sum;
  for (i64 p : arith::primes_up_to(static_cast<double>(P))) {
    const auto a = xi.phase(p);
    if (!a) {
      out.root_index[p] = 0;  // Re z * 0 = 0 for every z
      continue;
    }
    // Re e(j/g - a/k) = cos(2 pi (jk - ag) / gk): minimize the circular distance.
    int best_j = 0;
    i64 best_dist = gk + 1;
    for (int j = 0; j < g; ++j) {
      i64 diff = ((j * k - static_cast<i64>(*a) * g) % gk + gk) % gk;
      diff = std::min(diff, gk - diff);
      if (diff < best_dist) {
        best_dist = diff;
        best_j = j;
      }
    }
    out.root_index[p] = best_j;
    sum += std::cos(2.0 * theory::kPi * static_cast<double>(best_dist) / static_cast<double>(gk)) /
           static_cast<double>(p);
  }
  out.achieved_sum = sum.value();
  return out;
}

struct GrowthRecord {
  std::string family;  // "order-g" or "paley"
  u64 q = 0;
  u64 index = 0;  // canonical character index mod q
  int g = 2;
  double max_abs = 0.0;
  double ratio = 0.0;
  i64 matched_prefix = 0;  // -1 when not applicable
};

inline nlohmann::json to_json(const GrowthRecord& r) {
  return {{"family", r.family},       {"q", r.q},
          {"index", r.index},         {"g", r.g},
          {"max_abs", r.max_abs},     {"ratio", r.ratio},
          {"matched_prefix", r.matched_prefix}};
}

inline GrowthRecord record_from_json(const nlohmann::json& j) {
  return {j.at("family").get<std::string>(), j.at("q").get<u64>(),
          j.at("index").get<u64>(),          j.at("g").get<int>(),
          j.at("max_abs").get<double>(),     j.at("ratio").get<double>(),
          j.at("matched_prefix").get<i64>()};
}

/// sqrt(q) (ln ln q)^{1 - delta_g}, and sqrt(q) ln ln q for g = 2.
inline double normalizer(u64 q, int g) {
  if (q < 3) throw DomainError("normalizer requires q >= 3");
  const double ll = std::log(std::log(static_cast<double>(q)));
  const double exponent = g == 2 ? 1.0 : 1.0 - theory::delta_g(g);
  return std::sqrt(static_cast<double>(q)) * std::pow(ll, exponent);
}

namespace detail {

/// max_{t <= q} |sum_{n <= t} e(j ind(n) / g)| for prime q and primitive root r.
inline double max_power_residue_sum(u64 q, u64 r, int g, int j) {
  std::vector<std::uint16_t> ind(q, 0);
  u64 x = 1;
  for (u64 e = 0; e + 1 < q; ++e) {
    ind[x] = static_cast<std::uint16_t>(e % static_cast<u64>(g));
    x = arith::mul_mod(x, r, q);
  }
  std::vector<std::complex<double>> roots(static_cast<std::size_t>(g));
  for (int l = 0; l < g; ++l) roots[l] = charsum::detail::unit_root(static_cast<long long>(l) * j, g);
  charsum::detail::CompensatedComplexSum s;
  double best = 0.0;
  for (u64 n = 1; n < q; ++n) {
    s += roots[ind[n]];
    best = std::max(best, std::abs(s.value()));
  }
  return best;  // S(q) = 0
}

/// ind(p) mod g relative to r, via p^{(q-1)/g} = (r^{(q-1)/g})^s.
inline int index_mod_g(u64 p, u64 q, u64 r, int g) {
  const u64 e = (q - 1) / static_cast<u64>(g);
  const u64 h = arith::pow_mod(r, e, q);
  const u64 x = arith::pow_mod(p % q, e, q);
  u64 y = 1;
  for (int s = 0; s < g; ++s) {
    if (y == x) return s;
    y = arith::mul_mod(y, h, q);
  }
  throw Error("index_mod_g: no discrete log found");
}

}  // namespace detail

/// The character mod prime q with chi(r) = e(j/g), r the smallest primitive root.
inline DirichletCharacter order_g_character(u64 q, int g, int j) {
  if (!arith::is_prime(q) || (q - 1) % static_cast<u64>(g) != 0) {
    throw DomainError("order_g_character requires a prime q = 1 mod g");
  }
  return {arith::unit_group(q), {static_cast<u64>(j) * ((q - 1) / static_cast<u64>(g))}};
}

struct SearchOptions {
  bool compute_max = true;
};

/// All order-g characters mod q (prime, q = 1 mod g) with matched_prefix >= P*.
inline std::vector<GrowthRecord> score_modulus(const TargetPattern& pattern, u64 q, i64 p_star,
                                               const SearchOptions& opt = {}) {
  std::vector<GrowthRecord> out;
  const int g = pattern.g;
  const u64 r = arith::primitive_root(q);
  const auto targets = pattern.coprime_targets(pattern.P);
  std::vector<int> s(targets.size(), -1);  // -1: p = q, chi(p) = 0
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (static_cast<u64>(targets[i].first) % q != 0) {
      s[i] = detail::index_mod_g(static_cast<u64>(targets[i].first), q, r, g);
    }
  }
  for (int j = 1; j < g; ++j) {
    if (std::gcd(j, g) != 1) continue;
    i64 prefix = pattern.P;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (s[i] < 0 || (j * s[i]) % g != targets[i].second) {
        prefix = targets[i].first - 1;
        break;
      }
    }
    if (prefix < p_star) continue;
    GrowthRecord rec;
    rec.family = "order-" + std::to_string(g);
    rec.q = q;
    rec.index = static_cast<u64>(j) * ((q - 1) / static_cast<u64>(g));
    rec.g = g;
    rec.matched_prefix = prefix;
    if (opt.compute_max) {
      rec.max_abs = detail::max_power_residue_sum(q, r, g, j);
      rec.ratio = rec.max_abs / normalizer(q, g);
    }
    out.push_back(rec);
  }
  return out;
}

/// Primes q in [q_lo, q_hi] with q = 1 mod g.
inline std::vector<u64> sweep_moduli(int g, u64 q_lo, u64 q_hi) {
  std::vector<u64> out;
  if (q_hi < 2 || q_hi < q_lo) return out;
  for (i64 q : arith::primes_up_to(static_cast<double>(q_hi))) {
    if (static_cast<u64>(q) >= q_lo && (q - 1) % g == 0) out.push_back(static_cast<u64>(q));
  }
  return out;
}

inline std::vector<GrowthRecord> search_matching_character(const TargetPattern& pattern,
                                                           u64 q_lo, u64 q_hi, i64 p_star,
                                                           const SearchOptions& opt = {}) {
  if (p_star > pattern.P) throw DomainError("search: prime target exceeds the pattern length");
  const auto qs = sweep_moduli(pattern.g, q_lo, q_hi);
  if (qs.empty()) throw DomainError("search: no primes q = 1 mod g in range");
  auto per_q = charsum::detail::parallel_map(
      qs.size(), [&](std::size_t i) { return score_modulus(pattern, qs[i], p_star, opt); });
  std::vector<GrowthRecord> out;
  for (auto& v : per_q) out.insert(out.end(), v.begin(), v.end());
  return out;
}

/// Paley-type baseline: quadratic characters mod odd primes in [q_lo, q_hi].
inline GrowthRecord paley_record(u64 q) {
  if (q < 3 || !arith::is_prime(q)) throw DomainError("paley_baseline requires odd primes");
  std::vector<char> residue(q, 0);
  for (u64 k = 1; k <= q / 2; ++k) residue[k * k % q] = 1;
  i64 s = 0, best = 0;
  for (u64 n = 1; n < q; ++n) {
    s += residue[n] ? 1 : -1;
    best = std::max(best, s < 0 ? -s : s);
  }
  GrowthRecord rec;
  rec.family = "paley";
  rec.q = q;
  rec.index = (q - 1) / 2;
  rec.g = 2;
  rec.max_abs = static_cast<double>(best);
  rec.ratio = rec.max_abs / normalizer(q, 2);
  rec.matched_prefix = -1;
  return rec;
}

inline std::vector<GrowthRecord> paley_baseline(const std::vector<u64>& primes) {
  return charsum::detail::parallel_map(primes.size(),
                                       [&](std::size_t i) { return paley_record(primes[i]); });
}

inline std::vector<GrowthRecord> paley_baseline(u64 q_lo, u64 q_hi) {
  std::vector<u64> qs;
  if (q_hi >= 3) {
    for (i64 q : arith::primes_up_to(static_cast<double>(q_hi))) {
      if (q >= 3 && static_cast<u64>(q) >= q_lo) qs.push_back(static_cast<u64>(q));
    }
  }
  return paley_baseline(qs);
}

struct GrowthRow {
  GrowthRecord record;
  double running_max = 0.0;
};

struct GrowthSummary {
  std::vector<GrowthRow> rows;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double mean_ratio = 0.0;
  std::optional<double> slope;  // least squares of ratio on ln ln q
  std::optional<double> intercept;
};

inline GrowthSummary growth_report(std::vector<GrowthRecord> records) {
  if (records.empty()) throw DomainError("growth_report requires at least one record");
  std::stable_sort(records.begin(), records.end(),
                   [](const GrowthRecord& a, const GrowthRecord& b) {
                     return a.q != b.q ? a.q < b.q : a.index < b.index;
                   });
  GrowthSummary out;
  out.min_ratio = records.front().ratio;
  out.max_ratio = records.front().ratio;
  double running = 0.0;
  charsum::detail::CompensatedSum sx, sy, sxx, sxy, total;
  for (const auto& r : records) {
    running = std::max(running, r.ratio);
    out.rows.push_back({r, running});
    out.min_ratio = std::min(out.min_ratio, r.ratio);
    out.max_ratio = std::max(out.max_ratio, r.ratio);
    total += r.ratio;
    const double x = std::log(std::log(static_cast<double>(r.q)));
    sx += x;
    sy += r.ratio;
    sxx += x * x;
    sxy += x * r.ratio;
  }
  const auto n = static_cast<double>(records.size());
  out.mean_ratio = total.value() / n;
  const double denom = n * sxx.value() - sx.value() * sx.value();
  if (records.size() >= 2 && std::abs(denom) > 1e-12 * n * sxx.value()) {
    const double slope = (n * sxy.value() - sx.value() * sy.value()) / denom;
    out.slope = slope;
    out.intercept = (sy.value() - slope * sx.value()) / n;
  }
  return out;
}

inline void write_csv(std::ostream& os, const GrowthSummary& s) {
  os << "family,q,index,g,max_abs,ratio,running_max,matched_prefix\n";
  for (const auto& row : s.rows) {
    const auto& r = row.record;
    os << r.family << ',' << r.q << ',' << r.index << ',' << r.g << ','
       << expsums::detail::format_double(r.max_abs) << ','
       << expsums::detail::format_double(r.ratio) << ','
       << expsums::detail::format_double(row.running_max) << ',' << r.matched_prefix << '\n';
  }
}

inline nlohmann::json summary_json(const GrowthSummary& s) {
  return {{"records", s.rows.size()},
          {"min_ratio", s.min_ratio},
          {"max_ratio", s.max_ratio},
          {"mean_ratio", s.mean_ratio},
          {"slope", s.slope ? nlohmann::json(*s.slope) : nlohmann::json(nullptr)},
          {"intercept", s.intercept ? nlohmann::json(*s.intercept) : nlohmann::json(nullptr)},
          {"slope_defined", s.slope.has_value()}};
}

// ---------------------------------------------------------------------------
// Resumable sweeps. <dir>/records.jsonl holds one GrowthRecord per line and
// <dir>/resume.json the last fully processed q plus the sweep parameters.

struct SweepConfig {
  int g = 3;
  DirichletCharacter xi = default_xi();
  i64 P = 13;
  i64 p_star = 13;
  u64 q_max = 1'000'000;
  std::chrono::milliseconds checkpoint_every{10'000};
  std::size_t block = 512;  // moduli per parallel batch
};

struct SweepResult {
  std::vector<GrowthRecord> records;  // all records in the directory, by q
  u64 last_q = 0;
  bool resumed = false;
  std::size_t checkpoints = 0;
};

namespace detail {

inline nlohmann::json sweep_params(const SweepConfig& c) {
  return {{"g", c.g}, {"xi", characters::to_json(c.xi)}, {"P", c.P}, {"p_star", c.p_star}};
}

inline void write_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    os << text;
    if (!os) throw Error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace detail

inline SweepResult run_sweep(const SweepConfig& config, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const auto records_path = dir / "records.jsonl";
  const auto resume_path = dir / "resume.json";
  const auto params = detail::sweep_params(config);
  const auto pattern = build_target(config.g, config.xi, config.P);

  SweepResult result;
  if (fs::exists(resume_path)) {
    std::ifstream is(resume_path);
    const auto state = nlohmann::json::parse(is);
    if (state.at("params") != params) {
      throw DomainError("resume state in " + dir.string() + " was written with other parameters");
    }
    result.last_q = state.at("last_q").get<u64>();
    result.resumed = true;
  }
  // Keep only records covered by the resume marker.
  if (fs::exists(records_path)) {
    std::ifstream is(records_path);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      auto rec = record_from_json(nlohmann::json::parse(line));
      if (result.resumed && rec.q <= result.last_q) result.records.push_back(std::move(rec));
    }
  }
  {
    std::ofstream os(records_path, std::ios::trunc);
    for (const auto& r : result.records) os << to_json(r).dump() << '\n';
  }

  const auto qs = sweep_moduli(config.g, result.last_q + 1, config.q_max);
  std::ofstream out(records_path, std::ios::app);
  auto last_checkpoint = std::chrono::steady_clock::now();
  auto checkpoint = [&](u64 last_q) {
    out.flush();
    detail::write_atomic(resume_path, nlohmann::json{{"params", params}, {"last_q", last_q}}.dump());
    ++result.checkpoints;
    last_checkpoint = std::chrono::steady_clock::now();
  };
  for (std::size_t start = 0; start < qs.size(); start += config.block) {
    const std::size_t count = std::min(config.block, qs.size() - start);
    auto batch = charsum::detail::parallel_map(count, [&](std::size_t i) {
      return score_modulus(pattern, qs[start + i], config.p_star);
    });
    for (auto& v : batch) {
      for (auto& r : v) {
        out << to_json(r).dump() << '\n';
        result.records.push_back(std::move(r));
      }
    }
    result.last_q = qs[start + count - 1];
    if (std::chrono::steady_clock::now() - last_checkpoint >= config.checkpoint_every) {
      checkpoint(result.last_q);
    }
  }
  result.last_q = std::max(result.last_q, config.q_max);
  checkpoint(result.last_q);
  return result;
}

}  // namespace charsum::extremal
