#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <ostream>
#include <vector>

#include "charsum/arith.hpp"
#include "charsum/characters.hpp"
#include "charsum/detail/parallel.hpp"
#include "charsum/detail/summation.hpp"
#include "charsum/expsums.hpp"
#include "charsum/multfun.hpp"
#include "charsum/theory.hpp"
#include "json.hpp"

namespace charsum::mimicry {

using arith::i64;
using arith::u64;
using characters::DirichletCharacter;
using multfun::CMFunction;
using cplx = std::complex<double>;

/// A value of D^2 or M together with how it was obtained.
struct MimicryReport {
  double distance_sq = 0.0;
  double minimizing_t = 0.0;  // 0 for a plain distance
  double X = 0.0;
  double T = 0.0;
  double grid_step = 0.0;
  std::size_t grid_points = 0;
  std::size_t refinements = 0;
  double refine_tol = 0.0;
};

inline nlohmann::json to_json(const MimicryReport& r) {
  return {{"distance_sq", r.distance_sq}, {"minimizing_t", r.minimizing_t},
          {"X", r.X},                     {"T", r.T},
          {"grid_step", r.grid_step},     {"grid_points", r.grid_points},
          {"refinements", r.refinements}, {"refine_tol", r.refine_tol}};
}

/// D(f, g; X)^2 = sum_{p <= X} (1 - Re f(p) conj g(p)) / p.
inline double distance_sq(const CMFunction& f, const CMFunction& g, double X) {
  if (!(X >= 1.0)) throw DomainError("distance_sq requires X >= 1");
  if (X < 2.0) return 0.0;
  charsum::detail::CompensatedSum acc;
  for (i64 p : arith::primes_up_to(X)) {
    const double re = (f.prime_value(p) * std::conj(g.prime_value(p))).real();
    acc += (1.0 - re) / static_cast<double>(p);
  }
  return acc.value();
}

inline double distance(const CMFunction& f, const CMFunction& g, double X) {
  return std::sqrt(std::max(0.0, distance_sq(f, g, X)));
}

/// Objective t -> D(f(n), n^{it}; X)^2, with f's prime data cached.
class TwistObjective {
 public:
  TwistObjective(const CMFunction& f, double X) {
    if (X >= 2.0) {
      for (i64 p : arith::primes_up_to(X)) {
        const double inv = 1.0 / static_cast<double>(p);
        coeff_.push_back(f.prime_value(p) * inv);
        inv_p_.push_back(inv);
        log_p_.push_back(std::log(static_cast<double>(p)));
      }
    }
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      lipschitz_ += std::abs(coeff_[i]) * log_p_[i];
    }
  }

  double operator()(double t) const {
    charsum::detail::CompensatedSum acc;
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      const double a = t * log_p_[i];
      // Re f(p) p^{-it} / p
      const double re = coeff_[i].real() * std::cos(a) + coeff_[i].imag() * std::sin(a);
      acc += inv_p_[i] - re;
    }
    return acc.value();
  }

  /// Values on t0, t0 + h, ..., t0 + (count-1) h via per-prime rotation.
  std::vector<double> on_grid(double t0, double h, std::size_t count) const {
    std::vector<double> out(count);
    std::vector<cplx> z(coeff_.size()), step(coeff_.size());
    for (std::size_t i = 0; i < coeff_.size(); ++i) {
      step[i] = std::polar(1.0, -h * log_p_[i]);
    }
    double base = 0.0;
    for (double v : inv_p_) base += v;
    constexpr std::size_t kResync = 64;
    for (std::size_t j = 0; j < count; ++j) {
      if (j % kResync == 0) {
        const double t = t0 + static_cast<double>(j) * h;
        for (std::size_t i = 0; i < coeff_.size(); ++i) {
          z[i] = coeff_[i] * std::polar(1.0, -t * log_p_[i]);
        }
      }
      double re = 0.0;
      for (std::size_t i = 0; i < coeff_.size(); ++i) {
        re += z[i].real();
        z[i] *= step[i];
      }
      out[j] = base - re;
    }
    return out;
  }

  /// Upper bound on |d/dt| of the objective.
  [[nodiscard]] double lipschitz() const { return lipschitz_; }
  [[nodiscard]] bool empty() const { return coeff_.empty(); }

 private:
  std::vector<cplx> coeff_;
  std::vector<double> inv_p_;
  std::vector<double> log_p_;
  double lipschitz_ = 0.0;
};

namespace detail {

inline std::pair<double, double> golden_section(const TwistObjective& obj, double lo,
                                                double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = obj(c), fd = obj(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = obj(d);
    }
  }
  const double t = 0.5 * (a + b);
  return {t, obj(t)};
}

}  // namespace detail

struct MinimizeOptions {
  double grid_factor = 0.1;  // grid step = grid_factor / ln X
  double refine_tol = 1e-9;
  std::size_t max_refinements = 512;
};

/// M(f; X, T) = min_{|t| <= T} D(f(n), n^{it}; X)^2. A grid of step
/// 0.1/ln X is followed by golden-section refinement of every grid local
/// minimum within (Lipschitz bound) x (step) of the best grid value.
inline MimicryReport m_quantity(const CMFunction& f, double X, double T,
                                MinimizeOptions opt = {}) {
  if (!(T >= 0.0)) throw DomainError("m_quantity requires T >= 0");
  if (!(X >= 1.0)) throw DomainError("m_quantity requires X >= 1");
  const TwistObjective obj(f, X);
  MimicryReport report;
  report.X = X;
  report.T = T;
  report.refine_tol = opt.refine_tol;
  report.minimizing_t = 0.0;
  report.distance_sq = obj(0.0);
  if (T == 0.0 || obj.empty()) return report;

  const double h_target = opt.grid_factor / std::log(std::max(X, 3.0));
  const auto intervals = static_cast<std::size_t>(std::ceil(2.0 * T / h_target));
  const double h = 2.0 * T / static_cast<double>(intervals);
  report.grid_step = h;
  report.grid_points = intervals + 1;
  const auto values = obj.on_grid(-T, h, intervals + 1);

  const double best_grid = *std::min_element(values.begin(), values.end());
  const double slack = obj.lipschitz() * h;
  std::vector<std::size_t> candidates;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const bool left_ok = j == 0 || values[j] <= values[j - 1];
    const bool right_ok = j + 1 == values.size() || values[j] <= values[j + 1];
    if (left_ok && right_ok && values[j] <= best_grid + slack) candidates.push_back(j);
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  if (candidates.size() > opt.max_refinements) candidates.resize(opt.max_refinements);

  for (std::size_t j : candidates) {
    const double t = -T + static_cast<double>(j) * h;
    const double lo = std::max(-T, t - h), hi = std::min(T, t + h);
    auto [tm, vm] = detail::golden_section(obj, lo, hi, opt.refine_tol);
    // The bracket endpoints are feasible too; golden section never samples them.
    for (double edge : {lo, hi}) {
      const double ve = obj(edge);
      if (ve < vm) {
        vm = ve;
        tm = edge;
      }
    }
    ++report.refinements;
    if (vm < report.distance_sq ||
        (vm == report.distance_sq && std::abs(tm) < std::abs(report.minimizing_t))) {
      report.distance_sq = vm;
      report.minimizing_t = tm;
    }
  }
  report.distance_sq = std::max(0.0, report.distance_sq);
  return report;
}

struct Candidate {
  DirichletCharacter psi;
  MimicryReport report;
};

struct NearestResult {
  DirichletCharacter xi;
  u64 conductor = 1;
  MimicryReport report;
  std::optional<Candidate> runner_up;
  std::vector<Candidate> all;  // every primitive psi scanned, in scan order
};

inline nlohmann::json to_json(const NearestResult& r) {
  nlohmann::json out = {{"xi", characters::to_json(r.xi)},
                        {"conductor", r.conductor},
                        {"report", to_json(r.report)}};
  if (r.runner_up) {
    out["runner_up"] = {{"psi", characters::to_json(r.runner_up->psi)},
                        {"report", to_json(r.runner_up->report)}};
  } else {
    out["runner_up"] = nullptr;
  }
  out["candidates"] = r.all.size();
  return out;
}

/// The primitive psi of conductor < conductor_bound minimizing
/// M(f conj psi; y, (ln y)^2). Ties go to the smaller conductor, then the
/// smaller canonical index.
inline NearestResult nearest_primitive(const CMFunction& f, double y, u64 conductor_bound,
                                       std::optional<double> T = std::nullopt) {
  if (conductor_bound < 1) throw DomainError("nearest_primitive requires conductor_bound >= 1");
  if (!(y >= 2.0)) throw DomainError("nearest_primitive requires y >= 2");
  const double window = T ? *T : std::pow(std::log(y), 2.0);
  auto psis = characters::primitive_characters_below(std::max<u64>(conductor_bound, 2));
  const i64 support = static_cast<i64>(std::floor(y));
  auto reports = charsum::detail::parallel_map(psis.size(), [&](std::size_t i) {
    const CMFunction g = f * multfun::from_character(psis[i], support).conj();
    return m_quantity(g, y, window);
  });
  NearestResult result{psis.front(), psis.front().modulus(), reports.front(), std::nullopt, {}};
  constexpr double kTieTol = 1e-12;
  std::size_t best = 0;
  for (std::size_t i = 1; i < psis.size(); ++i) {
    // psis is already in (conductor, index) order, so only a strict
    // improvement displaces the incumbent.
    if (reports[i].distance_sq < reports[best].distance_sq - kTieTol) best = i;
  }
  std::optional<std::size_t> second;
  for (std::size_t i = 0; i < psis.size(); ++i) {
    if (i == best) continue;
    if (!second || reports[i].distance_sq < reports[*second].distance_sq - kTieTol) second = i;
  }
  result.xi = psis[best];
  result.conductor = psis[best].modulus();
  result.report = reports[best];
  if (second) result.runner_up = Candidate{psis[*second], reports[*second]};
  for (std::size_t i = 0; i < psis.size(); ++i) result.all.push_back({psis[i], reports[i]});
  return result;
}

struct ScanRow {
  double beta = 0.0;
  double distance_sq = 0.0;
  double ratio = 0.0;  // distance_sq / ln ln y
};

struct ScanTable {
  int g = 0;
  double y = 0.0;
  double delta_g = 0.0;
  std::vector<ScanRow> rows;
  double min_ratio = 0.0;
  double argmin_beta = 0.0;
  [[nodiscard]] double slack() const { return min_ratio - delta_g; }
};

/// D(chi(n), xi(n) n^{i beta}; y)^2 / ln ln y over a beta grid, for chi
/// primitive of odd order g >= 3 and xi odd.
inline ScanTable distance_lowerbound_scan(const DirichletCharacter& chi,
                                          const DirichletCharacter& xi, double y,
                                          const std::vector<double>& betas) {
  if (!chi.is_primitive()) throw DomainError("distance_lowerbound_scan: chi must be primitive");
  if (chi.order() < 3 || chi.order() % 2 == 0) {
    throw DomainError("distance_lowerbound_scan: chi must have odd order >= 3");
  }
  if (chi.parity() != 1) throw DomainError("distance_lowerbound_scan: chi must be even");
  if (xi.parity() != -1) throw DomainError("distance_lowerbound_scan: xi must be odd");
  if (!(y > std::exp(1.0))) throw DomainError("distance_lowerbound_scan requires y > e");
  if (betas.empty()) throw DomainError("distance_lowerbound_scan: empty beta grid");
  const i64 support = static_cast<i64>(std::floor(y));
  const CMFunction f = multfun::from_character(chi, support);
  const CMFunction g = multfun::from_character(xi, support);
  const double loglog = std::log(std::log(y));
  ScanTable table;
  table.g = static_cast<int>(chi.order());
  table.y = y;
  table.delta_g = theory::delta_g(table.g);
  const auto d2s = charsum::detail::parallel_map(
      betas.size(), [&](std::size_t i) { return distance_sq(f, g.twisted(betas[i]), y); });
  for (std::size_t i = 0; i < betas.size(); ++i) {
    table.rows.push_back({betas[i], d2s[i], d2s[i] / loglog});
  }
  const auto it = std::min_element(table.rows.begin(), table.rows.end(),
                                   [](const ScanRow& a, const ScanRow& b) { return a.ratio < b.ratio; });
  table.min_ratio = it->ratio;
  table.argmin_beta = it->beta;
  return table;
}

inline void write_csv(std::ostream& os, const ScanTable& table) {
  os << "beta,distance_sq,ratio\n";
  for (const auto& r : table.rows) {
    os << expsums::detail::format_double(r.beta) << ','
       << expsums::detail::format_double(r.distance_sq) << ','
       << expsums::detail::format_double(r.ratio) << '\n';
  }
}

struct EquidistributionReport {
  u64 k = 0;
  double y = 0.0;
  std::vector<double> class_sums;  // sum_{p <= y, xi(p) = e(l/k)} 1/p
  double total = 0.0;              // sum_{p <= y, p does not divide m} 1/p
  std::vector<double> ratios;      // class_sum / (total / k)
  double max_deviation = 0.0;      // max |ratio - 1|
};

inline EquidistributionReport equidistribution_diagnostic(const DirichletCharacter& xi, double y) {
  if (xi.is_principal()) throw DomainError("equidistribution_diagnostic requires a nonprincipal character");
  if (!(y >= 2.0)) throw DomainError("equidistribution_diagnostic requires y >= 2");
  EquidistributionReport rep;
  rep.k = xi.order();
  rep.y = y;
  std::vector<charsum::detail::CompensatedSum> sums(rep.k);
  charsum::detail::CompensatedSum total;
  for (i64 p : arith::primes_up_to(y)) {
    const auto j = xi.phase(p);
    if (!j) continue;
    sums[*j] += 1.0 / static_cast<double>(p);
    total += 1.0 / static_cast<double>(p);
  }
  rep.total = total.value();
  for (const auto& s : sums) {
    rep.class_sums.push_back(s.value());
    const double ratio = rep.total > 0 ? s.value() * static_cast<double>(rep.k) / rep.total : 0.0;
    rep.ratios.push_back(ratio);
    rep.max_deviation = std::max(rep.max_deviation, std::abs(ratio - 1.0));
  }
  return rep;
}

/// Compares the size of sum_{n <= x, y-smooth} f(n)/n against the Halasz-type
/// prediction (ln y) e^{-M(f; y, (ln y)^2)} and the untwisted
/// (ln y) e^{-D(f, 1; y)^2}.
struct TwistProbe {
  double actual = 0.0;
  double m_prediction = 0.0;
  double d_prediction = 0.0;
  MimicryReport m_report;
  double d_value = 0.0;
};

inline TwistProbe twist_conjecture_probe(const CMFunction& f, double x, double y) {
  TwistProbe probe;
  probe.actual = std::abs(expsums::weighted_expsum(f, x, y, 0.0));
  const double ly = std::log(y);
  probe.m_report = m_quantity(f, y, ly * ly);
  probe.d_value = distance_sq(f, CMFunction::one(f.support()), y);
  probe.m_prediction = ly * std::exp(-probe.m_report.distance_sq);
  probe.d_prediction = ly * std::exp(-probe.d_value);
  return probe;
}

}  // namespace charsum::mimicry
