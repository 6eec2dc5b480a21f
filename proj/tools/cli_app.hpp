#pragma once

// The `charsum` command line. run_cli is separate from main so tests can
// drive it in-process.
//
// Exit codes: 0 success, 1 a verification failed, 2 usage or domain error,
// 3 a resource cap was hit.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "charsum/charsum.hpp"
#include "charsum/verify.hpp"
#include "json.hpp"

namespace charsum::cli {

enum Exit : int { kOk = 0, kFailed = 1, kUsage = 2, kCap = 3 };

using arith::i64;
using arith::u64;
using characters::DirichletCharacter;
using multfun::CMFunction;
using nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Character addressing: "q=<q>,index=<i>", "chi-4", "legendre:<p>", "principal:<q>".
inline DirichletCharacter parse_character(const std::string& spec) {
  std::smatch m;
  static const std::regex by_index(R"(^\s*q\s*=\s*(\d+)\s*,\s*index\s*=\s*(\d+)\s*$)");
  static const std::regex legendre(R"(^\s*legendre\s*:\s*(\d+)\s*$)");
  static const std::regex principal(R"(^\s*principal\s*:\s*(\d+)\s*$)");
  if (spec == "chi-4") return DirichletCharacter::chi_minus4();
  if (std::regex_match(spec, m, by_index)) {
    const u64 q = std::stoull(m[1]);
    if (q == 0) throw DomainError("character spec: q must be >= 1");
    return DirichletCharacter::from_index(q, std::stoull(m[2]));
  }
  if (std::regex_match(spec, m, legendre)) return DirichletCharacter::legendre(std::stoull(m[1]));
  if (std::regex_match(spec, m, principal)) {
    const u64 q = std::stoull(m[1]);
    if (q == 0) throw DomainError("character spec: q must be >= 1");
    return DirichletCharacter::principal(q);
  }
  throw DomainError("cannot parse character spec '" + spec +
                    "' (expected q=<q>,index=<i> | chi-4 | legendre:<p> | principal:<q>)");
}

/// Reals with "inf" accepted.
inline double parse_real(const std::string& text, const std::string& what) {
  if (text == "inf" || text == "infinity" || text == "Inf") return expsums::kInfinity;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw DomainError(what + ": not a number: '" + text + "'");
  }
  if (used != text.size()) throw DomainError(what + ": not a number: '" + text + "'");
  return v;
}

inline u64 parse_count(const std::string& text, const std::string& what) {
  const double v = parse_real(text, what);
  if (!(v >= 0.0) || !std::isfinite(v) || v > 1.8e19 || v != std::floor(v)) {
    throw DomainError(what + ": expected a nonnegative integer, got '" + text + "'");
  }
  return static_cast<u64>(v);
}

struct FunctionSpec {
  std::string character;
  std::string file;
  bool one = false;
  bool random = false;
  double twist = 0.0;

  void add_options(CLI::App* app) {
    app->add_option("--char", character, "character spec: q=<q>,index=<i> | chi-4 | legendre:<p>");
    app->add_option("--fn", file, "JSON file with a completely multiplicative function");
    app->add_flag("--one", one, "the constant function 1");
    app->add_flag("--random", random, "random unimodular prime values drawn from --seed");
    app->add_option("--twist", twist, "multiply by n^{it}");
  }

  [[nodiscard]] int sources() const {
    return static_cast<int>(!character.empty()) + static_cast<int>(!file.empty()) +
           static_cast<int>(one) + static_cast<int>(random);
  }

  [[nodiscard]] CMFunction build(i64 support, std::uint64_t seed) const {
    if (sources() != 1) throw DomainError("give exactly one of --char, --fn, --one, --random");
    support = std::max<i64>(support, 1);
    std::optional<CMFunction> f;
    if (!character.empty()) {
      f = multfun::from_character(parse_character(character), support);
    } else if (!file.empty()) {
      std::ifstream is(file);
      if (!is) throw DomainError("cannot open function file '" + file + "'");
      json j;
      try {
        j = json::parse(is);
      } catch (const json::exception& e) {
        throw DomainError(std::string("function file: ") + e.what());
      }
      try {
        f = multfun::function_from_json(j);
      } catch (const json::exception& e) {
        throw DomainError(std::string("function file: ") + e.what());
      }
    } else if (one) {
      f = CMFunction::one(support);
    } else {
      std::mt19937_64 rng(seed);
      f = multfun::random_function(support, rng);
    }
    return twist != 0.0 ? f->twisted(twist) : *f;
  }
};

struct Globals {
  unsigned threads = 0;
  std::uint64_t seed = 20240601;
  std::string cache_dir;
  std::string format = "json";
  std::string out_file;
  double sum_cap = 1e7;
  verify::Tolerances tol;
};

class Output {
 public:
  Output(std::ostream& stdout_stream, const std::string& path) : stdout_(stdout_stream) {
    if (!path.empty()) {
      file_.open(path, std::ios::trunc);
      if (!file_) throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : stdout_; }

 private:
  std::ostream& stdout_;
  std::ofstream file_;
};

inline json envelope(const std::string& command, json body) {
  json out = {{"command", command}, {"schema_version", kSchemaVersion}};
  out.update(body);
  return out;
}

inline json cplx_json(std::complex<double> z) { return {z.real(), z.imag()}; }

inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Character sums, multiplicative functions and mimicry diagnostics", "charsum"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  if (const char* env = std::getenv("CHARSUM_CACHE_DIR")) g.cache_dir = env;
  app.add_option("--threads", g.threads, "worker threads (0 = hardware concurrency)");
  app.add_option("--seed", g.seed, "seed for randomized suites and --random");
  app.add_option("--cache-dir", g.cache_dir, "prime cache directory (env CHARSUM_CACHE_DIR)");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--out", g.out_file, "write the main output to this file");
  app.add_option("--sum-cap", g.sum_cap, "maximum terms in one partial sum (<= 1e7)");
  app.add_option("--tol-gauss", g.tol.gauss)->check(CLI::PositiveNumber);
  app.add_option("--tol-identity", g.tol.identity)->check(CLI::PositiveNumber);
  app.add_option("--tol-summin", g.tol.summin)->check(CLI::PositiveNumber);
  app.add_option("--tol-vanishing", g.tol.vanishing)->check(CLI::PositiveNumber);
  app.add_option("--tol-triangle", g.tol.triangle)->check(CLI::PositiveNumber);

  // sum
  auto* sum = app.add_subcommand("sum", "partial sums: sum f(n)/n e(n alpha) or max_t |S_chi(t)|");
  FunctionSpec sum_fn;
  sum_fn.add_options(sum);
  std::string sum_x = "1000", sum_y = "inf";
  double sum_alpha = 0.0;
  bool sum_max = false;
  sum->add_option("--x", sum_x, "length");
  sum->add_option("--y", sum_y, "smoothness bound (inf for none)");
  sum->add_option("--alpha", sum_alpha, "frequency");
  sum->add_flag("--max", sum_max, "profile S_chi(t) for t <= q instead (needs --char)");

  // verify
  auto* ver = app.add_subcommand("verify", "run a self-check suite");
  std::string suite;
  ver->add_option("suite", suite, "gs-identity | summin | gauss | coset | triangle | vanishing")
      ->required();

  // arcs
  auto* arcs = app.add_subcommand("arcs", "classify alpha as minor / major arc");
  double arcs_alpha = 0.0;
  std::string arcs_y;
  i64 arcs_m = 1;
  std::optional<double> arcs_M;
  arcs->add_option("--alpha", arcs_alpha)->required();
  arcs->add_option("--y", arcs_y)->required();
  arcs->add_option("--m", arcs_m, "exceptional modulus")->required();
  arcs->add_option("--M", arcs_M, "override the approximation window");

  // nearest
  auto* nearest = app.add_subcommand("nearest", "nearest primitive character in the mimicry sense");
  FunctionSpec near_fn;
  near_fn.add_options(nearest);
  std::string near_y = "1e4";
  u64 near_bound = 10;
  std::optional<double> near_T;
  nearest->add_option("--y", near_y);
  nearest->add_option("--bound", near_bound, "conductor bound (exclusive)");
  nearest->add_option("--T", near_T, "twist window (default (ln y)^2)");

  // mimic
  auto* mimic = app.add_subcommand("mimic", "M(f; X, T), or D(f, g; X)^2 with --against");
  FunctionSpec mimic_fn;
  mimic_fn.add_options(mimic);
  std::string mimic_X = "1e4", mimic_against;
  double mimic_T = 10.0;
  mimic->add_option("--X", mimic_X);
  mimic->add_option("--T", mimic_T)->check(CLI::NonNegativeNumber);
  mimic->add_option("--against", mimic_against, "character spec for a plain distance");

  // scan
  auto* scan = app.add_subcommand("scan", "D(chi, xi n^{i beta}; y)^2 / ln ln y over a beta grid");
  std::string scan_chi, scan_xi = "chi-4", scan_y = "1e5";
  double beta_min = -5.0, beta_max = 5.0;
  int beta_steps = 101;
  scan->add_option("--char", scan_chi, "odd-order primitive character")->required();
  scan->add_option("--xi", scan_xi, "odd character");
  scan->add_option("--y", scan_y);
  scan->add_option("--beta-min", beta_min);
  scan->add_option("--beta-max", beta_max);
  scan->add_option("--beta-steps", beta_steps)->check(CLI::Range(1, 1'000'000));

  // equidist
  auto* equi = app.add_subcommand("equidist", "reciprocal prime sums over the classes of xi");
  std::string equi_xi = "chi-4", equi_y = "1e6";
  equi->add_option("--xi", equi_xi);
  equi->add_option("--y", equi_y);

  // extremal
  auto* extr = app.add_subcommand("extremal", "sweep order-g characters matching the extremal pattern");
  int extr_g = 3;
  std::string extr_xi = "chi-4", extr_qmax = "1e6", extr_resume = "extremal-run";
  i64 extr_P = 13, extr_pstar = 13;
  double extr_checkpoint = 10.0;
  extr->add_option("--g", extr_g, "odd order");
  extr->add_option("--xi", extr_xi, "odd auxiliary character");
  extr->add_option("--P", extr_P, "pattern length");
  extr->add_option("--pstar", extr_pstar, "required matched prefix");
  extr->add_option("--qmax", extr_qmax);
  extr->add_option("--resume", extr_resume, "state directory (created or resumed)");
  extr->add_option("--checkpoint", extr_checkpoint, "seconds between checkpoints")
      ->check(CLI::PositiveNumber);

  // paley
  auto* paley = app.add_subcommand("paley", "maximal sums of Legendre symbols");
  std::string paley_qmin = "3", paley_qmax = "1e4";
  paley->add_option("--qmin", paley_qmin);
  paley->add_option("--qmax", paley_qmax);

  // polya
  auto* polya = app.add_subcommand("polya", "truncated Polya expansion of S_chi(t)");
  std::string polya_chi;
  double polya_t = 0.5;
  std::string polya_N = "1000";
  polya->add_option("--char", polya_chi)->required();
  polya->add_option("--t", polya_t);
  polya->add_option("--N", polya_N);

  // hildebrand
  auto* hild = app.add_subcommand("hildebrand", "coprimality-restricted logarithmic means");
  FunctionSpec hild_fn;
  hild_fn.add_options(hild);
  std::string hild_x = "1e5";
  i64 hild_k = 6;
  hild->add_option("--x", hild_x);
  hild->add_option("--k", hild_k);

  // conjecture
  auto* conj = app.add_subcommand("conjecture", "compare M-based and D(f,1)-based size predictions");
  FunctionSpec conj_fn;
  conj_fn.add_options(conj);
  std::string conj_x = "1e5", conj_y = "1e3";
  conj->add_option("--x", conj_x);
  conj->add_option("--y", conj_y);

  // character
  auto* charc = app.add_subcommand("character", "describe a character");
  std::string char_spec;
  charc->add_option("spec", char_spec)->required();

  // bound
  auto* bound = app.add_subcommand("bound", "evaluate the right-hand side of an upper bound");
  std::string bound_kind;
  double b_y = 1e6, b_x = 1e6, b_r = 2, b_Mval = 0.0, b_T = 100.0;
  i64 b_m = 4, b_phi = 2, b_rint = 2;
  theory::BoundOptions bopt;
  bound->add_option("kind", bound_kind)
      ->required()
      ->check(CLI::IsMember({"theorem1", "minor", "major", "halasz"}));
  bound->add_option("--y", b_y);
  bound->add_option("--x", b_x);
  bound->add_option("--r", b_r);
  bound->add_option("--rint", b_rint, "integer r for the major-arc bound");
  bound->add_option("--m", b_m);
  bound->add_option("--phi-m", b_phi);
  bound->add_option("--M-value", b_Mval, "value of the mimicry quantity M");
  bound->add_option("--T", b_T);
  bound->add_option("--o1", bopt.o1);
  bound->add_option("--constant", bopt.constant);
  bound->add_option("--C", bopt.C);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "charsum: " << e.what() << "\n";
    return kUsage;
  }

  try {
    charsum::detail::set_parallelism(g.threads);
    if (!g.cache_dir.empty()) arith::PrimeCache::instance().set_directory(g.cache_dir);
    if (!(g.sum_cap >= 1.0) || g.sum_cap > static_cast<double>(expsums::kSumCap)) {
      throw DomainError("--sum-cap must lie in [1, 1e7]");
    }
    arith::limits().sum_cap = static_cast<i64>(g.sum_cap);
    Output output(out, g.out_file);
    std::ostream& os = output.stream();
    const bool csv = g.format == "csv";

    if (*sum) {
      const double x = parse_real(sum_x, "--x");
      const double y = parse_real(sum_y, "--y");
      expsums::SumProfile profile;
      if (sum_max) {
        if (sum_fn.character.empty() || sum_fn.sources() != 1) {
          throw DomainError("--max needs --char and no other function source");
        }
        profile = expsums::max_char_sum(parse_character(sum_fn.character));
      } else {
        if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("--x must be a finite real >= 1");
        const auto support = static_cast<i64>(std::floor(std::isfinite(y) ? std::min(x, y) : x));
        const CMFunction f = sum_fn.build(support, g.seed);
        profile = expsums::weighted_expsum_profile(f, x, y, sum_alpha);
      }
      if (csv) {
        expsums::write_csv(os, profile);
      } else {
        os << envelope("sum", expsums::summary_json(profile)).dump(2) << "\n";
      }
      return kOk;
    }

    if (*ver) {
      const auto& names = verify::suite_names();
      if (std::find(names.begin(), names.end(), suite) == names.end()) {
        err << "charsum: unknown suite '" << suite << "'\n";
        return kUsage;
      }
      verify::SuiteConfig cfg;
      cfg.tol = g.tol;
      cfg.seed = g.seed;
      const auto report = verify::run_suite(suite, cfg);
      if (csv) {
        os << "suite,passed,failed,ok\n"
           << report.suite << ',' << report.passed << ',' << report.failed << ','
           << (report.ok() ? "true" : "false") << "\n";
      } else {
        os << envelope("verify", verify::to_json(report)).dump(2) << "\n";
      }
      if (!report.ok()) {
        err << "charsum: " << report.failed << " case(s) of suite " << suite << " failed\n";
        return kFailed;
      }
      return kOk;
    }

    if (*arcs) {
      const auto c = dioph::classify_arc(arcs_alpha, parse_real(arcs_y, "--y"), arcs_m, arcs_M);
      os << envelope("arcs", dioph::to_json(c, arcs_alpha)).dump(2) << "\n";
      return kOk;
    }

    if (*nearest) {
      const double y = parse_real(near_y, "--y");
      if (!(y >= 2.0) || !std::isfinite(y)) throw DomainError("--y must be a finite real >= 2");
      const CMFunction f = near_fn.build(static_cast<i64>(std::floor(y)), g.seed);
      const auto r = mimicry::nearest_primitive(f, y, near_bound, near_T);
      json body = mimicry::to_json(r);
      body["y"] = y;
      body["bound"] = near_bound;
      os << envelope("nearest", body).dump(2) << "\n";
      return kOk;
    }

    if (*mimic) {
      const double X = parse_real(mimic_X, "--X");
      if (!(X >= 1.0) || !std::isfinite(X)) throw DomainError("--X must be a finite real >= 1");
      const CMFunction f = mimic_fn.build(static_cast<i64>(std::floor(X)), g.seed);
      json body;
      if (!mimic_against.empty()) {
        const CMFunction h =
            multfun::from_character(parse_character(mimic_against), static_cast<i64>(std::floor(X)));
        mimicry::MimicryReport rep;
        rep.distance_sq = mimicry::distance_sq(f, h, X);
        rep.X = X;
        body = mimicry::to_json(rep);
        body["mode"] = "distance";
      } else {
        body = mimicry::to_json(mimicry::m_quantity(f, X, mimic_T));
        body["mode"] = "minimized";
      }
      os << envelope("mimic", body).dump(2) << "\n";
      return kOk;
    }

    if (*scan) {
      const double y = parse_real(scan_y, "--y");
      std::vector<double> betas;
      for (int i = 0; i < beta_steps; ++i) {
        betas.push_back(beta_steps == 1 ? beta_min
                                        : beta_min + (beta_max - beta_min) * i / (beta_steps - 1));
      }
      const auto table = mimicry::distance_lowerbound_scan(parse_character(scan_chi),
                                                           parse_character(scan_xi), y, betas);
      if (csv) {
        mimicry::write_csv(os, table);
      } else {
        os << envelope("scan", {{"g", table.g},
                                {"y", table.y},
                                {"delta_g", table.delta_g},
                                {"min_ratio", table.min_ratio},
                                {"argmin_beta", table.argmin_beta},
                                {"slack", table.slack()},
                                {"points", table.rows.size()}})
                  .dump(2)
           << "\n";
      }
      return kOk;
    }

    if (*equi) {
      const auto rep = mimicry::equidistribution_diagnostic(parse_character(equi_xi),
                                                            parse_real(equi_y, "--y"));
      os << envelope("equidist", {{"k", rep.k},
                                  {"y", rep.y},
                                  {"class_sums", rep.class_sums},
                                  {"total", rep.total},
                                  {"ratios", rep.ratios},
                                  {"max_deviation", rep.max_deviation}})
                .dump(2)
         << "\n";
      return kOk;
    }

    if (*extr) {
      extremal::SweepConfig cfg;
      cfg.g = extr_g;
      cfg.xi = parse_character(extr_xi);
      cfg.P = extr_P;
      cfg.p_star = extr_pstar;
      cfg.q_max = parse_count(extr_qmax, "--qmax");
      cfg.checkpoint_every =
          std::chrono::milliseconds(static_cast<std::int64_t>(extr_checkpoint * 1000.0));
      if (cfg.p_star > cfg.P) throw DomainError("--pstar must not exceed --P");
      const auto result = extremal::run_sweep(cfg, extr_resume);
      json body = {{"g", cfg.g},
                   {"xi", characters::to_json(cfg.xi)},
                   {"P", cfg.P},
                   {"p_star", cfg.p_star},
                   {"q_max", cfg.q_max},
                   {"state_dir", extr_resume},
                   {"resumed", result.resumed},
                   {"last_q", result.last_q},
                   {"records", result.records.size()}};
      if (!result.records.empty()) {
        const auto summary = extremal::growth_report(result.records);
        body["summary"] = extremal::summary_json(summary);
        body["witness"] = extremal::to_json(result.records.front());
        std::ofstream csv_file(std::filesystem::path(extr_resume) / "growth.csv", std::ios::trunc);
        extremal::write_csv(csv_file, summary);
        if (csv) extremal::write_csv(os, summary);
      } else {
        body["summary"] = nullptr;
        body["witness"] = nullptr;
        if (csv) os << "family,q,index,g,max_abs,ratio,running_max,matched_prefix\n";
      }
      if (!csv) os << envelope("extremal", body).dump(2) << "\n";
      return kOk;
    }

    if (*paley) {
      const auto records =
          extremal::paley_baseline(parse_count(paley_qmin, "--qmin"), parse_count(paley_qmax, "--qmax"));
      if (records.empty()) throw DomainError("paley: no odd primes in range");
      const auto summary = extremal::growth_report(records);
      if (csv) {
        extremal::write_csv(os, summary);
      } else {
        os << envelope("paley", extremal::summary_json(summary)).dump(2) << "\n";
      }
      return kOk;
    }

    if (*polya) {
      const auto chi = parse_character(polya_chi);
      const auto r = expsums::polya_expansion(chi, polya_t, static_cast<i64>(parse_count(polya_N, "--N")));
      os << envelope("polya", {{"character", characters::to_json(chi)},
                               {"t", polya_t},
                               {"main_term", cplx_json(r.main_term)},
                               {"exact", cplx_json(r.exact)},
                               {"residual", r.residual}})
                .dump(2)
         << "\n";
      return kOk;
    }

    if (*hild) {
      const double x = parse_real(hild_x, "--x");
      if (!(x >= 1.0) || !std::isfinite(x)) throw DomainError("--x must be a finite real >= 1");
      const CMFunction f = hild_fn.build(static_cast<i64>(std::floor(x)), g.seed);
      const auto r = expsums::hildebrand_residual(f, x, hild_k);
      os << envelope("hildebrand", {{"x", x},
                                    {"k", hild_k},
                                    {"lhs", cplx_json(r.lhs)},
                                    {"main", cplx_json(r.main)},
                                    {"residual", r.residual}})
                .dump(2)
         << "\n";
      return kOk;
    }

    if (*conj) {
      const double x = parse_real(conj_x, "--x");
      const double y = parse_real(conj_y, "--y");
      if (!(y >= 2.0) || !std::isfinite(y)) throw DomainError("--y must be a finite real >= 2");
      const CMFunction f = conj_fn.build(static_cast<i64>(std::floor(y)), g.seed);
      const auto p = mimicry::twist_conjecture_probe(f, x, y);
      os << envelope("conjecture", {{"x", x},
                                    {"y", y},
                                    {"actual", p.actual},
                                    {"m_prediction", p.m_prediction},
                                    {"d_prediction", p.d_prediction},
                                    {"m", mimicry::to_json(p.m_report)},
                                    {"d_sq", p.d_value}})
                .dump(2)
         << "\n";
      return kOk;
    }

    if (*charc) {
      const auto chi = parse_character(char_spec);
      json body = characters::to_json(chi);
      body["primitive"] = chi.is_primitive();
      body["gauss_sum"] = chi.modulus() <= characters::kGaussSumCap
                              ? cplx_json(characters::gauss_sum(chi).value)
                              : json(nullptr);
      os << envelope("character", body).dump(2) << "\n";
      return kOk;
    }

    if (*bound) {
      theory::BoundValue v;
      if (bound_kind == "theorem1") {
        v = theory::bound_rhs_theorem1(b_y, b_Mval, bopt);
      } else if (bound_kind == "minor") {
        v = theory::bound_rhs_minor(b_r, b_y, bopt);
      } else if (bound_kind == "major") {
        v = theory::bound_rhs_major(b_rint, b_m, b_phi, b_y, b_Mval, bopt);
      } else {
        v = theory::bound_rhs_halasz(b_x, b_T, b_Mval, bopt);
      }
      os << envelope("bound", theory::to_json(v)).dump(2) << "\n";
      return kOk;
    }
  } catch (const CapExceeded& e) {
    err << "charsum: resource cap: " << e.what() << "\n";
    return kCap;
  } catch (const Error& e) {
    err << "charsum: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "charsum: error: " << e.what() << "\n";
    return kFailed;
  }
  return kUsage;
}

}  // namespace charsum::cli
