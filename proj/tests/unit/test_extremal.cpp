#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <unistd.h>

#include "charsum/expsums.hpp"
#include "charsum/extremal.hpp"
#include "support/oracles.hpp"

namespace ex = charsum::extremal;
namespace ch = charsum::characters;
using ch::DirichletCharacter;
using charsum::arith::i64;
using charsum::arith::u64;
using cplx = std::complex<double>;

namespace {

// Largest prefix bound matched by chi against the pattern, computed by evaluating chi.
i64 prefix_by_evaluation(const ex::TargetPattern& pat, const DirichletCharacter& chi) {
  for (auto [p, j] : pat.coprime_targets(pat.P)) {
    const cplx want = std::polar(1.0, 2.0 * std::numbers::pi * j / pat.g);
    if (std::abs(chi(p) - want) > 1e-9) return p - 1;
  }
  return pat.P;
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / (name + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST(Target, ChiMinus4CubeRoots) {
  const auto pat = ex::build_target(3, DirichletCharacter::chi_minus4(), 13);
  // p = 2: xi(2) = 0, every z ties; p = 3: xi = -1, nearest cube roots e(1/3), e(2/3) tie.
  EXPECT_EQ(pat.root_index.at(2), 0);
  EXPECT_EQ(pat.root_index.at(3), 1);
  EXPECT_EQ(pat.root_index.at(5), 0);   // xi(5) = 1
  EXPECT_EQ(pat.root_index.at(13), 0);  // xi(13) = 1
  EXPECT_EQ(pat.root_index.at(7), 1);   // xi(7) = -1
  EXPECT_EQ(pat.root_index.at(11), 1);  // xi(11) = -1
  // Re z conj(xi(p)) is 1 at p = 1 mod 4 and 1/2 at p = 3 mod 4.
  const double expected = 0.5 / 3 + 1.0 / 5 + 0.5 / 7 + 0.5 / 11 + 1.0 / 13;
  EXPECT_NEAR(pat.achieved_sum, expected, 1e-15);
  const auto coprime = pat.coprime_targets(13);
  ASSERT_EQ(coprime.size(), 5u);
  EXPECT_EQ(coprime.front().first, 2);
}

TEST(Target, MaximizesRealPartForEveryPrime) {
  for (int g : {3, 5, 7, 9}) {
    for (const auto& xi : ch::primitive_characters_below(30)) {
      if (xi.parity() != -1) continue;
      const auto pat = ex::build_target(g, xi, 60);
      for (auto [p, j] : pat.root_index) {
        const cplx v = xi(p);
        double best = -2;
        for (int l = 0; l < g; ++l) {
          best = std::max(best, (std::polar(1.0, 2.0 * std::numbers::pi * l / g) * std::conj(v)).real());
        }
        const double got = (std::polar(1.0, 2.0 * std::numbers::pi * j / g) * std::conj(v)).real();
        EXPECT_NEAR(got, best, 1e-12) << g << " " << xi.modulus() << " " << p;
      }
    }
  }
  EXPECT_THROW(ex::build_target(4, DirichletCharacter::chi_minus4(), 13), charsum::DomainError);
  EXPECT_THROW(ex::build_target(3, DirichletCharacter::legendre(5), 13), charsum::DomainError);
}

TEST(Score, PrefixMatchesCharacterEvaluation) {
  const auto pat = ex::build_target(3, ex::default_xi(), 13);
  for (u64 q : {7ULL, 13ULL, 19ULL, 31ULL, 37ULL, 43ULL, 61ULL, 67ULL, 73ULL, 79ULL, 97ULL}) {
    const auto recs = ex::score_modulus(pat, q, 0);
    ASSERT_EQ(recs.size(), 2u) << q;
    for (const auto& rec : recs) {
      const auto chi = DirichletCharacter::from_index(q, rec.index);
      EXPECT_EQ(chi.order(), 3u);
      EXPECT_EQ(rec.matched_prefix, prefix_by_evaluation(pat, chi)) << q;
      EXPECT_NEAR(rec.max_abs, charsum::expsums::max_char_sum(chi).max_abs, 1e-9) << q;
      EXPECT_NEAR(rec.ratio, rec.max_abs / ex::normalizer(q, 3), 1e-15);
    }
  }
}

TEST(Score, OrderGCharacterIsExact) {
  for (u64 q : {31ULL, 101ULL, 151ULL}) {
    for (int g : {3, 5}) {
      if ((q - 1) % g) continue;
      for (int j = 1; j < g; ++j) {
        const auto chi = ex::order_g_character(q, g, j);
        EXPECT_EQ(chi.order(), static_cast<u64>(g / std::gcd(g, j)));
        EXPECT_EQ(chi.index(), static_cast<u64>(j) * (q - 1) / g);
      }
    }
  }
  EXPECT_THROW(ex::order_g_character(11, 3, 1), charsum::DomainError);
}

TEST(Score, RandomRecordsAgreeWithMaxCharSum) {
  std::mt19937_64 rng(31);
  const auto pat = ex::build_target(5, ex::default_xi(), 13);
  const auto qs = ex::sweep_moduli(5, 11, 3000);
  for (int i = 0; i < 15; ++i) {
    const u64 q = qs[rng() % qs.size()];
    for (const auto& rec : ex::score_modulus(pat, q, 0)) {
      const auto chi = DirichletCharacter::from_index(q, rec.index);
      EXPECT_NEAR(rec.max_abs, charsum::expsums::max_char_sum(chi).max_abs, 1e-8) << q;
    }
  }
}

TEST(Search, FiltersByPrefix) {
  const auto pat = ex::build_target(3, ex::default_xi(), 13);
  const auto all = ex::search_matching_character(pat, 1, 2000, 0, {false});
  const auto strict = ex::search_matching_character(pat, 1, 2000, 5);
  std::size_t expected = 0;
  for (const auto& r : all) expected += r.matched_prefix >= 5;
  EXPECT_EQ(strict.size(), expected);
  EXPECT_EQ(all.size(), 2 * ex::sweep_moduli(3, 1, 2000).size());
  EXPECT_THROW(ex::search_matching_character(pat, 1, 2000, 17), charsum::DomainError);
  EXPECT_THROW(ex::search_matching_character(pat, 8, 12, 0), charsum::DomainError);
}

TEST(Paley, SmallCases) {
  // mod 5: residues 1, 4; running sums 1, 0, -1, 0.
  EXPECT_EQ(ex::paley_record(5).max_abs, 1.0);
  for (u64 q : {3ULL, 7ULL, 11ULL, 101ULL, 1009ULL}) {
    const auto rec = ex::paley_record(q);
    EXPECT_NEAR(rec.max_abs, charsum::expsums::max_char_sum(DirichletCharacter::legendre(q)).max_abs,
                1e-9);
    EXPECT_EQ(rec.matched_prefix, -1);
  }
  EXPECT_THROW(ex::paley_record(9), charsum::DomainError);
}

TEST(Growth, ReportSummaries) {
  const auto one = ex::growth_report({ex::paley_record(101)});
  EXPECT_FALSE(one.slope.has_value());
  EXPECT_EQ(one.min_ratio, one.max_ratio);
  const auto many = ex::growth_report(ex::paley_baseline(100, 2000));
  ASSERT_TRUE(many.slope.has_value());
  for (std::size_t i = 1; i < many.rows.size(); ++i) {
    EXPECT_LE(many.rows[i - 1].record.q, many.rows[i].record.q);
    EXPECT_GE(many.rows[i].running_max, many.rows[i - 1].running_max);
  }
  EXPECT_THROW(ex::growth_report({}), charsum::DomainError);
  std::ostringstream os;
  ex::write_csv(os, many);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "family,q,index,g,max_abs,ratio,running_max,matched_prefix");
}

TEST(Growth, RecordJsonRoundTrip) {
  const auto rec = ex::score_modulus(ex::build_target(3, ex::default_xi(), 13), 97, 0).front();
  const auto back = ex::record_from_json(ex::to_json(rec));
  EXPECT_EQ(back.q, rec.q);
  EXPECT_EQ(back.index, rec.index);
  EXPECT_EQ(back.max_abs, rec.max_abs);
  EXPECT_EQ(back.matched_prefix, rec.matched_prefix);
}

TEST(Sweep, ResumeReproducesFullRun) {
  TempDir full("charsum-full-"), split("charsum-split-");
  ex::SweepConfig cfg;
  cfg.p_star = 5;
  cfg.q_max = 20000;
  cfg.block = 64;
  const auto reference = ex::run_sweep(cfg, full.path);
  EXPECT_FALSE(reference.resumed);

  auto first = cfg;
  first.q_max = 7000;
  ex::run_sweep(first, split.path);
  const auto resumed = ex::run_sweep(cfg, split.path);
  EXPECT_TRUE(resumed.resumed);
  ASSERT_EQ(resumed.records.size(), reference.records.size());
  for (std::size_t i = 0; i < reference.records.size(); ++i) {
    EXPECT_EQ(resumed.records[i].q, reference.records[i].q);
    EXPECT_EQ(resumed.records[i].index, reference.records[i].index);
  }
  std::ifstream a(full.path / "records.jsonl"), b(split.path / "records.jsonl");
  const std::string sa((std::istreambuf_iterator<char>(a)), {}), sb((std::istreambuf_iterator<char>(b)), {});
  EXPECT_EQ(sa, sb);

  auto other = cfg;
  other.P = 11;
  other.p_star = 5;
  EXPECT_THROW(ex::run_sweep(other, split.path), charsum::DomainError);
}
