#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include <unistd.h>

#include "cli_app.hpp"

using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = charsum::cli::run_cli(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

json run_json(std::vector<std::string> args) {
  const auto r = run(std::move(args));
  EXPECT_EQ(r.code, 0) << r.err;
  return json::parse(r.out);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / (name + std::to_string(::getpid()));
}

}  // namespace

TEST(Cli, HarmonicSum) {
  const auto j = run_json({"sum", "--one", "--x", "100", "--alpha", "0"});
  long double h = 0;
  for (int n = 1; n <= 100; ++n) h += 1.0L / n;
  EXPECT_EQ(j.at("command"), "sum");
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_NEAR(j.at("final").at(0).get<double>(), static_cast<double>(h), 1e-12);
}

TEST(Cli, ArcsExceptional) {
  const auto j = run_json({"arcs", "--alpha", "0.25", "--y", "1e6", "--m", "4"});
  EXPECT_EQ(j.at("arc_tag"), "MajorExceptional");
  EXPECT_EQ(j.at("r"), 4);
  EXPECT_EQ(j.at("b"), 1);
}

TEST(Cli, CharacterDescription) {
  const auto j = run_json({"character", "chi-4"});
  EXPECT_EQ(j.at("modulus"), 4);
  EXPECT_EQ(j.at("parity"), -1);
  EXPECT_NEAR(j.at("gauss_sum").at(1).get<double>(), 2.0, 1e-12);
}

TEST(Cli, VerifySuitesPass) {
  for (const char* s : {"summin", "vanishing", "gauss"}) {
    const auto r = run({"verify", s});
    EXPECT_EQ(r.code, 0) << s << " " << r.err;
    EXPECT_TRUE(json::parse(r.out).at("ok").get<bool>());
  }
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({"character", "q=7,idx=1"}).code, 2);
  EXPECT_EQ(run({"character", "q=5,index=4"}).code, 2);
  EXPECT_EQ(run({"verify", "no-such-suite"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"sum", "--one", "--char", "chi-4"}).code, 2);
  EXPECT_EQ(run({"sum", "--one", "--x", "1e6", "--sum-cap", "1000"}).code, 3);
  EXPECT_EQ(run({"character", "principal:2000000"}).code, 0);
  EXPECT_EQ(run({"verify", "gauss", "--tol-gauss", "1e-300"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, CsvIsDeterministicAcrossThreadCounts) {
  const std::vector<std::string> base = {"--seed", "7", "--format", "csv", "sum", "--random",
                                         "--x", "5000", "--alpha", "0.3"};
  auto with_threads = [&](const std::string& t) {
    auto args = base;
    args.insert(args.begin(), {"--threads", t});
    return run(args);
  };
  const auto a = with_threads("1"), b = with_threads("4"), c = with_threads("1");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  EXPECT_EQ(a.out.substr(0, a.out.find('\n')), "t_or_n,re,im,abs");

  const std::vector<std::string> scan = {"--format", "csv", "scan", "--char", "q=7,index=2",
                                         "--y", "1e4", "--beta-steps", "11"};
  auto s1 = scan, s4 = scan;
  s1.insert(s1.begin(), {"--threads", "1"});
  s4.insert(s4.begin(), {"--threads", "4"});
  EXPECT_EQ(run(s1).out, run(s4).out);
}

TEST(Cli, ExtremalResumeAndGrowthCsv) {
  const auto dir = temp_path("charsum-cli-sweep-");
  std::filesystem::remove_all(dir);
  const auto first = run_json({"extremal", "--qmax", "5000", "--pstar", "5", "--resume", dir.string()});
  EXPECT_FALSE(first.at("resumed").get<bool>());
  const auto second =
      run_json({"extremal", "--qmax", "20000", "--pstar", "5", "--resume", dir.string()});
  EXPECT_TRUE(second.at("resumed").get<bool>());
  EXPECT_GE(second.at("records").get<int>(), first.at("records").get<int>());
  EXPECT_TRUE(std::filesystem::exists(dir / "growth.csv"));
  EXPECT_EQ(run({"extremal", "--qmax", "20000", "--pstar", "7", "--resume", dir.string()}).code, 2);
  std::filesystem::remove_all(dir);
}

TEST(Cli, OutFileAndMimic) {
  const auto path = temp_path("charsum-cli-out-");
  const auto r = run({"--out", path.string(), "mimic", "--one", "--twist", "3", "--X", "1e4"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream is(path);
  const auto j = json::parse(is);
  EXPECT_NEAR(j.at("distance_sq").get<double>(), 0.0, 1e-8);
  EXPECT_NEAR(j.at("minimizing_t").get<double>(), 3.0, 1e-6);
  std::filesystem::remove(path);
}
