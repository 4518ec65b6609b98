#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include "json.hpp"
#include <string>
#include <sys/wait.h>

namespace {

struct CliRun {
  int code;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(OCCTIME_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string tmp_path(const std::string& name) { return ::testing::TempDir() + name; }

}  // namespace

TEST(Cli, BrownianMomentsExact) {
  const CliRun r = cli("moments --diffusion bm --n-max 3 --exact");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("1,1/2,"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("2,3/8,"), std::string::npos);
  EXPECT_NE(r.out.find("3,5/16,"), std::string::npos);
}

TEST(Cli, BesselMomentsJson) {
  const CliRun r = cli("moments --diffusion bessel --nu -1/2 --beta 1/2 --n-max 2 --exact --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["values"][0]["value"], "1/2");
  EXPECT_EQ(j["values"][1]["value"], "3/8");
}

TEST(Cli, StickyLaplaceMoment) {
  const CliRun r = cli("moments --diffusion sticky --gamma 1 --lambda 2 --n-max 1 --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["values"][0]["value_double"].get<double>(), 0.25, 1e-14);
}

TEST(Cli, MgfClosedForm) {
  const CliRun r = cli("mgf --diffusion bessel --nu -0.3 --beta 0.6 --lambda 1 --r 2 --method closed --format json");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["value"].get<double>(), 0.54939185564179172381, 1e-14);
}

TEST(Cli, DensityCsv) {
  const CliRun r = cli("density --diffusion bm --x 0.25,0.5");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "x,pdf,cdf");
  EXPECT_NE(r.out.find("0.5,"), std::string::npos);
}

TEST(Cli, SimulateReportAndSamples) {
  const std::string samples = tmp_path("occtime_samples.csv");
  const CliRun r = cli("simulate --diffusion bm --paths 2000 --step 1e-3 --seed 3 --samples " + samples);
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["meta"]["command"], "simulate");
  EXPECT_TRUE(j.contains("moments_a"));
  EXPECT_TRUE(j.contains("ks"));
  std::ifstream in(samples);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "path_id,a_t,b_t,zero_time,terminal");
  // Same seed, same report.
  EXPECT_EQ(cli("simulate --diffusion bm --paths 2000 --step 1e-3 --seed 3 --workers 2").out.find("\"moments_a\""),
            r.out.find("\"moments_a\""));
}

TEST(Cli, InvertSticky) {
  const CliRun r = cli("invert --diffusion sticky --gamma 1 --n 1 --t 1,10");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "t,value,error_estimate");
  EXPECT_NE(r.out.find("0.267006"), std::string::npos) << r.out;
}

TEST(Cli, CsvFileGetsMetadataSidecar) {
  const std::string out = tmp_path("occtime_moments.csv");
  std::remove((out + ".meta.json").c_str());
  ASSERT_EQ(cli("moments --diffusion skew-bm --beta 0.7 --n-max 2 -o " + out).code, 0);
  std::ifstream meta(out + ".meta.json");
  ASSERT_TRUE(meta.good());
  const auto j = nlohmann::json::parse(meta);
  EXPECT_EQ(j["tool"], "occtime");
  EXPECT_EQ(j["diffusion"], "skew-bm");
}

TEST(Cli, ConfigFile) {
  const std::string cfg = tmp_path("occtime.cfg");
  std::ofstream(cfg) << "# skew moments\ncommand=moments\ndiffusion=skew-bm\nbeta=0.7\nn-max=1\n";
  const CliRun r = cli("--config " + cfg);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("1,0.7,"), std::string::npos) << r.out;
  // The command line wins over the file.
  EXPECT_NE(cli("--config " + cfg + " moments --beta 0.2").out.find("1,0.2,"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli("moments --diffusion bessel --nu 0.3 --beta 0.5").code, 2);
  EXPECT_EQ(cli("moments --no-such-flag").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
  EXPECT_EQ(cli("mgf --diffusion bm --lambda -1 --r 1").code, 2);
  // Order 4 cannot meet 1e-15: a numerical failure, not a usage error.
  EXPECT_EQ(cli("invert --diffusion sticky --gamma 1 --n 1 --t 1 --order 4 --rel-tol 1e-15").code, 1);
  EXPECT_EQ(cli("--version").code, 0);
}

TEST(Cli, VerifySubset) {
  const CliRun r = cli("verify --only 1,8");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = nlohmann::json::parse(r.out);
  ASSERT_EQ(j["criteria"].size(), 2u);
  EXPECT_EQ(j["criteria"][0]["status"], "pass");
  EXPECT_TRUE(j["pass"].get<bool>());
}
