#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "fgo/config.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(FGO_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = pclose(p);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string golden(const std::string& name) {
  std::ifstream f(std::string(FGO_GOLDEN_DIR) + "/" + name);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ParsesIni) {
  auto c = fgo::RunConfig::from_ini("[run]\nsurface = disk4\nfn = t1-cos\nseed = 11\ntol = 1e-11\n");
  EXPECT_EQ(c.surface, "disk4");
  EXPECT_EQ(c.fn, "t1-cos");
  EXPECT_EQ(c.seed, 11u);
  EXPECT_DOUBLE_EQ(c.tol, 1e-11);
  EXPECT_NO_THROW(c.validate());
  auto d = fgo::RunConfig::from_ini(c.to_ini());
  EXPECT_EQ(d.to_ini(), c.to_ini());
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(fgo::RunConfig::from_ini("tol = -1\n").validate(), fgo::ConfigError);
  EXPECT_THROW(fgo::RunConfig::from_ini("seed = banana\n"), fgo::ConfigError);
  EXPECT_THROW(fgo::RunConfig::from_ini("colour = red\n"), fgo::ConfigError);
  EXPECT_THROW(fgo::parse_surface("disk1"), fgo::ConfigError);
  EXPECT_THROW(fgo::parse_surface("0:ix"), fgo::ConfigError);
}

TEST(Config, Surfaces) {
  EXPECT_EQ(fgo::parse_surface("disk4"), fgo::SurfaceType::disk(3, 1));
  EXPECT_EQ(fgo::parse_surface("annulus"), fgo::SurfaceType::from_counts(0, {2, 0}));
  EXPECT_EQ(fgo::parse_surface("0:io,"), fgo::SurfaceType::from_counts(0, {2, 0}));
}

TEST(Cli, EnumerateAnnulus) {
  auto r = run("enumerate --genus 0 --boundary 2 --marks 2,0");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("{\"classes\":5}"), std::string::npos);
  EXPECT_EQ(r.out, golden("enumerate_annulus.txt"));
}

TEST(Cli, ComplexDiskFour) {
  auto r = run("complex --surface disk4");
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, golden("complex_disk4.txt"));
}

TEST(Cli, MorseTorus) {
  auto r = run("morse --fn t2-coscos");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"ranks\":[1,2,1]"), std::string::npos);
  EXPECT_EQ(r.out, golden("morse_t2_coscos.txt"));
}

TEST(Cli, OperationOnTheCircle) {
  auto a = run("op --surface disk3 --fn t1-double --seed 7");
  auto b = run("op --surface disk3 --fn t1-double --seed 7");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);  // byte-identical reruns
  EXPECT_NE(a.out.find("# seed = 7"), std::string::npos);
  EXPECT_EQ(a.out, golden("op_disk3_t1_double.txt"));
}

TEST(Cli, CochainCheckOnTheCircle) {
  auto r = run("cochain-check --surface disk3 --fn t1-double");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"failures\":0"), std::string::npos);
}

TEST(Cli, HeaderEmbedsTheConfig) {
  auto r = run("enumerate --surface disk3");
  EXPECT_EQ(r.out.rfind("# command = enumerate\n# surface = disk3\n", 0), 0u);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("morse --fn t1-cos --tol -1").status, 2);
  EXPECT_EQ(run("enumerate --surface nowhere").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("glue-check --surface disk3 --pairing ''").status, 2);
  EXPECT_EQ(run("count --surface disk3 --fn t1-cos --in 0 --outputs 0").status, 2);
}

TEST(Cli, WritesToFile) {
  std::string path = ::testing::TempDir() + "/fgo_cli_out.txt";
  auto r = run("enumerate --surface disk4 --out " + path);
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_NE(ss.str().find("{\"classes\":3}"), std::string::npos);
}

TEST(Cli, ReadsAConfigFile) {
  std::string path = ::testing::TempDir() + "/fgo_run.ini";
  {
    std::ofstream f(path);
    f << "[run]\nsurface = disk4\nseed = 11\n";
  }
  auto r = run("enumerate --config " + path);
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("# seed = 11\n"), std::string::npos);
  EXPECT_NE(r.out.find("{\"classes\":3}"), std::string::npos);
  // flags win over the file
  EXPECT_NE(run("enumerate --config " + path + " --seed 5").out.find("# seed = 5\n"), std::string::npos);
}

TEST(Cli, CountsOneTuple) {
  auto r = run("count --surface disk3 --fn t2-coscos --in 1,2 --outputs 3");
  EXPECT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("\"solutions\":1,\"coefficient\":\"1\""), std::string::npos);
}
