#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dasdn/wav.hpp"
#include "support.hpp"

using testing_support::TempDir;

namespace {

int run(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd =
      std::string(DASDN_CLI_PATH) + " " + args + " >" + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::ofstream(dir_ / "scene.json") << R"({
      "channels": 4, "duration_s": 0.5, "sample_rate": 8000, "seed": 3,
      "sources": [{"type": "filtered-noise", "amplitude": 0.5, "low_hz": 200, "high_hz": 1500}],
      "gains": {"ramp": [0.2, 1.0]}, "sigmas": {"ramp": [0.5, 0.1]}
    })";
    ASSERT_EQ(run("synth --config " + q("scene.json") + " --out " + q("noisy.wav") + " --truth " +
                      q("truth.json") + " --source-out " + q("source.wav") + " --noise-out " +
                      q("noise.wav") + " --noise-seconds 1",
                  dir_ / "synth.log"),
              0)
        << slurp(dir_ / "synth.log");
  }

  std::string q(const std::string& name) const { return "'" + (dir_ / name).string() + "'"; }
  std::filesystem::path path(const std::string& name) const { return dir_ / name; }

  TempDir dir_{"cli"};
};

}  // namespace

TEST_F(Cli, SynthWritesAllOutputs) {
  const auto noisy = dasdn::read_wav(path("noisy.wav"));
  EXPECT_EQ(noisy.channels(), 4u);
  EXPECT_EQ(noisy.samples(), 4000u);
  EXPECT_EQ(dasdn::read_wav(path("source.wav")).channels(), 1u);
  EXPECT_EQ(dasdn::read_wav(path("noise.wav")).samples(), 8000u);
  EXPECT_NE(slurp(path("truth.json")).find("sigmas"), std::string::npos);
}

TEST_F(Cli, SynthIsDeterministic) {
  ASSERT_EQ(run("synth --config " + q("scene.json") + " --out " + q("again.wav"), path("log")), 0);
  EXPECT_EQ(slurp(path("again.wav")), slurp(path("noisy.wav")));
}

TEST_F(Cli, EvalOfNoisyAgainstItselfHasZeroImprovement) {
  ASSERT_EQ(run("eval --denoised " + q("noisy.wav") + " --noisy " + q("noisy.wav") + " --source " +
                    q("source.wav") + " --out " + q("m.csv"),
                path("log")),
            0)
      << slurp(path("log"));
  const auto rows = lines(slurp(path("m.csv")));
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], "channel,cc_noisy,cc_denoised,cci_db,psnr_noisy_db,psnr_denoised_db");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    std::vector<std::string> cols;
    std::istringstream in(rows[i]);
    for (std::string c; std::getline(in, c, ',');) cols.push_back(c);
    ASSERT_EQ(cols.size(), 6u);
    EXPECT_EQ(std::stod(cols[3]), 0.0);
    EXPECT_EQ(cols[1], cols[2]);
  }
  EXPECT_EQ(rows.back().substr(0, 5), "mean,");
}

TEST_F(Cli, TuckerAtFullRankReproducesInput) {
  ASSERT_EQ(run("denoise --in " + q("noisy.wav") + " --method tucker --rank-c 4 --window 128 " +
                    "--hop 64 --out " + q("t.wav"),
                path("log")),
            0)
      << slurp(path("log"));
  const auto in = dasdn::read_wav(path("noisy.wav"));
  const auto out = dasdn::read_wav(path("t.wav"));
  ASSERT_EQ(out.channels(), in.channels());
  ASSERT_EQ(out.samples(), in.samples());
  double worst = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t n = 128; n + 128 < in.samples(); ++n) {
      worst = std::max(worst, std::abs(out(c, n) - in(c, n)));
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST_F(Cli, ProposedRunIsDeterministicAndReports) {
  const std::string common = "denoise --in " + q("noisy.wav") +
                             " --method proposed --rank-c 2 --window 128 --hop 64 --iters 3 "
                             "--seed 7 --quiet";
  ASSERT_EQ(run(common + " --out " + q("a.wav") + " --report " + q("a.json"), path("log")), 0)
      << slurp(path("log"));
  ASSERT_EQ(run(common + " --out " + q("b.wav") + " --report " + q("b.json"), path("log")), 0);
  EXPECT_EQ(slurp(path("a.wav")), slurp(path("b.wav")));
  const std::string report = slurp(path("a.json"));
  EXPECT_NE(report.find("\"loss_trace\""), std::string::npos);
  EXPECT_NE(report.find("\"beta\""), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(path("a.das3")));
}

TEST_F(Cli, SweepWritesOneRowPerCell) {
  ASSERT_EQ(run("sweep --in " + q("noisy.wav") + " --source " + q("source.wav") +
                    " --methods svd,tucker --ranks 1,2 --window 128 --hop 64 --out " + q("s.csv"),
                path("log")),
            0)
      << slurp(path("log"));
  const auto rows = lines(slurp(path("s.csv")));
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "method,rank,mean_cci_db,mean_psnr_db");
  EXPECT_EQ(rows[1].substr(0, 6), "svd,1,");
  EXPECT_EQ(rows[4].substr(0, 9), "tucker,2,");
}

TEST_F(Cli, SpectrogramWritesPgm) {
  ASSERT_EQ(run("spectrogram --in " + q("noisy.wav") + " --channel 3 --window 128 --hop 64 --out " +
                    q("s.pgm"),
                path("log")),
            0)
      << slurp(path("log"));
  EXPECT_EQ(slurp(path("s.pgm")).substr(0, 3), "P5\n");
}

TEST_F(Cli, UsageAndInputErrorsExitWithTwo) {
  EXPECT_EQ(run("", path("log")), 2);
  EXPECT_EQ(run("frobnicate", path("log")), 2);
  EXPECT_EQ(run("denoise --in " + q("noisy.wav") + " --method nope --rank-c 1 --out " + q("x.wav"),
                path("log")),
            2);
  EXPECT_EQ(run("denoise --in " + q("missing.wav") + " --method svd --rank-c 1 --out " +
                    q("x.wav"),
                path("log")),
            2);
  EXPECT_EQ(run("denoise --in " + q("noisy.wav") + " --method svd --rank-c 9 --out " + q("x.wav"),
                path("log")),
            2);
  EXPECT_EQ(run("synth --config " + q("nope.json") + " --out " + q("x.wav"), path("log")), 2);
  std::ofstream(path("junk.wav")) << "garbage";
  EXPECT_EQ(run("eval --denoised " + q("junk.wav") + " --noisy " + q("noisy.wav") + " --source " +
                    q("source.wav") + " --out -",
                path("log")),
            2);
}

TEST_F(Cli, HelpExitsWithZero) {
  EXPECT_EQ(run("--help", path("log")), 0);
  EXPECT_NE(slurp(path("log")).find("denoise"), std::string::npos);
}
