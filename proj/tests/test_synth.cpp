#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <cmath>
#include <numbers>

#include "dasdn/metrics.hpp"
#include "dasdn/stft.hpp"
#include "dasdn/synth.hpp"
#include "dasdn/wav.hpp"
#include "support.hpp"

using dasdn::SceneConfig;
using dasdn::SourceSpec;
using dasdn::WaveformKind;

namespace {

SceneConfig small_config(std::size_t channels, double sigma) {
  SceneConfig cfg;
  cfg.channels = channels;
  cfg.duration_s = 0.1;
  cfg.sample_rate = 8000.0;
  SourceSpec s;
  s.kind = WaveformKind::kFilteredNoise;
  s.low_hz = 200.0;
  s.high_hz = 1500.0;
  cfg.sources = {s};
  cfg.gains.assign(channels, 1.0);
  cfg.sigmas.assign(channels, sigma);
  cfg.seed = 5;
  return cfg;
}

Eigen::VectorXd singular_values(const dasdn::MultichannelSignal& sig) {
  Eigen::MatrixXd m(sig.channels(), sig.samples());
  for (std::size_t c = 0; c < sig.channels(); ++c) {
    for (std::size_t n = 0; n < sig.samples(); ++n) m(c, n) = sig(c, n);
  }
  return Eigen::BDCSVD<Eigen::MatrixXd>(m).singularValues();
}

}  // namespace

TEST(Synth, UnitGainsNoNoiseCopyTheSource) {
  const auto truth = dasdn::generate(small_config(4, 0.0));
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t n = 0; n < truth.clean.samples(); ++n) {
      EXPECT_EQ(truth.clean(c, n), truth.sources[0][n]);
    }
  }
  EXPECT_EQ(truth.noisy, truth.clean);
}

TEST(Synth, NoisyIsCleanPlusNoiseExactly) {
  const auto truth = dasdn::generate(small_config(3, 0.7));
  for (std::size_t i = 0; i < truth.noisy.data().size(); ++i) {
    EXPECT_EQ(truth.noisy.data()[i], truth.clean.data()[i] + truth.noise.data()[i]);
  }
}

TEST(Synth, FilteredNoiseHasRequestedRms) {
  SceneConfig cfg = small_config(1, 0.0);
  cfg.sources[0].amplitude = 0.3;
  const auto truth = dasdn::generate(cfg);
  const auto& s = truth.sources[0];
  double ss = 0.0;
  for (double v : s) ss += v * v;
  EXPECT_NEAR(std::sqrt(ss / double(s.size())), 0.3, 1e-12);
}

TEST(Synth, FilteredNoiseEnergyStaysInBand) {
  SceneConfig cfg = small_config(1, 0.0);
  cfg.duration_s = 2.0;
  const auto truth = dasdn::generate(cfg);
  const auto mag = dasdn::magnitude(dasdn::stft(truth.clean, 256, 128));
  double in = 0.0, out = 0.0;
  for (std::size_t f = 0; f < mag.dims()[1]; ++f) {
    const double hz = double(f) * cfg.sample_rate / 256.0;
    for (std::size_t t = 0; t < mag.dims()[2]; ++t) {
      const double e = mag(0, f, t) * mag(0, f, t);
      if (hz >= 150.0 && hz <= 1550.0) {
        in += e;
      } else {
        out += e;
      }
    }
  }
  EXPECT_LT(out / in, 1e-2);
}

TEST(Synth, SineAndChirpSources) {
  SceneConfig cfg = small_config(2, 0.0);
  cfg.sources[0].kind = WaveformKind::kSine;
  cfg.sources[0].frequency_hz = 500.0;
  cfg.sources[0].amplitude = 2.0;
  SourceSpec chirp;
  chirp.kind = WaveformKind::kChirp;
  chirp.amplitude = 0.5;
  cfg.sources.push_back(chirp);
  const auto truth = dasdn::generate(cfg);
  EXPECT_NEAR(truth.sources[0][4], 2.0 * std::sin(2.0 * std::numbers::pi * 500.0 * 4.0 / 8000.0), 1e-15);
  EXPECT_EQ(truth.sources[1][0], 0.0);
  for (double v : truth.sources[1]) EXPECT_LE(std::abs(v), 0.5);
}

TEST(Synth, WavFileSource) {
  testing_support::TempDir dir("synth");
  const auto samples = testing_support::random_values(800, 3);
  dasdn::write_wav(dir / "src.wav", dasdn::MultichannelSignal(1, 800, 8000.0, samples));
  SceneConfig cfg = small_config(2, 0.0);
  cfg.sources[0].kind = WaveformKind::kWavFile;
  cfg.sources[0].path = (dir / "src.wav").string();
  cfg.sources[0].amplitude = 2.0;
  const auto truth = dasdn::generate(cfg);
  EXPECT_EQ(truth.sources[0][10], 2.0 * double(static_cast<float>(samples[10])));

  dasdn::write_wav(dir / "wrong.wav", dasdn::MultichannelSignal(1, 800, 16000.0, samples));
  cfg.sources[0].path = (dir / "wrong.wav").string();
  EXPECT_THROW(dasdn::generate(cfg), std::invalid_argument);
}

TEST(Synth, DelaysShiftChannels) {
  SceneConfig cfg = small_config(3, 0.0);
  cfg.delays = {0, 5, 11};
  const auto truth = dasdn::generate(cfg);
  for (std::size_t n = 0; n < 5; ++n) EXPECT_EQ(truth.clean(1, n), 0.0);
  for (std::size_t n = 11; n < truth.clean.samples(); ++n) {
    EXPECT_EQ(truth.clean(2, n), truth.clean(0, n - 11));
  }
  EXPECT_NEAR(dasdn::cross_correlation_max(truth.clean.channel(2), truth.sources[0]), 1.0, 1e-9);
}

TEST(Synth, InvalidConfigsThrow) {
  SceneConfig cfg = small_config(3, 0.1);
  cfg.gains.pop_back();
  EXPECT_THROW(dasdn::generate(cfg), std::invalid_argument);
  cfg = small_config(3, 0.1);
  cfg.sources.clear();
  EXPECT_THROW(dasdn::generate(cfg), std::invalid_argument);
  cfg = small_config(3, 0.1);
  cfg.sigmas[1] = -0.1;
  EXPECT_THROW(dasdn::generate(cfg), std::invalid_argument);
  cfg = small_config(3, 0.1);
  cfg.sources[0].high_hz = 5000.0;  // above Nyquist
  EXPECT_THROW(dasdn::generate(cfg), std::invalid_argument);
  cfg = small_config(3, 0.1);
  cfg.delays = {1, 2};
  EXPECT_THROW(dasdn::generate(cfg), std::invalid_argument);
}

TEST(StandardScene, LayoutAndProfiles) {
  const auto cfg = dasdn::standard_scene_config(0);
  EXPECT_EQ(cfg.channels, 50u);
  EXPECT_EQ(cfg.sample_rate, 20000.0);
  EXPECT_EQ(cfg.samples(), 80000u);
  ASSERT_EQ(cfg.sources.size(), 1u);
  EXPECT_EQ(cfg.sources[0].kind, WaveformKind::kFilteredNoise);
  EXPECT_DOUBLE_EQ(cfg.gains.front(), 0.1);
  EXPECT_DOUBLE_EQ(cfg.gains.back(), 1.0);
  EXPECT_DOUBLE_EQ(cfg.sigmas.front(), 1.0);
  EXPECT_DOUBLE_EQ(cfg.sigmas.back(), 0.1);
}

TEST(StandardScene, CleanMatrixHasRankOne) {
  const auto truth = dasdn::standard_scene(3);
  const Eigen::VectorXd s = singular_values(truth.clean);
  EXPECT_GT(s(0), 0.0);
  for (Eigen::Index i = 1; i < s.size(); ++i) EXPECT_LT(s(i), 1e-8 * s(0));
}

TEST(StandardScene, DeterministicPerSeed) {
  const auto a = dasdn::standard_scene(11);
  const auto b = dasdn::standard_scene(11);
  EXPECT_EQ(a.noisy, b.noisy);
  EXPECT_EQ(a.sources, b.sources);
  EXPECT_NE(dasdn::standard_scene(12).noisy, a.noisy);
}

TEST(StandardScene, ChannelsReceiveIndependentNoise) {
  const auto truth = dasdn::standard_scene(4);
  const auto n0 = truth.noise.channel(0);
  const auto n1 = truth.noise.channel(1);
  double s01 = 0.0, s00 = 0.0, s11 = 0.0;
  for (std::size_t i = 0; i < n0.size(); ++i) {
    s01 += n0[i] * n1[i];
    s00 += n0[i] * n0[i];
    s11 += n1[i] * n1[i];
  }
  EXPECT_LT(std::abs(s01 / std::sqrt(s00 * s11)), 0.02);
  // different stream from the noise-only recording
  const auto rec = dasdn::noise_recording(dasdn::standard_scene_config(4), 1.0);
  EXPECT_NE(rec.channel(0)[0], n0[0]);
}

TEST(StandardScene, NoisyCorrelationRisesWithChannelIndex) {
  std::vector<double> idx(50);
  for (std::size_t c = 0; c < 50; ++c) idx[c] = double(c);
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto truth = dasdn::standard_scene(seed);
    const dasdn::LagCorrelator corr(truth.sources[0], truth.noisy.samples());
    std::vector<double> cc(50);
    for (std::size_t c = 0; c < 50; ++c) cc[c] = corr.max_correlation(truth.noisy.channel(c));
    const double rho = dasdn::spearman(idx, cc);
    EXPECT_GT(rho, 0.8) << "seed " << seed;
    total += rho;
  }
  EXPECT_GT(total / 20.0, 0.8);
}

TEST(SceneJson, ParsesRampsAndRoundTrips) {
  const std::string doc = R"({
    "channels": 4, "duration_s": 0.5, "sample_rate": 8000, "seed": 9,
    "sources": [{"type": "sine", "amplitude": 0.5, "frequency_hz": 300}],
    "gains": {"ramp": [0.1, 1.0]}, "sigmas": 0.2, "delays": [0, 1, 2, 3]
  })";
  const SceneConfig cfg = dasdn::parse_scene_config(doc);
  EXPECT_EQ(cfg.channels, 4u);
  EXPECT_EQ(cfg.seed, 9u);
  EXPECT_EQ(cfg.sources[0].kind, WaveformKind::kSine);
  EXPECT_DOUBLE_EQ(cfg.gains[3], 1.0);
  EXPECT_DOUBLE_EQ(cfg.gains[1], 0.4);
  EXPECT_EQ(cfg.sigmas, std::vector<double>(4, 0.2));
  EXPECT_EQ(cfg.delays, (std::vector<std::size_t>{0, 1, 2, 3}));

  const SceneConfig again = dasdn::parse_scene_config(dasdn::scene_config_to_json(cfg));
  EXPECT_EQ(dasdn::generate(again).noisy, dasdn::generate(cfg).noisy);
}

TEST(SceneJson, MalformedDocumentsThrow) {
  EXPECT_THROW(dasdn::parse_scene_config("{not json"), std::invalid_argument);
  EXPECT_THROW(dasdn::parse_scene_config(R"({"channels": 2, "gains": [1, 1], "sigmas": [0, 0]})"),
               std::invalid_argument);
  EXPECT_THROW(dasdn::parse_scene_config(
                   R"({"channels": 2, "sources": [{"type": "square"}], "gains": 1, "sigmas": 0})"),
               std::invalid_argument);
  EXPECT_THROW(dasdn::parse_scene_config(
                   R"({"channels": 2, "sources": [{"type": "sine"}], "gains": [1], "sigmas": 0})"),
               std::invalid_argument);
}
