#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dasdn/metrics.hpp"
#include "support.hpp"

using testing_support::random_values;

namespace {

// Every lag evaluated directly: mean-removed, energy-normalized overlap, with
// the overlap required to cover at least half the shorter signal.
double brute_force_cc(const std::vector<double>& x, const std::vector<double>& y) {
  const long nx = long(x.size()), ny = long(y.size());
  const long min_overlap = std::max<long>(1, std::min(nx, ny) / 2);
  double best = -2.0;
  for (long k = -(ny - 1); k <= nx - 1; ++k) {
    std::vector<double> a, b;
    for (long i = 0; i < ny; ++i) {
      if (i + k >= 0 && i + k < nx) {
        a.push_back(x[i + k]);
        b.push_back(y[i]);
      }
    }
    if (long(a.size()) < min_overlap) continue;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      ma += a[i];
      mb += b[i];
    }
    ma /= double(a.size());
    mb /= double(b.size());
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      sab += (a[i] - ma) * (b[i] - mb);
      saa += (a[i] - ma) * (a[i] - ma);
      sbb += (b[i] - mb) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) continue;
    best = std::max(best, sab / std::sqrt(saa * sbb));
  }
  return best;
}

}  // namespace

TEST(CrossCorrelation, MatchesBruteForceOverAllLags) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const auto x = random_values(60 + seed * 7, seed);
    const auto y = random_values(45 + seed * 3, seed + 100);
    EXPECT_NEAR(dasdn::cross_correlation_max(x, y), brute_force_cc(x, y), 1e-10) << seed;
  }
}

TEST(CrossCorrelation, SelfCorrelationIsOne) {
  const auto x = random_values(500, 1);
  EXPECT_NEAR(dasdn::cross_correlation_max(x, x), 1.0, 1e-12);
}

TEST(CrossCorrelation, ScaleAndOffsetInvariant) {
  const auto x = random_values(300, 2);
  const auto y = random_values(300, 3);
  std::vector<double> xs(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = 4.5 * x[i] + 2.0;
  EXPECT_NEAR(dasdn::cross_correlation_max(xs, y), dasdn::cross_correlation_max(x, y), 1e-12);
}

TEST(CrossCorrelation, FindsDelayedCopy) {
  const auto s = random_values(1000, 4);
  std::vector<double> d(1000, 0.0);
  for (std::size_t i = 37; i < 1000; ++i) d[i] = s[i - 37];
  EXPECT_NEAR(dasdn::cross_correlation_max(d, s), 1.0, 1e-10);
  // a polarity flip is not a match at zero lag
  std::vector<double> neg(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) neg[i] = -s[i];
  EXPECT_LT(dasdn::cross_correlation_max(neg, s), 0.2);
}

TEST(CrossCorrelation, RejectsDegenerateInput) {
  EXPECT_THROW(dasdn::cross_correlation_max(std::vector<double>{}, random_values(5, 1)),
               std::invalid_argument);
  EXPECT_THROW(dasdn::cross_correlation_max(std::vector<double>(10, 0.0), random_values(10, 1)),
               std::domain_error);
}

TEST(LagCorrelator, AgreesWithOneShotFunction) {
  const auto ref = random_values(400, 5);
  const dasdn::LagCorrelator corr(ref, 500);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const auto x = random_values(300 + 50 * seed, 10 + seed);
    EXPECT_NEAR(corr.max_correlation(x), dasdn::cross_correlation_max(x, ref), 1e-12);
  }
  EXPECT_THROW(corr.max_correlation(random_values(600, 1)), std::invalid_argument);
}

TEST(Cci, UnitValuesAndAntisymmetry) {
  EXPECT_NEAR(dasdn::cci(1.0, 0.0), 6.0206, 1e-3);
  EXPECT_NEAR(dasdn::cci(1.0, 0.0), 20.0 * std::log10(2.0), 1e-14);
  EXPECT_EQ(dasdn::cci(0.3, 0.3), 0.0);
  for (auto [a, b] : {std::pair{0.9, 0.2}, {0.1, 0.7}, {-0.5, 0.4}}) {
    EXPECT_EQ(dasdn::cci(a, b), -dasdn::cci(b, a));
  }
  EXPECT_THROW(dasdn::cci(1.5, 0.0), std::invalid_argument);
  EXPECT_THROW(dasdn::cci(0.5, -1.0), std::domain_error);
}

TEST(Psnr, UnitValues) {
  EXPECT_NEAR(dasdn::psnr(std::vector<double>{1.0, 0.0, 0.0, 0.0}), 6.0206, 1e-3);
  // a full-scale sine has peak/rms = sqrt(2)
  std::vector<double> s(2000);
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = std::sin(2.0 * std::numbers::pi * double(i) / 40.0);
  EXPECT_NEAR(dasdn::psnr(s), 20.0 * std::log10(std::sqrt(2.0)), 1e-3);
  EXPECT_NEAR(dasdn::psnr(std::vector<double>(7, 3.0)), 0.0, 1e-14);
}

TEST(Psnr, DegenerateInputs) {
  EXPECT_THROW(dasdn::psnr(std::vector<double>{}), std::invalid_argument);
  EXPECT_THROW(dasdn::psnr(std::vector<double>(4, 0.0)), std::domain_error);
  EXPECT_THROW(dasdn::psnr(std::vector<double>{-1.0, -2.0}), std::domain_error);
}

TEST(Evaluate, IdenticalInputsGiveZeroImprovement) {
  dasdn::MultichannelSignal noisy(3, 400, 1000.0, random_values(1200, 6));
  const auto src = random_values(400, 7);
  const auto ev = dasdn::evaluate(noisy, noisy, src);
  ASSERT_EQ(ev.channels.size(), 3u);
  for (const auto& m : ev.channels) {
    EXPECT_EQ(m.cci_db, 0.0);
    EXPECT_EQ(m.psnr_noisy_db, m.psnr_denoised_db);
  }
  EXPECT_EQ(ev.mean.cci_db, 0.0);
}

TEST(Evaluate, ScaledSourceCopiesCorrelatePerfectly) {
  const auto src = random_values(500, 8);
  dasdn::MultichannelSignal clean(4, 500, 1000.0);
  for (std::size_t c = 0; c < 4; ++c) {
    for (std::size_t n = 0; n < 500; ++n) clean(c, n) = (0.5 + c) * src[n];
  }
  dasdn::MultichannelSignal noisy(4, 500, 1000.0, random_values(2000, 9));
  const auto ev = dasdn::evaluate(clean, noisy, src);
  for (const auto& m : ev.channels) EXPECT_NEAR(m.cc_denoised, 1.0, 1e-12);
  EXPECT_THROW(dasdn::evaluate(clean, dasdn::MultichannelSignal(3, 500, 1000.0), src),
               std::invalid_argument);
}

TEST(Spearman, HandComputedCases) {
  const std::vector<double> a{1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(dasdn::spearman(a, std::vector<double>{10.0, 20.0, 30.0, 40.0}), 1.0, 1e-15);
  EXPECT_NEAR(dasdn::spearman(a, std::vector<double>{4.0, 3.0, 2.0, 1.0}), -1.0, 1e-15);
  // monotone transform leaves it unchanged
  EXPECT_NEAR(dasdn::spearman(a, std::vector<double>{1.0, 8.0, 27.0, 64.0}), 1.0, 1e-15);
  // ties use average ranks: ranks (1, 2.5, 2.5, 4) vs (1, 2, 3, 4)
  const double r = dasdn::spearman(std::vector<double>{1.0, 2.0, 2.0, 3.0}, a);
  EXPECT_NEAR(r, 4.5 / std::sqrt(4.5 * 5.0), 1e-14);
  EXPECT_THROW(dasdn::spearman(std::vector<double>{1.0}, std::vector<double>{1.0}),
               std::invalid_argument);
}

TEST(Evaluate, SilencedChannelScoresZeroCorrelation) {
  const auto src = random_values(300, 40);
  dasdn::MultichannelSignal noisy(2, 300, 1000.0);
  for (std::size_t n = 0; n < 300; ++n) {
    noisy(0, n) = src[n] + 0.5;
    noisy(1, n) = src[n] + 0.5;
  }
  dasdn::MultichannelSignal out = noisy;
  for (std::size_t n = 0; n < 300; ++n) out(1, n) = 0.0;
  const auto ev = dasdn::evaluate(out, noisy, src);
  EXPECT_EQ(ev.channels[1].cc_denoised, 0.0);
  EXPECT_NEAR(ev.channels[1].cci_db, dasdn::cci(0.0, ev.channels[1].cc_noisy), 1e-15);
  EXPECT_TRUE(std::isnan(ev.channels[1].psnr_denoised_db));
  EXPECT_TRUE(std::isnan(ev.mean.psnr_denoised_db));
  EXPECT_FALSE(std::isnan(ev.mean.cci_db));
}
