#include <gtest/gtest.h>

#include <cfloat>
#include <cmath>

#include "dasdn/model.hpp"
#include "loss_check.hpp"
#include "support.hpp"

namespace g = dasdn::grad;
using dasdn::Tensor3;
using testing_support::random_tensor;
using testing_support::random_values;

namespace {

// Direct summation over output channel, input channel, kernel row, kernel column.
Tensor3 direct_conv(const Tensor3& z, const std::vector<double>& w, const std::vector<double>& b) {
  const auto [nc, nf, nt] = z.dims();
  Tensor3 out(z.dims());
  for (std::size_t co = 0; co < nc; ++co) {
    for (std::size_t f = 0; f < nf; ++f) {
      for (std::size_t t = 0; t < nt; ++t) {
        double s = b[co];
        for (std::size_t ci = 0; ci < nc; ++ci) {
          for (int kf = 0; kf < 3; ++kf) {
            for (int kt = 0; kt < 3; ++kt) {
              const long sf = long(f) + kf - 1;
              const long st = long(t) + kt - 1;
              if (sf < 0 || st < 0 || sf >= long(nf) || st >= long(nt)) continue;
              s += w[((co * nc + ci) * 3 + kf) * 3 + kt] * z(ci, sf, st);
            }
          }
        }
        out(co, f, t) = s;
      }
    }
  }
  return out;
}

dasdn::ModelParams random_params(const dasdn::Dims3& d, const dasdn::Ranks& r, std::uint64_t seed) {
  const Tensor3 obs = random_tensor(d, seed, 0.0, 1.0);
  dasdn::ModelParams p = dasdn::init_params(obs, r, seed);
  p.beta = random_values(d[0], seed + 1, -0.3, 0.3);
  p.gamma = random_values(d[0], seed + 2, 0.5, 1.5);
  p.conv_bias = random_values(d[0], seed + 3, -0.1, 0.1);
  return p;
}

}  // namespace

TEST(Projector, MatchesFormula) {
  const Tensor3 t = random_tensor({3, 4, 5}, 1, 0.0, 2.0);
  const std::vector<double> beta{0.1, -0.2, 0.5};
  const std::vector<double> gamma{1.0, -0.5, 2.0};
  const Tensor3 z = dasdn::projector(t, beta, gamma);
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t f = 0; f < 4; ++f) {
      for (std::size_t k = 0; k < 5; ++k) {
        const double want = std::tanh((t(c, f, k) - beta[c]) / (std::abs(gamma[c]) + DBL_EPSILON));
        EXPECT_NEAR(z(c, f, k), want, 1e-15);
      }
    }
  }
}

TEST(Projector, ZeroGammaStaysFinite) {
  const Tensor3 t = random_tensor({2, 2, 2}, 2);
  const Tensor3 z = dasdn::projector(t, std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0});
  for (double v : z.data()) {
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(Projector, LengthMismatchThrows) {
  const Tensor3 t({2, 2, 2});
  EXPECT_THROW(dasdn::projector(t, std::vector<double>{0.0}, std::vector<double>{1.0, 1.0}),
               std::invalid_argument);
}

TEST(Predictor, MatchesDirectConvolution) {
  const Tensor3 z = random_tensor({4, 6, 7}, 3);
  const auto w = random_values(4 * 4 * 9, 4);
  const auto b = random_values(4, 5);
  const Tensor3 got = dasdn::predictor(z, w, b);
  const Tensor3 want = direct_conv(z, w, b);
  EXPECT_LT(testing_support::max_abs_diff(got.data(), want.data()), 1e-13);
}

TEST(Predictor, LargeFrequencyAxisCrossesBlocks) {
  // enough rows that the convolution is evaluated in several row blocks
  const Tensor3 z = random_tensor({2, 70, 130}, 6);
  const auto w = random_values(2 * 2 * 9, 7);
  const auto b = random_values(2, 8);
  const Tensor3 got = dasdn::predictor(z, w, b);
  const Tensor3 want = direct_conv(z, w, b);
  EXPECT_LT(testing_support::max_abs_diff(got.data(), want.data()), 1e-13);
}

TEST(Predictor, IdentityKernelReproducesInput) {
  const Tensor3 z = random_tensor({3, 5, 5}, 9);
  std::vector<double> w(3 * 3 * 9, 0.0);
  for (std::size_t c = 0; c < 3; ++c) w[((c * 3 + c) * 3 + 1) * 3 + 1] = 1.0;
  const Tensor3 out = dasdn::predictor(z, w, std::vector<double>(3, 0.0));
  EXPECT_EQ(out, z);
}

TEST(LossF, MatchesNormFormula) {
  const Tensor3 a = random_tensor({2, 3, 4}, 10);
  const Tensor3 b = random_tensor({2, 3, 4}, 11);
  const Tensor3 c = random_tensor({2, 3, 4}, 12);
  const Tensor3 d = random_tensor({2, 3, 4}, 13);
  const double want = 0.5 * (dasdn::frobenius_norm(a - b) + dasdn::frobenius_norm(c - d));
  EXPECT_NEAR(dasdn::loss_f(a, b, c, d), want, 1e-14);
  EXPECT_EQ(dasdn::loss_f(a, a, c, c), 0.0);
}

TEST(LossF, TargetsReceiveNoGradient) {
  g::Tape tape;
  auto p = tape.parameter({1, 2, 2}, {1.0, 2.0, 3.0, 4.0});
  auto q = tape.parameter({1, 2, 2}, {0.0, 1.0, 0.0, 1.0});
  auto loss = dasdn::graph::loss_f(p, q, q, p);
  tape.backward(loss);
  // both arguments appear once as prediction and once as target; only the
  // prediction role contributes, so each gradient is half a unit vector
  const auto gp = p.grad();
  const double n = std::sqrt(1.0 + 1.0 + 9.0 + 9.0);
  EXPECT_NEAR(gp[0], 0.5 * 1.0 / n, 1e-15);
  EXPECT_NEAR(gp[3], 0.5 * 3.0 / n, 1e-15);
}

TEST(LossChent, UniformAndHandComputedValues) {
  const std::vector<double> zeros(5, 0.0);
  EXPECT_NEAR(dasdn::loss_chent(zeros, zeros), std::log(5.0), 1e-15);
  const std::vector<double> beta{0.0, std::log(3.0)};  // softmax (1/4, 3/4)
  const std::vector<double> gamma{1.0, 1.0};           // uniform
  const double h_beta = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
  EXPECT_NEAR(dasdn::loss_chent(beta, gamma), 0.5 * (h_beta + std::log(2.0)), 1e-15);
}

TEST(InitParams, DefaultsAndDeterminism) {
  const Tensor3 obs = random_tensor({5, 6, 7}, 14, 0.0, 3.0);
  const auto p = dasdn::init_params(obs, {2, 6, 7}, 99);
  EXPECT_EQ(p.beta, std::vector<double>(5, 0.0));
  EXPECT_EQ(p.gamma, std::vector<double>(5, 1.0));
  EXPECT_EQ(p.conv_bias, std::vector<double>(5, 0.0));
  EXPECT_EQ(p.conv_weight.size(), 5u * 5u * 9u);
  const double k = 1.0 / std::sqrt(45.0);
  for (double w : p.conv_weight) EXPECT_LE(std::abs(w), k);
  EXPECT_DOUBLE_EQ(p.norm_scale, obs.max_value());
  EXPECT_EQ(p.epsilon, DBL_EPSILON);

  const auto again = dasdn::init_params(obs, {2, 6, 7}, 99);
  EXPECT_EQ(again.conv_weight, p.conv_weight);
  EXPECT_EQ(again.tucker.core, p.tucker.core);
  EXPECT_NE(dasdn::init_params(obs, {2, 6, 7}, 100).conv_weight, p.conv_weight);
}

TEST(InitParams, FullRankTuckerReproducesNormalizedObservation) {
  const Tensor3 obs = random_tensor({4, 5, 6}, 15, 0.0, 2.0);
  const auto p = dasdn::init_params(obs, {4, 5, 6}, 1);
  const Tensor3 r = dasdn::reconstruct(p.tucker);
  const Tensor3 want = (1.0 / p.norm_scale) * obs;
  EXPECT_LT(testing_support::max_abs_diff(r.data(), want.data()), 1e-12);
}

TEST(InitParams, ZeroObservationUsesUnitScale) {
  const auto p = dasdn::init_params(Tensor3({2, 3, 3}), {1, 3, 3}, 0);
  EXPECT_EQ(p.norm_scale, 1.0);
}

TEST(TotalLoss, GradientMatchesCentralDifferencesSmallCase) {
  const dasdn::Dims3 d{4, 6, 5};
  const Tensor3 obs = random_tensor(d, 16, 0.0, 1.0);
  const auto errs =
      testing_support::group_errors(testing_support::total_loss_gradients(obs, random_params(d, {2, 3, 3}, 17)));
  for (std::size_t k = 0; k < errs.size(); ++k) EXPECT_LT(errs[k], 1e-4) << "group " << k;
}

TEST(Forward, ValuesAgreeWithValueLevelFunctions) {
  const dasdn::Dims3 d{3, 5, 4};
  const Tensor3 obs = random_tensor(d, 18, 0.0, 1.0);
  const auto p = random_params(d, {1, 5, 4}, 19);
  g::Tape tape;
  const auto pv = dasdn::graph::declare(tape, p);
  const auto fp = dasdn::graph::forward(tape.constant(obs), pv);
  const Tensor3 t_prime = dasdn::reconstruct(p.tucker);
  const Tensor3 z_prime = dasdn::projector(t_prime, p.beta, p.gamma);
  const Tensor3 z = dasdn::projector(obs, p.beta, p.gamma);
  const Tensor3 tp_pred = dasdn::predictor(z_prime, p.conv_weight, p.conv_bias);
  const Tensor3 t_pred = dasdn::predictor(z, p.conv_weight, p.conv_bias);
  const double want = dasdn::loss_f(t_pred, z_prime, tp_pred, z) + dasdn::loss_chent(p.beta, p.gamma);
  EXPECT_NEAR(fp.loss.item(), want, 1e-12);
  EXPECT_LT(testing_support::max_abs_diff(fp.t_pred.value(), t_pred.data()), 1e-14);
}
