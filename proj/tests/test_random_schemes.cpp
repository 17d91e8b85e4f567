#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "schedseq/random_schemes.hpp"

using namespace schedseq;

namespace {

double single_channel_optimum(int K) { return std::pow(K - 1.0, K - 1) / std::pow(static_cast<double>(K), K); }

// Y = time to collect K-1 equiprobable coupons when each slot yields a given
// coupon with probability P (or nothing).
std::int64_t sample_collection(std::mt19937_64& rng, int K, double P) {
  std::int64_t y = 0;
  for (int have = 0; have < K - 1; ++have) {
    std::geometric_distribution<std::int64_t> wait((K - 1 - have) * P);
    y += wait(rng) + 1;
  }
  return y;
}

}  // namespace

TEST(General, Examples) {
  EXPECT_DOUBLE_EQ(p_success_general(1, 2, 0.5), 0.25);
  for (int K = 2; K <= 30; ++K) EXPECT_NEAR(p_success_general(1, K, 1.0 / K), single_channel_optimum(K), 1e-15);
  EXPECT_THROW(p_success_general(2, 10, 0.5), std::invalid_argument);
  EXPECT_THROW(p_success_general(1, 10, 0.0), std::invalid_argument);
}

TEST(AssignT, Examples) {
  EXPECT_NEAR(p_success_assignT(2, 10, 0.1).P_beta, 0.1 * std::pow(0.9, 5) / 1.9, 1e-15);
  EXPECT_NEAR(p_success_assignT(2, 10, 0.1).P_beta, 0.0310784, 5e-8);
  for (int K = 2; K <= 20; ++K)
    for (double p : {0.05, 0.2, 0.5, 0.9})
      EXPECT_NEAR(p_success_assignT(1, K, p).P_beta, p * std::pow(1 - p, K - 1), 1e-15);
}

TEST(AssignT, ProbabilitiesSumToOne) {
  for (int W = 1; W <= 6; ++W)
    for (double p : {0.01, 0.3, 0.7}) {
      const auto r = p_success_assignT(W, 12, p);
      EXPECT_NEAR(p + r.q1 + (W - 1) * r.q2, 1.0, 1e-12);
      EXPECT_NEAR(r.q1, (1 - p) * r.q2, 1e-15);
    }
}

TEST(Schemes, DecreasingInW) {
  for (int K : {4, 10, 18, 30})
    for (int i = 1; i < 20; ++i) {
      const double p = 0.2 * i / 20.0;  // below 1/5 so every W in 1..5 is admissible
      for (int W = 1; W < 5; ++W) {
        EXPECT_GT(p_success_general(W, K, p), p_success_general(W + 1, K, p)) << K << " " << p << " " << W;
      }
    }
  for (int K : {4, 10, 18, 30})
    for (int W = 1; W < 6; ++W)
      EXPECT_GT(optimize_random(W, K, RandomScheme::AssignT).P_star, optimize_random(W + 1, K, RandomScheme::AssignT).P_star)
          << K << " " << W;
}

// At a fixed p the larger exponent K/W can outweigh the 1/(W - p) factor.
TEST(AssignT, NotMonotoneInWAtFixedP) {
  const double w1 = 0.19 * std::pow(0.81, 9);
  const double w2 = 0.19 * std::pow(0.81, 5) / 1.81;
  EXPECT_NEAR(p_success_assignT(1, 10, 0.19).P_beta, w1, 1e-15);
  EXPECT_NEAR(p_success_assignT(2, 10, 0.19).P_beta, w2, 1e-15);
  EXPECT_LT(w1, w2);
}

TEST(Optimize, SingleChannelMatchesAnalytic) {
  for (int K = 2; K <= 40; ++K)
    for (auto scheme : {RandomScheme::General, RandomScheme::AssignT}) {
      const auto opt = optimize_random(1, K, scheme);
      EXPECT_NEAR(opt.p_star, 1.0 / K, 1e-12) << K;
      EXPECT_NEAR(opt.P_star, single_channel_optimum(K), 1e-14) << K;
      // d/dp p (1-p)^{K-1} = (1-p)^{K-2} (1 - K p)
      const double p = opt.p_star;
      EXPECT_LT(std::abs(std::pow(1 - p, K - 2) * (1 - K * p)), 1e-8);
    }
  EXPECT_NEAR(optimize_random(1, 10, RandomScheme::General).P_star, 0.038742, 5e-7);
  const auto two = optimize_random(1, 2, RandomScheme::General);
  EXPECT_NEAR(two.p_star, 0.5, 1e-12);
  EXPECT_NEAR(two.P_star, 0.25, 1e-15);
}

TEST(Optimize, AssignTTwoChannelsAgainstDenseGrid) {
  auto f = [](double p) { return p * std::pow(1 - p, 5) / (2 - p); };
  const auto opt = optimize_random(2, 10, RandomScheme::AssignT);
  double best_p = 0.0, best = -1.0;
  for (int i = 1; i < 1'000'000; ++i) {
    const double p = i * 1e-6;
    if (f(p) > best) {
      best = f(p);
      best_p = p;
    }
  }
  EXPECT_NEAR(opt.p_star, best_p, 2e-6);
  EXPECT_GE(opt.P_star, best);
  // Stationary point of log f: 1/p - 5/(1-p) + 1/(2-p) = 0.
  const double p = opt.p_star;
  EXPECT_NEAR(1 / p - 5 / (1 - p) + 1 / (2 - p), 0.0, 1e-6);
}

TEST(Optimize, ArgmaxInvariantUnderScaling) {
  auto f = [](double p) { return p * std::pow(1 - p, 9) / (3 - p); };
  const double base = maximize_unimodal(f, 0.0, 1.0);
  for (double c : {1e-6, 0.5, 3.0, 1e6}) {
    const double scaled = maximize_unimodal([&](double p) { return c * f(p); }, 0.0, 1.0);
    EXPECT_NEAR(scaled, base, 1e-7) << c;
  }
}

TEST(Optimize, GoldenSectionOnQuadratic) {
  EXPECT_NEAR(golden_section_maximize([](double x) { return -(x - 0.3) * (x - 0.3); }, 0.0, 1.0), 0.3, 1e-7);
}

TEST(Coupon, Edges) {
  const auto m = CouponModel::optimal(10);
  EXPECT_EQ(coupon_cdf(m, 0), 0.0);
  EXPECT_EQ(coupon_cdf(m, 8), 0.0);
  EXPECT_GT(coupon_cdf(m, 9), 0.0);
  EXPECT_NEAR(coupon_cdf(m, 5000), 1.0, 1e-12);
  EXPECT_THROW(coupon_cdf(CouponModel{41, 0.001}, 100), std::domain_error);
  EXPECT_THROW(coupon_cdf(CouponModel{10, 0.2}, 100), std::invalid_argument);
}

TEST(Coupon, TwoNodesClosedForm) {
  // K = 2: one coupon with probability P, so P(Y <= l) = 1 - (1 - P)^l.
  const CouponModel m{2, 0.25};
  for (int l = 0; l < 40; ++l) EXPECT_NEAR(coupon_cdf(m, l), 1 - std::pow(0.75, l), 1e-15);
}

// Absolute error budget of the alternating sum at K <= 40.
constexpr double kCouponAbsTol = 1e-10;

TEST(Coupon, MonotoneAndBounded) {
  for (int K : {2, 5, 10, 18, 24, 30, 40}) {
    const auto m = CouponModel::optimal(K);
    double prev = 0.0;
    for (std::int64_t l = 0; l <= 3000; l += 7) {
      const double c = coupon_cdf(m, l);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      EXPECT_GE(c + kCouponAbsTol, prev) << K << " " << l;
      prev = c;
    }
  }
}

TEST(Coupon, MatchesMarkovChain) {
  // Forward recursion on the number of distinct coupons held; every term is positive.
  for (int K : {3, 5, 10, 18, 30, 40}) {
    const auto m = CouponModel::optimal(K);
    const int n = K - 1;
    std::vector<long double> state(static_cast<std::size_t>(n + 1), 0.0L);
    state[0] = 1.0L;
    double worst = 0.0;
    for (std::int64_t l = 1; l <= 2500; ++l) {
      for (int j = n; j >= 0; --j) {
        const long double stay = 1.0L - static_cast<long double>(n - j) * m.P;
        long double v = state[static_cast<std::size_t>(j)] * stay;
        if (j > 0) v += state[static_cast<std::size_t>(j - 1)] * static_cast<long double>(n - j + 1) * m.P;
        state[static_cast<std::size_t>(j)] = v;
      }
      worst = std::max(worst, std::abs(coupon_cdf(m, l) - static_cast<double>(state[static_cast<std::size_t>(n)])));
    }
    EXPECT_LT(worst, kCouponAbsTol) << K;
  }
}

TEST(Coupon, MatchesMonteCarlo) {
  std::mt19937_64 rng(2024);
  const int trials = 1'000'000;
  for (int K : {5, 10, 18}) {
    const auto m = CouponModel::optimal(K);
    std::vector<std::int64_t> ys(trials);
    for (auto& y : ys) y = sample_collection(rng, K, m.P);
    for (double q : {0.1, 0.5, 0.9, 0.99}) {
      // pick l near the q-quantile of the analytic CDF
      std::int64_t l = K - 1;
      while (coupon_cdf(m, l) < q) ++l;
      const double expected = coupon_cdf(m, l);
      const double empirical =
          static_cast<double>(std::count_if(ys.begin(), ys.end(), [&](std::int64_t y) { return y <= l; })) / trials;
      const double sigma = std::sqrt(expected * (1 - expected) / trials);
      EXPECT_LE(std::abs(empirical - expected), 3 * sigma) << "K=" << K << " l=" << l;
    }
  }
}

TEST(GroupCdf, TableValues) {
  EXPECT_NEAR(group_cdf(CouponModel::optimal(10), 209), 0.9769, 1e-4);
  EXPECT_NEAR(group_cdf(CouponModel::optimal(24), 728), 0.9944, 1e-4);
  EXPECT_NEAR(group_cdf(CouponModel::optimal(18), 665), 0.9998, 1e-4);
}

TEST(FrameLength, TableValues) {
  EXPECT_EQ(frame_length(10), 406);
  EXPECT_EQ(frame_length(15), 656);
  EXPECT_EQ(frame_length(18), 812);
  EXPECT_EQ(frame_length(20), 917);
  EXPECT_EQ(frame_length(24), 1130);
}

TEST(FrameLength, TwoNodes) {
  // P* = 1/4 for K = 2; (1 - 0.75^l)^2 >= 0.5 first at l = 5.
  EXPECT_EQ(frame_length(2, 0.5), 5);
  EXPECT_LT(std::pow(1 - std::pow(0.75, 4), 2), 0.5);
  EXPECT_GE(std::pow(1 - std::pow(0.75, 5), 2), 0.5);
}

TEST(FrameLength, IsSmallestReachingTarget) {
  for (int K = 2; K <= 40; K += 3)
    for (double target : {0.5, 0.9, 0.999, 0.99999}) {
      const auto m = CouponModel::optimal(K);
      const auto l = frame_length(m, target);
      EXPECT_GE(group_cdf(m, l), target);
      EXPECT_LT(group_cdf(m, l - 1), target);
    }
  EXPECT_THROW(frame_length(10, 1.0), std::invalid_argument);
}
