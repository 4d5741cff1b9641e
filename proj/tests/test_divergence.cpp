#include <gtest/gtest.h>

#include <cmath>

#include "markov_uq/divergence.hpp"
#include "test_util.hpp"

using namespace markov_uq;
using markov_uq::testing::random_probability;
using markov_uq::testing::random_vector;

TEST(Cgf, Examples) {
  const Vector p{{0.5, 0.5}};
  const Vector f{{0.0, 1.0}};
  EXPECT_EQ(cgf(p, f, 0.0), 0.0);
  EXPECT_NEAR(cgf(p, f, 1.0), 0.620115, 1e-6);
  EXPECT_NEAR(cgf(p, f, 1.0), std::log((1.0 + std::exp(1.0)) / 2.0), 1e-15);
  // shifted evaluation survives |c f| far beyond exp overflow
  EXPECT_NEAR(cgf(p, f, 700.0), 700.0 - std::log(2.0), 1e-9);
  EXPECT_NEAR(cgf(p, f, -700.0), -std::log(2.0), 1e-12);
}

TEST(Cgf, CentredIdentity) {
  RandomStream rng(11, 0);
  for (int i = 0; i < 100; ++i) {
    const auto n = 2 + i % 6;
    const Vector p = random_probability(rng, n);
    const Vector f = random_vector(rng, n, 3.0);
    const double c = 4.0 * (rng.uniform() - 0.5);
    const double mean = p.dot(f);
    const Vector fc = (f.array() - mean).matrix();
    EXPECT_NEAR(cgf(p, fc, c), cgf(p, f, c) - c * mean, 1e-12);
  }
}

TEST(RelativeEntropy, Examples) {
  EXPECT_EQ(relative_entropy(Vector{{0.3, 0.7}}, Vector{{0.3, 0.7}}), 0.0);
  EXPECT_NEAR(relative_entropy(Vector{{0.6, 0.4}}, Vector{{0.5, 0.5}}), 0.020136, 1e-6);
  EXPECT_EQ(relative_entropy(Vector{{1.0, 0.0}}, Vector{{0.0, 1.0}}), kInfinity);
  EXPECT_NEAR(relative_entropy(Vector{{1.0, 0.0}}, Vector{{0.5, 0.5}}), std::log(2.0), 1e-15);
}

TEST(RelativeEntropy, NonNegative) {
  RandomStream rng(12, 0);
  for (int i = 0; i < 200; ++i) {
    const auto n = 2 + i % 5;
    EXPECT_GE(relative_entropy(random_probability(rng, n), random_probability(rng, n)), 0.0);
  }
}

TEST(XiInfimum, ZeroLambda) {
  LambdaFunction zero{[](double) { return 0.0; }};
  const auto r = xi_infimum(zero, 0.3, Sign::Plus);
  EXPECT_LE(r.value, 1e-7);
  EXPECT_EQ(r.boundary, Boundary::AtCap);
  EXPECT_FALSE(r.minimizer_c.has_value());
}

TEST(XiInfimum, QuadraticAtZeroEta) {
  LambdaFunction quad{[](double c) { return c * c / 2.0; }};
  const auto r = xi_infimum(quad, 0.0, Sign::Minus);
  EXPECT_LE(r.value, 1e-10);
  EXPECT_EQ(r.boundary, Boundary::AtZero);
}

TEST(XiInfimum, BernsteinExample) {
  const auto lam = bernstein_lambda(2.0, 1.0, 1.0);
  const auto r = xi_infimum(lam, 0.5, Sign::Plus);
  EXPECT_NEAR(r.value, std::sqrt(2.0) + 0.5, 1e-8);
  EXPECT_NEAR(r.value, 1.914214, 1e-6);
  ASSERT_TRUE(r.minimizer_c.has_value());
  // independent brute-force grid over (0, 1)
  double grid_min = kInfinity;
  for (int k = 1; k < 1000000; ++k) {
    const double c = k * 1e-6;
    grid_min = std::min(grid_min, (lam(c) + 0.5) / c);
  }
  EXPECT_LE(r.value, grid_min + 1e-9);
  EXPECT_NEAR(r.value, grid_min, 1e-6);
  // one-sided differences bracket zero at the minimiser
  const double c = *r.minimizer_c;
  const auto obj = [&](double x) { return (lam(x) + 0.5) / x; };
  EXPECT_GE(obj(c * (1 + 1e-4)) - obj(c), -1e-12);
  EXPECT_GE(obj(c * (1 - 1e-4)) - obj(c), -1e-12);
}

TEST(XiInfimum, NanIsEvaluationFailure) {
  LambdaFunction bad{[](double) { return std::nan(""); }};
  try {
    xi_infimum(bad, 0.1, Sign::Plus);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EvaluationFailure);
  }
}

TEST(Bernstein, ClosedForm) {
  EXPECT_DOUBLE_EQ(bernstein_xi(1.0, 0.0, 2.0), 2.0);
  EXPECT_NEAR(bernstein_xi(2.0, 1.0, 0.5), 1.914214, 1e-6);
  EXPECT_EQ(bernstein_xi(3.0, 2.0, 0.0), 0.0);
  // closed form equals the numeric infimum of the Bernstein Lambda
  RandomStream rng(13, 0);
  for (int i = 0; i < 200; ++i) {
    const double s2 = 0.01 + 5.0 * rng.uniform();
    const double m = 3.0 * rng.uniform();
    const double eta = std::exp(std::log(1e-4) + rng.uniform() * std::log(1e4));
    const auto r = xi_infimum(bernstein_lambda(s2, m, m), eta, Sign::Plus);
    EXPECT_NEAR(r.value, bernstein_xi(s2, m, eta), 1e-8 * std::max(1.0, r.value));
  }
}

TEST(Linearized, Examples) {
  EXPECT_EQ(linearized_xi(0.0, 0.4), 0.0);
  EXPECT_NEAR(linearized_xi(0.25, 0.02), 0.1, 1e-15);
  const Vector p{{0.5, 0.5}};
  const Vector f{{0.0, 1.0}};
  const auto lam = empirical_cgf_lambda(p, f);
  double prev = kInfinity;
  for (double eta : {1e-2, 1e-3, 1e-4}) {
    const double gap = xi_infimum(lam, eta, Sign::Plus).value - linearized_xi(0.25, eta);
    EXPECT_LE(std::abs(gap) / eta, 1.0);
    EXPECT_LE(std::abs(gap), prev);
    prev = std::abs(gap);
  }
}

TEST(Tilt, Examples) {
  const Vector p{{0.5, 0.5}};
  const Vector f{{0.0, 1.0}};
  EXPECT_LE((tilted_measure(p, f, 0.0) - p).cwiseAbs().maxCoeff(), 1e-16);
  const Vector t = tilted_measure(p, f, 1.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(t(0), 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(t(1), e / (1.0 + e), 1e-15);

  const double eta = relative_entropy(Vector{{0.4, 0.6}}, p);
  const double c = solve_tilt_level(p, f, eta);
  EXPECT_NEAR(c, std::log(1.5), 1e-9);
  EXPECT_NEAR(tilted_measure(p, f, c)(1), 0.6, 1e-10);
  EXPECT_LE(solve_tilt_level(p, f, 1e-12), 1e-5);
}

TEST(Tilt, MeanMonotoneInC) {
  RandomStream rng(14, 0);
  const Vector p = random_probability(rng, 6);
  const Vector f = random_vector(rng, 6);
  double prev = -kInfinity;
  for (int k = -50; k <= 50; ++k) {
    const double m = tilted_measure(p, f, 0.2 * k).dot(f);
    EXPECT_GE(m, prev - 1e-14);
    prev = m;
  }
}

TEST(Tilt, Errors) {
  const Vector p{{0.5, 0.5}};
  auto kind = [&](const Vector& f, double eta) {
    try {
      solve_tilt_level(p, f, eta);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::NoApplicableMethod;
  };
  EXPECT_EQ(kind(Vector{{1.0, 1.0}}, 0.1), ErrorKind::ConstantObservable);
  EXPECT_EQ(kind(Vector{{0.0, 1.0}}, std::log(2.0)), ErrorKind::EtaUnreachable);
}

TEST(Tilt, Tightness) {
  RandomStream rng(15, 0);
  for (int i = 0; i < 50; ++i) {
    const auto n = 2 + i % 6;
    const Vector p = random_probability(rng, n);
    const Vector f = random_vector(rng, n);
    const double eta = 0.001 + 0.2 * rng.uniform();
    const double c = solve_tilt_level(p, f, eta);
    const double gap = tilted_measure(p, f, c).dot(f) - p.dot(f);
    const auto xi = xi_infimum(empirical_cgf_lambda(p, f), eta, Sign::Plus);
    EXPECT_NEAR(gap, xi.value, 1e-8);
  }
}

TEST(Divergence, GibbsInequalityBothSides) {
  RandomStream rng(16, 0);
  for (int i = 0; i < 1000; ++i) {
    const auto n = 2 + i % 6;
    const Vector p = random_probability(rng, n);
    const Vector pt = random_probability(rng, n);
    const Vector f = random_vector(rng, n, 2.0);
    const double eta = relative_entropy(pt, p);
    const auto lam = empirical_cgf_lambda(p, f);
    const double bias = pt.dot(f) - p.dot(f);
    EXPECT_LE(bias, xi_infimum(lam, eta, Sign::Plus).value + 1e-12);
    EXPECT_GE(bias + xi_infimum(lam, eta, Sign::Minus).value, -1e-12);
  }
}

TEST(Divergence, ZeroIffEqualOrConstant) {
  const Vector p{{0.2, 0.3, 0.5}};
  const Vector f{{1.0, -1.0, 0.5}};
  EXPECT_LE(xi_infimum(empirical_cgf_lambda(p, f), 0.0, Sign::Plus).value, 1e-10);
  EXPECT_LE(xi_infimum(empirical_cgf_lambda(p, Vector::Constant(3, 2.0)), 0.1, Sign::Plus).value,
            1e-6);
  EXPECT_GT(xi_infimum(empirical_cgf_lambda(p, f), 0.01, Sign::Plus).value, 1e-3);
}

TEST(Lambda, Convexity) {
  RandomStream rng(17, 0);
  const Vector p = random_probability(rng, 5);
  const Vector f = random_vector(rng, 5);
  const LambdaFunction lams[] = {empirical_cgf_lambda(p, f), bernstein_lambda(0.7, 0.5, 0.25)};
  for (const auto& lam : lams) {
    EXPECT_EQ(lam(0.0), 0.0);
    for (int i = 0; i < 200; ++i) {
      const double lo = -3.9 + 7.8 * rng.uniform();
      const double hi = -3.9 + 7.8 * rng.uniform();
      const double mid = 0.5 * (lo + hi);
      if (!std::isfinite(lam(lo)) || !std::isfinite(lam(hi))) continue;
      EXPECT_LE(lam(mid), 0.5 * (lam(lo) + lam(hi)) + 1e-12);
      EXPECT_GE(lam(mid), -1e-15);
    }
  }
}
