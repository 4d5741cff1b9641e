#include <gtest/gtest.h>

#include <cmath>

#include "markov_uq/simulate.hpp"
#include "markov_uq/spectral.hpp"
#include "markov_uq/zoo.hpp"
#include "test_util.hpp"

using namespace markov_uq;
using markov_uq::testing::gen;
using markov_uq::testing::random_generator;
using markov_uq::testing::random_reversible;
using markov_uq::testing::random_vector;

namespace {

template <class Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::NoApplicableMethod;
}

// Largest eigenvalue of the L2(mu)-symmetric part of A + diag V, computed
// directly from mu_i (A_ij + A*_ij)/2 without the library's symmetrize.
double kappa_oracle(const Matrix& a, const Vector& v, const Vector& mu) {
  const auto n = a.rows();
  Matrix s(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double w = 0.5 * (mu(i) * a(i, j) + mu(j) * a(j, i));
      s(i, j) = w / std::sqrt(mu(i) * mu(j));
    }
    s(i, i) += v(i);
  }
  return Eigen::SelfAdjointEigenSolver<Matrix>(s).eigenvalues().maxCoeff();
}

GeneratorMatrix sym2() { return gen({{-1, 1}, {1, -1}}); }

}  // namespace

TEST(Kappa, ZeroPotential) {
  RandomStream rng(21, 0);
  for (int i = 0; i < 20; ++i) {
    const auto q = random_generator(rng, 2 + i % 8);
    const auto mu = invariant_measure(q);
    EXPECT_NEAR(kappa(q, Vector::Zero(static_cast<Eigen::Index>(q.size())), mu), 0.0, 1e-12);
  }
}

TEST(Kappa, MatchesOracle) {
  RandomStream rng(22, 0);
  for (int i = 0; i < 50; ++i) {
    const auto n = i < 25 ? 3 : 2 + i % 7;
    const auto q = i % 2 ? random_reversible(rng, n) : random_generator(rng, n);
    const auto mu = invariant_measure(q);
    const Vector v = random_vector(rng, n, 2.0);
    EXPECT_NEAR(kappa(q, v, mu), kappa_oracle(q.rates(), v, mu.weights()), 1e-10);
  }
}

TEST(Kappa, MmInftyEigenvector) {
  const auto mm = mminfty_generator(1.0, 1.0, 400);
  for (double kbar : {1.1, 1.5, 2.0}) {
    const double c = 1.0 - 1.0 / kbar;
    const Vector v = c * (mm.counting().array() - 1.0).matrix();
    EXPECT_NEAR(kappa(mm.q, v, mm.mu), (kbar - 1) * (kbar - 1) / kbar, 1e-6) << kbar;
  }
}

TEST(Kappa, MonotoneInPotential) {
  RandomStream rng(23, 0);
  for (int i = 0; i < 50; ++i) {
    const auto q = random_generator(rng, 5);
    const auto mu = invariant_measure(q);
    const Vector v = random_vector(rng, 5);
    Vector w = v;
    for (Eigen::Index k = 0; k < 5; ++k) w(k) += rng.uniform();
    EXPECT_LE(kappa(q, v, mu), kappa(q, w, mu) + 1e-12);
  }
}

TEST(Kappa, MeasureMismatch) {
  const auto mu = invariant_measure(gen({{-2, 2}, {1, -1}}));
  EXPECT_EQ(kind_of([&] { kappa(sym2(), Vector::Zero(2), mu); }), ErrorKind::MeasureMismatch);
}

TEST(Poincare, Examples) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto fc = poincare_constant(q, mu);
  EXPECT_NEAR(fc.poincare_alpha, 0.5, 1e-14);
  EXPECT_TRUE(fc.reversible);
  EXPECT_EQ(fc.provenance, "spectral");

  for (int d = 2; d <= 8; ++d) {
    const auto h = hypercube_kernel(d);
    const auto a = uniformize(h.p, 1.0);
    EXPECT_NEAR(poincare_constant(a, rebind(h.mu, a)).poincare_alpha, d, 1e-10) << d;
  }
  const auto mm = mminfty_generator(1.0, 1.0, 200);
  EXPECT_NEAR(poincare_constant(mm.q, mm.mu).poincare_alpha, 1.0, 1e-6);
  const auto mm2 = mminfty_generator(0.5, 2.0, 60);
  EXPECT_NEAR(poincare_constant(mm2.q, mm2.mu).poincare_alpha, 0.5, 1e-6);
}

TEST(Poincare, ZeroGap) {
  // a chain that never leaves its state has no gap
  const auto q = gen({{-1, 1, 0}, {1, -1, 0}, {0, 0, 0}});
  const StationaryMeasure mu(Vector{{0.25, 0.25, 0.5}}, q.fingerprint());
  EXPECT_EQ(kind_of([&] { poincare_constant(q, mu); }), ErrorKind::ZeroGap);
}

TEST(Poincare, TightOnGapEigenfunction) {
  RandomStream rng(24, 0);
  for (int i = 0; i < 30; ++i) {
    const auto q = i % 2 ? random_reversible(rng, 6) : random_generator(rng, 6);
    const auto mu = invariant_measure(q);
    const double alpha = poincare_constant(q, mu).poincare_alpha;
    const Vector g = gap_eigenfunction(q, mu);
    const auto s = symmetrize(q, mu);
    const double var = mu.variance(g);
    const double dirichlet = -weighted_inner(s.rates() * g, g, mu);
    EXPECT_NEAR(var, alpha * dirichlet, 1e-10);
    // and the inequality holds for random functions
    const Vector h = random_vector(rng, 6);
    EXPECT_LE(mu.variance(h), -alpha * weighted_inner(s.rates() * h, h, mu) + 1e-12);
  }
}

TEST(PoincareBernstein, Examples) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto f = center_observable(Vector{{0.0, 1.0}}, mu);
  const auto p = poincare_bernstein_params(q, f, mu);
  EXPECT_NEAR(p.sigma2, 0.25, 1e-14);
  EXPECT_NEAR(p.m_plus, 0.25, 1e-14);
  EXPECT_NEAR(p.m_minus, 0.25, 1e-14);
  const auto k = poincare_bernstein_params(q, center_observable(Vector{{3.0, 3.0}}, mu), mu);
  EXPECT_EQ(k.sigma2, 0.0);
  EXPECT_EQ(k.m_plus, 0.0);
  EXPECT_EQ(bernstein_xi(k.sigma2, k.m_plus, 0.3), 0.0);
}

TEST(PoincareBernstein, DominatesKappaBound) {
  RandomStream rng(25, 0);
  for (int i = 0; i < 100; ++i) {
    const auto n = 2 + i % 7;
    const auto q = i % 2 ? random_reversible(rng, n) : random_generator(rng, n);
    const auto mu = invariant_measure(q);
    const auto f = center_observable(random_vector(rng, n), mu);
    const auto p = poincare_bernstein_params(q, f, mu);
    const double eta = 0.001 + 0.5 * rng.uniform();
    const auto xi = xi_infimum(kappa_lambda(q, f, mu), eta, Sign::Plus);
    EXPECT_GE(bernstein_xi(p.sigma2, p.m_plus, eta), xi.value - 1e-9);
  }
}

TEST(AsymptoticVariance, Examples) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  EXPECT_NEAR(asymptotic_variance(q, center_observable(Vector{{0.0, 1.0}}, mu), mu), 0.25, 1e-14);
  EXPECT_NEAR(asymptotic_variance(q, center_observable(Vector{{2.0, 2.0}}, mu), mu), 0.0, 1e-15);

  // birth-death Poisson equation: sigma^2(n) = 2 Var / rho = 2 lam / rho^2
  for (auto [lam, rho] : {std::pair{1.0, 1.0}, std::pair{2.0, 1.0}, std::pair{1.0, 2.0}}) {
    const auto mm = mminfty_generator(lam, rho, 200);
    const auto f = center_observable(mm.counting(), mm.mu);
    EXPECT_NEAR(asymptotic_variance(mm.q, f, mm.mu), 2.0 * lam / (rho * rho), 1e-8);
    EXPECT_NEAR(mm.pack.sigma2_n, 2.0 * lam / (rho * rho), 1e-15);
  }

  const auto rot = gen({{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}});
  const auto mu_r = invariant_measure(rot);
  EXPECT_EQ(kind_of([&] {
              asymptotic_variance(rot, center_observable(Vector{{0.0, 1.0, 2.0}}, mu_r), mu_r);
            }),
            ErrorKind::NotReversible);
}

TEST(AsymptoticVariance, MatchesCentredPoissonSolve) {
  RandomStream rng(26, 0);
  for (int i = 0; i < 100; ++i) {
    const auto n = 2 + i % 8;
    const auto q = random_reversible(rng, n);
    const auto mu = invariant_measure(q);
    const auto f = center_observable(random_vector(rng, n), mu);
    // -A g = f_hat with mu[g] = 0, solved as an augmented least-squares system
    Matrix m(n + 1, n);
    m.topRows(n) = -q.rates();
    m.row(n) = mu.weights().transpose();
    Vector rhs(n + 1);
    rhs.head(n) = f.centered;
    rhs(n) = 0.0;
    const Vector g = m.colPivHouseholderQr().solve(rhs);
    const double oracle = 2.0 * weighted_inner(g, f.centered, mu);
    const double s2 = asymptotic_variance(q, f, mu);
    EXPECT_NEAR(s2, oracle, 1e-9 * std::max(1.0, oracle));
    EXPECT_GE(s2, -1e-14);
    const double alpha = poincare_constant(q, mu).poincare_alpha;
    EXPECT_LE(s2, 2.0 * alpha * f.variance * (1 + 1e-12) + 1e-14);
    const auto rb = reversible_bernstein_params(q, f, mu);
    EXPECT_DOUBLE_EQ(rb.sigma2, s2);
    EXPECT_NEAR(rb.m_plus, alpha * f.pos_sup, 1e-12);
  }
}

TEST(ReversibleBernstein, DominatesKappa) {
  RandomStream rng(27, 0);
  for (int i = 0; i < 100; ++i) {
    const auto n = 2 + i % 7;
    const auto q = random_reversible(rng, n);
    const auto mu = invariant_measure(q);
    const auto f = center_observable(random_vector(rng, n), mu);
    const auto p = reversible_bernstein_params(q, f, mu);
    const auto lam = bernstein_lambda(p.sigma2, p.m_plus, p.m_minus);
    for (int k = 0; k < 10; ++k) {
      const double c = (k + 0.5) / 10.0 / std::max(p.m_plus, 1e-12);
      if (c * p.m_plus >= 1.0) continue;
      const Vector v = c * f.centered;
      EXPECT_LE(kappa(q, v, mu), lam(c) + 1e-10);
    }
  }
}

TEST(Liapunov, MmInftyDrift) {
  const auto mm = mminfty_generator(1.0, 1.0, 200);
  const auto lia = mm.liapunov(2.0, 1.0);
  EXPECT_NO_THROW(check_liapunov(mm.q, lia));
  // interior states satisfy the displayed identity exactly
  const Vector au = mm.q.rates() * lia.u;
  for (int n = 1; n < 150; ++n) {
    EXPECT_NEAR(-au(n) / lia.u(n), 1.0 * n * 0.5 - 1.0 * (2.0 - 1.0), 1e-9);
    EXPECT_NEAR(lia.phi(n) - lia.b, n * 0.5 - 1.0, 1e-12);
  }
  const auto f = center_observable(mm.counting(), mm.mu);
  const auto p = liapunov_bernstein_params(mm.q, f, mm.mu, lia, 1.0);
  EXPECT_NEAR(p.sigma2, 2.0, 1e-8);
  // f_hat / phi stays bounded where the sup norm grows with N
  EXPECT_LT(p.m_plus, f.pos_sup);
}

TEST(Liapunov, SupNormFallbackAndViolation) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto f = center_observable(Vector{{0.0, 1.0}}, mu);
  const LiapunovData trivial{Vector::Ones(2), Vector::Ones(2), 1.0};
  const auto p = liapunov_bernstein_params(q, f, mu, trivial, 0.0 + 1e-300);
  EXPECT_NEAR(p.m_plus, f.pos_sup, 1e-12);
  const LiapunovData bad{Vector::Ones(2), Vector::Constant(2, 3.0), 0.0};
  EXPECT_EQ(kind_of([&] { check_liapunov(q, bad); }), ErrorKind::LiapunovViolated);
}

TEST(Perturbation, Examples) {
  EXPECT_EQ(perturbation_kappa_bound(2.0, 0.5, 0.25, 0.0), 0.0);
  EXPECT_NEAR(perturbation_kappa_bound(2.0, 0.5, 0.25, 1.0), 1.0 / 6.0, 1e-15);
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto f = center_observable(Vector{{0.0, 1.0}}, mu);
  EXPECT_LE(kappa(q, f.centered, mu), 1.0 / 6.0);
  EXPECT_EQ(kind_of([] { perturbation_kappa_bound(2.0, 0.5, 0.25, 4.0); }), ErrorKind::OutOfRange);
  EXPECT_GT(perturbation_kappa_bound(2.0, 0.0, 0.25, 1e6), 0.0);
}

TEST(Perturbation, Domination) {
  RandomStream rng(28, 0);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const auto n = 2 + i % 7;
    const auto q = random_reversible(rng, n);
    const auto mu = invariant_measure(q);
    const auto f = center_observable(random_vector(rng, n), mu);
    const double d = 1.0 / poincare_constant(q, mu).poincare_alpha;
    const double c = 0.999 * rng.uniform() * d / f.pos_sup;
    const double bound = perturbation_kappa_bound(d, f.pos_sup, f.variance, c);
    if (kappa(q, c * f.centered, mu) > bound) ++violations;
  }
  EXPECT_EQ(violations, 0);
}

TEST(LogSobolevLambda, Examples) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto f = center_observable(Vector{{0.0, 1.0}}, mu);
  const auto lam = log_sobolev_lambda(f, mu, 1.0);
  EXPECT_EQ(lam(0.0), 0.0);
  EXPECT_NEAR(lam(1.0), std::log(std::cosh(0.5)), 1e-15);
  // Lambda''(0) = beta Var
  for (double beta : {0.5, 2.0}) {
    const auto l = log_sobolev_lambda(f, mu, beta);
    const double h = 1e-4;
    EXPECT_NEAR((l(h) - 2 * l(0) + l(-h)) / (h * h), beta * f.variance, 1e-6);
  }
}

TEST(FSobolev, LogRecoversLogSobolev) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto f = center_observable(Vector{{0.0, 1.0}}, mu);
  const auto fs = FSobolevFunction::scaled_log(1.0);
  EXPECT_NO_THROW(validate_f_sobolev(fs));
  EXPECT_NEAR(f_sobolev_lambda(f, mu, fs, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(f_sobolev_lambda(f, mu, fs, 1.0), std::log(std::cosh(0.5)), 1e-15);
  RandomStream rng(29, 0);
  const auto q2 = random_reversible(rng, 5);
  const auto mu2 = invariant_measure(q2);
  const auto g = center_observable(random_vector(rng, 5), mu2);
  for (double beta : {0.3, 1.0, 4.0}) {
    const auto fl = f_sobolev_lambda_function(g, mu2, FSobolevFunction::scaled_log(beta));
    const auto ll = log_sobolev_lambda(g, mu2, beta);
    for (double c : {-2.0, -0.1, 0.7, 3.0}) EXPECT_NEAR(fl(c), ll(c), 1e-12);
  }
  EXPECT_EQ(f_sobolev_lambda(f, mu, fs, 5.0, -1.0, 1.0), kInfinity);
}

TEST(FSobolev, DomainViolationAndValidation) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto f = center_observable(Vector{{0.0, 1.0}}, mu);
  // F(x) = x - 1 has F(0+) = -1: V_c below -1 leaves the domain
  FSobolevFunction lin{[](double x) { return x - 1.0; }, [](double y) { return y + 1.0; }, -1.0};
  EXPECT_NO_THROW(validate_f_sobolev(lin));
  EXPECT_EQ(kind_of([&] { f_sobolev_lambda(f, mu, lin, 4.0); }), ErrorKind::DomainViolation);
  FSobolevFunction bad{[](double x) { return x; }, [](double y) { return y; }, 0.0};
  EXPECT_EQ(kind_of([&] { validate_f_sobolev(bad); }), ErrorKind::InvalidModel);
}

TEST(LogSobolevNumeric, TwoStateAndFloor) {
  const auto q = sym2();
  const auto mu = invariant_measure(q);
  const auto est = log_sobolev_constant_numeric(q, mu);
  EXPECT_EQ(est.provenance, "numeric");
  EXPECT_GE(est.beta, 2.0 * 0.5 - 1e-12);
  EXPECT_GE(est.agreeing_restarts, est.restarts / 2);
  // symmetric two-point space: sharp constant equals 2 alpha = 1
  EXPECT_NEAR(est.beta, 1.0, 1e-6);
  EXPECT_NEAR(log_sobolev_constant_numeric(q, mu, 99).beta, est.beta, 1e-6);
}

TEST(LogSobolevNumeric, InequalityAgainstKappa) {
  RandomStream rng(30, 0);
  for (int i = 0; i < 10; ++i) {
    const auto n = 2 + i % 7;
    const auto q = random_reversible(rng, n);
    const auto mu = invariant_measure(q);
    const auto est = log_sobolev_constant_numeric(q, mu);
    EXPECT_GE(est.beta, 2.0 * poincare_constant(q, mu).poincare_alpha * (1 - 1e-12));
    const auto f = center_observable(random_vector(rng, n), mu);
    const auto lam = log_sobolev_lambda(f, mu, est.beta);
    for (double c : {-3.0, -0.5, 0.2, 1.0, 4.0}) {
      EXPECT_LE(kappa(q, c * f.centered, mu), lam(c) + 1e-9);
    }
  }
}

TEST(LogSobolevNumeric, Limits) {
  const auto rot = gen({{-1, 1, 0}, {0, -1, 1}, {1, 0, -1}});
  EXPECT_EQ(kind_of([&] { log_sobolev_constant_numeric(rot, invariant_measure(rot)); }),
            ErrorKind::NotReversible);
  const auto mm = mminfty_generator(1.0, 1.0, 80);
  EXPECT_EQ(kind_of([&] { log_sobolev_constant_numeric(mm.q, mm.mu); }),
            ErrorKind::DimensionTooLarge);
}

TEST(Harris, Examples) {
  const auto r = harris_xi({0.5, 1.0, 10.0, 0.5, 0.25, 1.0});
  EXPECT_NEAR(r.xi, 3.75 / 4.5, 1e-15);
  EXPECT_NEAR(r.rate, std::log(1.2), 1e-14);
  const auto small = harris_xi({0.5, 1.0, 10.0, 0.5, 1e-9, 1.0});
  EXPECT_NEAR(small.xi, 1.0, 1e-8);
  EXPECT_NEAR(small.rate, 0.0, 1e-8);
  const auto big = harris_xi({0.5, 1.0, 1e12, 0.5, 0.25, 1.0});
  EXPECT_NEAR(big.xi, std::max(0.75, 0.5), 1e-9);
  // gamma0-driven branch dominates once 1 - (alpha - alpha0) < gamma
  const auto far = harris_xi({0.9, 1.0, 1e12, 0.5, 0.25, 1.0});
  EXPECT_NEAR(far.xi, 0.9, 1e-9);
  EXPECT_EQ(kind_of([] { harris_xi({0.5, 1.0, 4.0, 0.5, 0.25, 1.0}); }),
            ErrorKind::ConstraintViolated);
}

TEST(Decay, ExactTwoStateSemigroup) {
  // P_t f - mu[f] = e^{-2t} f_hat, L2 norm 0.5 e^{-2t}
  DecaySeries s;
  for (int k = 0; k < 20; ++k) {
    const double t = 0.25 * k;
    s.emplace_back(t, 0.5 * std::exp(-2.0 * t));
  }
  EXPECT_NEAR(poincare_from_decay({s}), 0.5, 1e-6);
  DecaySeries zero{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_NEAR(poincare_from_decay({zero, s}), 0.5, 1e-6);
  EXPECT_EQ(kind_of([&] { poincare_from_decay({zero}); }), ErrorKind::InsufficientSamples);
  EXPECT_EQ(kind_of([&] { poincare_from_decay({DecaySeries{{0, 1}, {1, 0.5}}}); }),
            ErrorKind::InsufficientSamples);
  EXPECT_EQ(kind_of([&] { poincare_from_decay({DecaySeries{{0, 1}, {1, 2}, {2, 4}}}); }),
            ErrorKind::NonDecaying);
}

TEST(Decay, NeverBelowSpectralAlpha) {
  RandomStream rng(31, 0);
  for (int i = 0; i < 20; ++i) {
    const auto n = 3 + i % 5;
    const auto q = random_reversible(rng, n);
    const auto mu = invariant_measure(q);
    const Matrix s = similarity_transform(q.rates(), mu);
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
    const Vector sq = mu.weights().cwiseSqrt();
    const auto f = center_observable(random_vector(rng, n), mu);
    const Vector u = sq.cwiseProduct(f.centered);
    const Vector ev = es.eigenvalues();  // ascending, ev(n-1) = 0
    const double gap = -ev(n - 2);
    const double sub = ev(n - 2) - ev(n - 3);
    // Sample where the subdominant modes have died out relative to the gap mode.
    const double t0 = std::min(30.0 / sub, 300.0 / gap);
    DecaySeries series, early;
    for (int k = 0; k < 30; ++k) {
      const double t = t0 + 0.2 * k / gap;
      const double te = 0.2 * k / gap;
      Vector ete = (es.eigenvalues() * te).array().exp().matrix();
      ete(n - 1) = 0.0;  // the constant mode carries only roundoff
      early.emplace_back(te, (es.eigenvectors() * ete.asDiagonal() *
                              es.eigenvectors().transpose() * u).norm());
      Vector et = (es.eigenvalues() * t).array().exp().matrix();
      et(n - 1) = 0.0;
      const Vector w = es.eigenvectors() * et.asDiagonal() * es.eigenvectors().transpose() * u;
      series.emplace_back(t, w.norm());
    }
    const double alpha = poincare_constant(q, mu).poincare_alpha;
    if (30.0 / sub <= 300.0 / gap) {
      EXPECT_GE(poincare_from_decay({series}), alpha - 1e-6);
    }
    // transients only ever steepen the decay, so the fit never exceeds the spectral value
    EXPECT_LE(poincare_from_decay({early}), alpha * (1 + 1e-9));
    EXPECT_LE(poincare_from_decay({series}), alpha * (1 + 1e-9));
  }
}

TEST(CarlenLoss, Examples) {
  EXPECT_NEAR(carlen_loss_beta(1.0, 0.0), 3.04308, 1e-5);
  EXPECT_GT(carlen_loss_beta(0.7, 2.0), 2.1);
  EXPECT_NEAR(carlen_loss_beta(1e-300, 0.0), 1.0 / (M_PI * std::exp(2.0)), 1e-15);
}

TEST(Hessian, Conventions) {
  const auto p = hessian_constants(1.0, HessianConvention::Poincare);
  EXPECT_EQ(p.poincare_alpha, 1.0);
  EXPECT_FALSE(p.log_sobolev_beta.has_value());
  const auto l = hessian_constants(2.0, HessianConvention::LogSobolev);
  EXPECT_EQ(*l.log_sobolev_beta, 1.0);
  EXPECT_EQ(l.poincare_alpha, 0.5);
  EXPECT_EQ(l.provenance, "analytic");
}
