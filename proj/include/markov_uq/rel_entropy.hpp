#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "markov_uq/chain_core.hpp"
#include "markov_uq/parallel.hpp"
#include "markov_uq/sde.hpp"

namespace markov_uq {

/// Relative-entropy rate eta between an alternative and a base model.
/// The bound uses eta = rate + initial_term / T.
struct EntropyRate {
  double rate = 0.0;          // nats per unit time
  double initial_term = 0.0;  // nats, R(mu_tilde || mu)
  double std_error = 0.0;     // nats per unit time; 0 for exact formulas
  std::string estimator;      // exact-formula | monte-carlo | taylor-bound

  double eta(double horizon) const { return rate + initial_term / horizon; }
};

/// Jump-chain form: exit rates lam and jump kernel a for each model.
/// rate = sum_x mu_t(x) [lam_t(x) sum_z a_t(x,z) log(lam_t a_t / (lam a)) - (lam_t(x) - lam(x))].
/// mu_t_star must be invariant for the alternative chain (residual <= 1e-8).
EntropyRate ctmc_relent_rate(const Vector& lam_t, const TransitionKernel& a_t, const Vector& lam,
                             const TransitionKernel& a, const StationaryMeasure& mu_t_star);

/// Same rate read off two generators; their off-diagonal patterns must agree.
/// With mu_star given, initial_term = R(mu_t_star || mu_star).
EntropyRate ctmc_relent_rate(const GeneratorMatrix& q_t, const GeneratorMatrix& q,
                             const StationaryMeasure& mu_t_star,
                             const std::optional<StationaryMeasure>& mu_star = std::nullopt);

/// rate = sum_x mu_t(x) R(p_t(x,.) || p(x,.)); initial_term = R(mu_t || mu) when mu given.
EntropyRate dtmc_relent_rate(const TransitionKernel& p_t, const TransitionKernel& p,
                             const StationaryMeasure& mu_t_star,
                             const std::optional<StationaryMeasure>& mu_star = std::nullopt);

struct McOptions {
  std::size_t n_paths = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

/// (1/T) int_0^T (1/2) E|beta(X_s)|^2 ds along EM paths of the alternative SDE
/// `alt` started from `initial`; the base drift is alt.drift - beta.
EntropyRate girsanov_rate_mc(const DriftFn& beta, const SdeModel& alt,
                             const InitialSampler& initial, const EmScheme& scheme,
                             const McOptions& mc);

/// Monte Carlo value with its standard error.
struct McValue {
  double value = 0.0;
  double std_error = 0.0;
};

/// (1/2) int_0^dt E|b(y) - b(y + b(y) s + W_s)|^2 ds for one EM step from y.
/// Each sample integrates over 16 equal time strata with one uniformly
/// placed point per stratum, so the estimate is unbiased.
McValue em_relent_onestep_mc(const DriftFn& b, const Vector& y, double dt, std::size_t n_samples,
                             std::uint64_t seed);

/// (1/(N dt)) sum_j E[one-step term at X_{j dt}] along EM paths of b from `initial`.
EntropyRate em_relent_rate(const DriftFn& b, const InitialSampler& initial,
                           const EmScheme& scheme, const McOptions& mc);

/// A-priori per-unit-time Taylor bound on the EM entropy rate. Needs Db, the
/// Lipschitz constant L of Db and sup |Db| (operator norm).
EntropyRate em_relent_taylor_bound(const DriftFn& b, const JacobianFn& db, double lipschitz_l,
                                   double db_sup_norm, const InitialSampler& initial,
                                   const EmScheme& scheme, const McOptions& mc);

/// R(mu_t || mu) = E_{mu_t}[phi - phi_t] for normalised densities exp(-phi_t), exp(-phi).
McValue init_relent_mc(const ScalarFn& phi_t, const ScalarFn& phi, const InitialSampler& sampler,
                       std::size_t n_samples, std::uint64_t seed);

}  // namespace markov_uq
