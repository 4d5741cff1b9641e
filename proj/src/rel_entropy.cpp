#include "markov_uq/rel_entropy.hpp"

#include <cmath>
#include <numbers>

#include "markov_uq/divergence.hpp"
#include "markov_uq/simulate.hpp"

namespace markov_uq {

namespace {

constexpr double kInvarianceTol = 1e-8;
constexpr int kStrata = 16;

// One jump-rate contribution q_t log(q_t/q) - q_t + q; zero when the rates agree.
double rate_term(double q_t, double q) {
  if (q_t == 0.0) return q;
  return q_t * std::log(q_t / q) - q_t + q;
}

void require_mc(const McOptions& mc) {
  if (mc.n_paths < 2) throw Error(ErrorKind::OutOfRange, "Monte Carlo needs at least 2 paths");
}

EntropyRate from_samples(const std::vector<double>& per_path, const char* estimator) {
  const MeanEstimate m = estimate_mean(per_path);
  EntropyRate out;
  out.rate = m.mean;
  out.std_error = m.std_error;
  out.estimator = estimator;
  return out;
}

// (1/2) dt * stratified average of |b(y) - b(y + b(y) s + W_s)|^2 over one step.
double onestep_sample(const DriftFn& b, const Vector& y, double dt, RandomStream& rng) {
  const Vector by = b(y);
  double acc = 0.0;
  Vector x(y.size());
  for (int k = 0; k < kStrata; ++k) {
    const double s = (k + rng.uniform()) * dt / kStrata;
    const double sd = std::sqrt(s);
    for (Eigen::Index i = 0; i < y.size(); ++i) x(i) = y(i) + by(i) * s + sd * rng.normal();
    acc += (by - b(x)).squaredNorm();
  }
  return 0.5 * dt * acc / kStrata;
}

}  // namespace

EntropyRate ctmc_relent_rate(const Vector& lam_t, const TransitionKernel& a_t, const Vector& lam,
                             const TransitionKernel& a, const StationaryMeasure& mu_t_star) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (a_t.size() != a.size() || lam.size() != n || lam_t.size() != n ||
      mu_t_star.size() != a.size()) {
    throw Error(ErrorKind::DimensionMismatch, "ctmc_relent_rate: sizes differ");
  }
  if (!lam.allFinite() || !lam_t.allFinite() || !(lam.minCoeff() > 0.0) ||
      !(lam_t.minCoeff() > 0.0)) {
    throw Error(ErrorKind::InvalidModel, "jump rates must be positive and finite");
  }
  for (Eigen::Index x = 0; x < n; ++x) {
    for (Eigen::Index z = 0; z < n; ++z) {
      if ((a(x, z) == 0.0) != (a_t(x, z) == 0.0)) {
        throw Error(ErrorKind::SupportMismatch, "jump kernels differ in support at (" +
                                                    std::to_string(x) + ", " + std::to_string(z) +
                                                    ")");
      }
    }
  }
  const Vector& w = mu_t_star.weights();
  double residual = 0.0;
  for (Eigen::Index y = 0; y < n; ++y) {
    double r = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) r += w(x) * lam_t(x) * (a_t(x, y) - (x == y ? 1.0 : 0.0));
    residual = std::max(residual, std::abs(r));
  }
  if (residual > kInvarianceTol) {
    throw Error(ErrorKind::NotInvariant,
                "mu_t_star is not invariant for the alternative chain (residual " +
                    std::to_string(residual) + ")");
  }
  EntropyRate out;
  out.estimator = "exact-formula";
  for (Eigen::Index x = 0; x < n; ++x) {
    double row = 0.0;
    for (Eigen::Index z = 0; z < n; ++z) {
      if (a(x, z) > 0.0) row += rate_term(lam_t(x) * a_t(x, z), lam(x) * a(x, z));
    }
    out.rate += w(x) * row;
  }
  out.rate = std::max(out.rate, 0.0);
  return out;
}

EntropyRate ctmc_relent_rate(const GeneratorMatrix& q_t, const GeneratorMatrix& q,
                             const StationaryMeasure& mu_t_star,
                             const std::optional<StationaryMeasure>& mu_star) {
  const std::size_t n = q.size();
  if (q_t.size() != n || mu_t_star.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "ctmc_relent_rate: sizes differ");
  }
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      if (x != z && (q(x, z) == 0.0) != (q_t(x, z) == 0.0)) {
        throw Error(ErrorKind::SupportMismatch,
                    "generators differ in support at (" + q.states()[x] + ", " + q.states()[z] + ")");
      }
    }
  }
  const double residual = stationarity_residual(q_t, mu_t_star);
  if (residual > kInvarianceTol) {
    throw Error(ErrorKind::NotInvariant,
                "mu_t_star is not invariant for the alternative generator (residual " +
                    std::to_string(residual) + ")");
  }
  EntropyRate out;
  out.estimator = "exact-formula";
  for (std::size_t x = 0; x < n; ++x) {
    double row = 0.0;
    for (std::size_t z = 0; z < n; ++z) {
      if (z != x && q(x, z) > 0.0) row += rate_term(q_t(x, z), q(x, z));
    }
    out.rate += mu_t_star[x] * row;
  }
  out.rate = std::max(out.rate, 0.0);
  if (mu_star) out.initial_term = relative_entropy(mu_t_star.weights(), mu_star->weights());
  return out;
}

EntropyRate dtmc_relent_rate(const TransitionKernel& p_t, const TransitionKernel& p,
                             const StationaryMeasure& mu_t_star,
                             const std::optional<StationaryMeasure>& mu_star) {
  const std::size_t n = p.size();
  if (p_t.size() != n || mu_t_star.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "dtmc_relent_rate: sizes differ");
  }
  const double residual = stationarity_residual(p_t, mu_t_star);
  if (residual > kInvarianceTol) {
    throw Error(ErrorKind::NotInvariant,
                "mu_t_star is not invariant for the alternative kernel (residual " +
                    std::to_string(residual) + ")");
  }
  EntropyRate out;
  out.estimator = "exact-formula";
  for (std::size_t x = 0; x < n; ++x) {
    const auto i = static_cast<Eigen::Index>(x);
    const double r = relative_entropy(p_t.probabilities().row(i).transpose(),
                                      p.probabilities().row(i).transpose());
    if (!std::isfinite(r)) {
      throw Error(ErrorKind::SupportMismatch,
                  "row " + p.states()[x] + " of the alternative is not absolutely continuous");
    }
    out.rate += mu_t_star[x] * r;
  }
  if (mu_star) out.initial_term = relative_entropy(mu_t_star.weights(), mu_star->weights());
  return out;
}

EntropyRate girsanov_rate_mc(const DriftFn& beta, const SdeModel& alt,
                             const InitialSampler& initial, const EmScheme& scheme,
                             const McOptions& mc) {
  require_mc(mc);
  if (!(scheme.dt > 0.0) || scheme.steps == 0) {
    throw Error(ErrorKind::OutOfRange, "EM scheme needs dt > 0 and at least one step");
  }
  const double horizon = scheme.horizon();
  std::vector<double> per_path(mc.n_paths);
  parallel_for(mc.n_paths, mc.threads, [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::Girsanov, i));
    Vector x = initial(rng);
    check_blowup(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < scheme.steps; ++k) {
      acc += 0.5 * beta(x).squaredNorm() * scheme.dt;
      em_step(alt.drift, x, scheme.dt, rng);
    }
    per_path[i] = acc / horizon;
  });
  return from_samples(per_path, "monte-carlo");
}

McValue em_relent_onestep_mc(const DriftFn& b, const Vector& y, double dt, std::size_t n_samples,
                             std::uint64_t seed) {
  if (!(dt > 0.0)) throw Error(ErrorKind::OutOfRange, "dt must be positive");
  if (n_samples < 2) throw Error(ErrorKind::OutOfRange, "need at least 2 samples");
  std::vector<double> values(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    RandomStream rng(seed, stream_id(StreamPurpose::EmOneStep, j));
    values[j] = onestep_sample(b, y, dt, rng);
  }
  const MeanEstimate m = estimate_mean(values);
  return {m.mean, m.std_error};
}

EntropyRate em_relent_rate(const DriftFn& b, const InitialSampler& initial,
                           const EmScheme& scheme, const McOptions& mc) {
  require_mc(mc);
  if (!(scheme.dt > 0.0) || scheme.steps == 0) {
    throw Error(ErrorKind::OutOfRange, "EM scheme needs dt > 0 and at least one step");
  }
  const double horizon = scheme.horizon();
  std::vector<double> per_path(mc.n_paths);
  parallel_for(mc.n_paths, mc.threads, [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::EmRate, i));
    Vector x = initial(rng);
    check_blowup(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < scheme.steps; ++k) {
      acc += onestep_sample(b, x, scheme.dt, rng);
      em_step(b, x, scheme.dt, rng);
    }
    per_path[i] = acc / horizon;
  });
  return from_samples(per_path, "monte-carlo");
}

EntropyRate em_relent_taylor_bound(const DriftFn& b, const JacobianFn& db, double lipschitz_l,
                                   double db_sup_norm, const InitialSampler& initial,
                                   const EmScheme& scheme, const McOptions& mc) {
  require_mc(mc);
  if (!(scheme.dt > 0.0) || scheme.steps == 0) {
    throw Error(ErrorKind::OutOfRange, "EM scheme needs dt > 0 and at least one step");
  }
  if (lipschitz_l < 0.0 || db_sup_norm < 0.0) {
    throw Error(ErrorKind::OutOfRange, "L and sup|Db| must be nonnegative");
  }
  const double dt = scheme.dt;
  const double sdt = std::sqrt(dt);
  const double l = lipschitz_l;
  const double ldb = l * db_sup_norm;
  std::vector<double> per_path(mc.n_paths);
  int dimension = 0;
  parallel_for(mc.n_paths, mc.threads, [&](std::size_t i) {
    RandomStream rng(mc.seed, stream_id(StreamPurpose::EmTaylor, i));
    Vector x = initial(rng);
    check_blowup(x);
    if (i == 0) dimension = static_cast<int>(x.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < scheme.steps; ++k) {
      const Vector bx = b(x);
      const Matrix j = db(x);
      const double bn = bx.norm();
      acc += dt / 4.0 * j.squaredNorm() +
             dt * sdt *
                 (sdt / 6.0 * (j * bx).squaredNorm() + ldb / 2.0 * bn * bn * bn * dt * sdt +
                  l * l / 5.0 * bn * bn * bn * bn * dt * dt * sdt);
      em_step(b, x, dt, rng);
    }
    per_path[i] = acc / static_cast<double>(scheme.steps);
  });
  EntropyRate out = from_samples(per_path, "taylor-bound");
  const double n = dimension;
  const double gamma_ratio = std::exp(std::lgamma((n + 3.0) / 2.0) - std::lgamma(n / 2.0));
  out.rate += dt * sdt *
              (8.0 * std::numbers::sqrt2 * gamma_ratio / 5.0 * ldb +
               n * (n + 2.0) * l * l / 3.0 * sdt);
  return out;
}

McValue init_relent_mc(const ScalarFn& phi_t, const ScalarFn& phi, const InitialSampler& sampler,
                       std::size_t n_samples, std::uint64_t seed) {
  if (n_samples < 2) throw Error(ErrorKind::OutOfRange, "need at least 2 samples");
  std::vector<double> values(n_samples);
  for (std::size_t j = 0; j < n_samples; ++j) {
    RandomStream rng(seed, stream_id(StreamPurpose::InitialEntropy, j));
    const Vector x = sampler(rng);
    values[j] = phi(x) - phi_t(x);
  }
  const MeanEstimate m = estimate_mean(values);
  return {m.mean, m.std_error};
}

}  // namespace markov_uq
