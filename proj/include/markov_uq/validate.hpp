#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "markov_uq/bound.hpp"
#include "markov_uq/simulate.hpp"

namespace markov_uq {

enum class Verdict { Pass, Fail, Inconclusive };

std::string_view to_string(Verdict v);

struct ValidationReport {
  double bound_plus = 0.0;
  double bound_minus = 0.0;
  double empirical_bias = 0.0;
  double std_error = 0.0;
  double base_mean = 0.0;
  std::size_t n_paths = 0;
  double horizon = 0.0;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<double> per_path;  // filled only on request
};

/// Pass iff -bound_minus - 3 se <= bias <= bound_plus + 3 se. Inconclusive when
/// the standard error is unavailable (fewer than two paths, non-finite).
Verdict judge(double bias, double std_error, double bound_plus, double bound_minus);

/// Simulates the alternative generator from `alt_initial` and compares the mean
/// ergodic average, minus mu*[f] under the base, against the bound.
ValidationReport validate_bound(const Observable& f, const GeneratorMatrix& alt,
                                const Vector& alt_initial, double horizon, std::size_t n_paths,
                                std::uint64_t seed, const UqBoundReport& bound,
                                unsigned threads = 0, bool keep_paths = false);

/// Alternative SDE with an observable given as a callable; the base mean is supplied.
ValidationReport validate_sde_bound(const ScalarFn& f, double base_mean, const SdeModel& alt,
                                    const InitialSampler& initial, const EmScheme& scheme,
                                    std::size_t n_paths, std::uint64_t seed,
                                    const UqBoundReport& bound, unsigned threads = 0);

/// Off-diagonal rates scaled by independent factors uniform in [1 - eps, 1 + eps].
GeneratorMatrix perturb_generator(const GeneratorMatrix& q, double eps, std::uint64_t seed);

/// Tightness check on an i.i.d. chain: base draws from p each step, the
/// alternative from the tilt of p that has relative entropy eta per step.
struct TiltValidation {
  double xi = 0.0;             // xi_infimum of the empirical CGF
  double exact_gap = 0.0;      // E_tilt[f] - E_p[f]
  double empirical_gap = 0.0;  // Monte Carlo over T-step averages
  double std_error = 0.0;
  double tilt_c = 0.0;
};

TiltValidation validate_tilt(const Vector& p, const Vector& f, double eta, std::size_t steps,
                             std::size_t n_paths, std::uint64_t seed, unsigned threads = 0);

}  // namespace markov_uq
