#include "markov_uq/validate.hpp"

#include <cmath>

namespace markov_uq {

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Inconclusive: return "inconclusive";
  }
  return "unknown";
}

Verdict judge(double bias, double std_error, double bound_plus, double bound_minus) {
  if (!std::isfinite(std_error) || !std::isfinite(bias)) return Verdict::Inconclusive;
  const double guard = 3.0 * std_error;
  if (bias <= bound_plus + guard && bias >= -bound_minus - guard) return Verdict::Pass;
  return Verdict::Fail;
}

namespace {

ValidationReport finish(std::vector<double> per_path, double base_mean, double horizon,
                        const UqBoundReport& bound, bool keep) {
  const MeanEstimate m = estimate_mean(per_path);
  ValidationReport out;
  out.bound_plus = bound.xi_plus.value;
  out.bound_minus = bound.xi_minus.value;
  out.base_mean = base_mean;
  out.empirical_bias = m.mean - base_mean;
  out.std_error = m.std_error;
  out.n_paths = per_path.size();
  out.horizon = horizon;
  out.verdict = judge(out.empirical_bias, out.std_error, out.bound_plus, out.bound_minus);
  if (keep) out.per_path = std::move(per_path);
  return out;
}

}  // namespace

ValidationReport validate_bound(const Observable& f, const GeneratorMatrix& alt,
                                const Vector& alt_initial, double horizon, std::size_t n_paths,
                                std::uint64_t seed, const UqBoundReport& bound, unsigned threads,
                                bool keep_paths) {
  if (n_paths == 0) throw Error(ErrorKind::OutOfRange, "validation needs at least one path");
  std::vector<double> averages =
      ctmc_time_averages(alt, alt_initial, f.values, horizon, n_paths, seed, threads);
  return finish(std::move(averages), f.mean, horizon, bound, keep_paths);
}

ValidationReport validate_sde_bound(const ScalarFn& f, double base_mean, const SdeModel& alt,
                                    const InitialSampler& initial, const EmScheme& scheme,
                                    std::size_t n_paths, std::uint64_t seed,
                                    const UqBoundReport& bound, unsigned threads) {
  if (n_paths == 0) throw Error(ErrorKind::OutOfRange, "validation needs at least one path");
  if (!(scheme.dt > 0.0) || scheme.steps == 0) {
    throw Error(ErrorKind::OutOfRange, "EM scheme needs dt > 0 and at least one step");
  }
  std::vector<double> averages(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    RandomStream rng(seed, stream_id(StreamPurpose::Validation, i));
    Vector x = initial(rng);
    check_blowup(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < scheme.steps; ++k) {
      acc += f(x);
      em_step(alt.drift, x, scheme.dt, rng);
    }
    averages[i] = acc / static_cast<double>(scheme.steps);
  });
  return finish(std::move(averages), base_mean, scheme.horizon(), bound, false);
}

GeneratorMatrix perturb_generator(const GeneratorMatrix& q, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0 && eps < 1.0)) throw Error(ErrorKind::OutOfRange, "eps must lie in [0, 1)");
  RandomStream rng(seed, stream_id(StreamPurpose::Perturbation, 0));
  Matrix out = q.rates();
  const auto n = out.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const double u = rng.uniform();
      out(i, j) *= 1.0 + eps * (2.0 * u - 1.0);
      total += out(i, j);
    }
    out(i, i) = -total;
  }
  return GeneratorMatrix(std::move(out), q.states());
}

TiltValidation validate_tilt(const Vector& p, const Vector& f, double eta, std::size_t steps,
                             std::size_t n_paths, std::uint64_t seed, unsigned threads) {
  if (steps == 0 || n_paths < 2) throw Error(ErrorKind::OutOfRange, "need steps >= 1, paths >= 2");
  TiltValidation out;
  out.tilt_c = solve_tilt_level(p, f, eta);
  const Vector tilted = tilted_measure(p, f, out.tilt_c);
  out.exact_gap = tilted.dot(f) - p.dot(f);
  out.xi = xi_infimum(empirical_cgf_lambda(p, f), eta, Sign::Plus).value;

  const CategoricalSampler draw(tilted);
  std::vector<double> averages(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    RandomStream rng(seed, stream_id(StreamPurpose::Validation, i));
    double acc = 0.0;
    for (std::size_t k = 0; k < steps; ++k) acc += f(static_cast<Eigen::Index>(draw(rng)));
    averages[i] = acc / static_cast<double>(steps);
  });
  const MeanEstimate m = estimate_mean(averages);
  out.empirical_gap = m.mean - p.dot(f);
  out.std_error = m.std_error;
  return out;
}

}  // namespace markov_uq
