#include "markov_uq/simulate.hpp"

#include <algorithm>
#include <cmath>

namespace markov_uq {

namespace {

void require_law(const Vector& initial, std::size_t n) {
  if (static_cast<std::size_t>(initial.size()) != n) {
    throw Error(ErrorKind::DimensionMismatch, "initial law length differs from state count");
  }
  if (!initial.allFinite() || initial.minCoeff() < 0.0 || std::abs(initial.sum() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidModel, "initial law is not a probability vector");
  }
}

void require_horizon(double horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw Error(ErrorKind::OutOfRange, "horizon must be positive and finite");
  }
}

}  // namespace

CategoricalSampler::CategoricalSampler(const Vector& p) : cdf_(static_cast<std::size_t>(p.size())) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    acc += p(i);
    cdf_[static_cast<std::size_t>(i)] = acc;
  }
  for (double& c : cdf_) c /= acc;
}

std::size_t CategoricalSampler::operator()(RandomStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
}

JumpSampler::JumpSampler(const GeneratorMatrix& q) {
  const std::size_t n = q.size();
  exit_.resize(n);
  row_start_.resize(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    row_start_[i] = target_.size();
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) total += q(i, j);
    }
    exit_[i] = total;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || q(i, j) <= 0.0) continue;
      acc += q(i, j) / total;
      target_.push_back(j);
      threshold_.push_back(static_cast<std::uint32_t>(
          std::min(4294967295.0, std::floor(acc * 4294967296.0))));
    }
    if (!target_.empty() && target_.size() > row_start_[i]) threshold_.back() = 0xFFFFFFFFu;
  }
  row_start_[n] = target_.size();
}

std::size_t JumpSampler::next_state(std::size_t x, RandomStream& rng) const {
  const std::uint32_t w = rng.engine()();
  std::size_t k = row_start_[x];
  const std::size_t end = row_start_[x + 1] - 1;
  while (k < end && w >= threshold_[k]) ++k;
  return target_[k];
}

double JumpSampler::time_average(const Vector& f, std::size_t x, double horizon,
                                 RandomStream& rng) const {
  double t = 0.0;
  double acc = 0.0;
  for (;;) {
    const double rate = exit_[x];
    if (rate <= 0.0) break;
    const double tau = -std::log(rng.uniform()) / rate;
    if (t + tau >= horizon) break;
    acc += f(static_cast<Eigen::Index>(x)) * tau;
    t += tau;
    x = next_state(x, rng);
  }
  acc += f(static_cast<Eigen::Index>(x)) * (horizon - t);
  return acc / horizon;
}

PathSample JumpSampler::path(std::size_t x, double horizon, RandomStream& rng) const {
  PathSample out;
  out.horizon = horizon;
  out.jump_times.push_back(0.0);
  out.states.push_back(x);
  double t = 0.0;
  for (;;) {
    const double rate = exit_[x];
    if (rate <= 0.0) break;
    const double tau = -std::log(rng.uniform()) / rate;
    if (t + tau >= horizon) break;
    // Guard against tau underflowing to 0 so jump times stay strictly increasing.
    t = std::max(t + tau, std::nextafter(t, horizon));
    x = next_state(x, rng);
    out.jump_times.push_back(t);
    out.states.push_back(x);
  }
  return out;
}

PathSample simulate_ctmc(const GeneratorMatrix& q, const Vector& initial, double horizon,
                         std::uint64_t seed, std::uint64_t path_index) {
  require_law(initial, q.size());
  require_horizon(horizon);
  RandomStream rng(seed, stream_id(StreamPurpose::Ctmc, path_index));
  const std::size_t x0 = CategoricalSampler(initial)(rng);
  return JumpSampler(q).path(x0, horizon, rng);
}

GeneratorMatrix uniformize(const TransitionKernel& p, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw Error(ErrorKind::OutOfRange, "uniformisation rate must be positive");
  }
  Matrix q = rate * p.probabilities();
  const auto n = q.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    q(i, i) = 0.0;
    q(i, i) = -q.row(i).sum();
  }
  return GeneratorMatrix(std::move(q), p.states());
}

PathSample simulate_uniformized_dtmc(const TransitionKernel& p, double rate, const Vector& initial,
                                     double horizon, std::uint64_t seed,
                                     std::uint64_t path_index) {
  require_law(initial, p.size());
  require_horizon(horizon);
  if (!(rate > 0.0)) throw Error(ErrorKind::OutOfRange, "clock rate must be positive");
  const auto n = static_cast<Eigen::Index>(p.size());
  std::vector<CategoricalSampler> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) rows.emplace_back(p.probabilities().row(i).transpose());

  RandomStream rng(seed, stream_id(StreamPurpose::UniformizedDtmc, path_index));
  PathSample out;
  out.horizon = horizon;
  std::size_t x = CategoricalSampler(initial)(rng);
  out.jump_times.push_back(0.0);
  out.states.push_back(x);
  double t = 0.0;
  for (;;) {
    t += -std::log(rng.uniform()) / rate;
    if (t >= horizon) break;
    const std::size_t y = rows[x](rng);
    if (y != x && t > out.jump_times.back()) {
      out.jump_times.push_back(t);
      out.states.push_back(y);
    }
    x = out.states.back();
  }
  return out;
}

double ergodic_average(const PathSample& path, const Vector& f) {
  if (!(path.horizon > 0.0)) throw Error(ErrorKind::OutOfRange, "path horizon must be positive");
  if (path.states.empty() || path.states.size() != path.jump_times.size()) {
    throw Error(ErrorKind::InvalidModel, "malformed path");
  }
  double acc = 0.0;
  for (std::size_t k = 0; k < path.states.size(); ++k) {
    const double end = k + 1 < path.states.size() ? path.jump_times[k + 1] : path.horizon;
    const auto s = static_cast<Eigen::Index>(path.states[k]);
    if (s >= f.size()) throw Error(ErrorKind::DimensionMismatch, "state outside observable");
    acc += f(s) * (end - path.jump_times[k]);
  }
  return acc / path.horizon;
}

double ergodic_average(const PathSample& path, const Observable& f) {
  return ergodic_average(path, f.values);
}

std::vector<double> ctmc_time_averages(const GeneratorMatrix& q, const Vector& initial,
                                       const Vector& f, double horizon, std::size_t n_paths,
                                       std::uint64_t seed, unsigned threads) {
  require_law(initial, q.size());
  require_horizon(horizon);
  if (static_cast<std::size_t>(f.size()) != q.size()) {
    throw Error(ErrorKind::DimensionMismatch, "observable length differs from state count");
  }
  const JumpSampler sampler(q);
  const CategoricalSampler init(initial);
  std::vector<double> out(n_paths);
  parallel_for(n_paths, threads, [&](std::size_t i) {
    RandomStream rng(seed, stream_id(StreamPurpose::Ctmc, i));
    out[i] = sampler.time_average(f, init(rng), horizon, rng);
  });
  return out;
}

void check_blowup(const Vector& x) {
  const double norm = x.norm();
  if (!std::isfinite(norm) || norm > kBlowupCap) {
    throw Error(ErrorKind::SimulationBlowup, "path norm exceeded 1e8");
  }
}

void em_step(const DriftFn& b, Vector& x, double dt, RandomStream& rng) {
  const Vector drift = b(x);
  const double sd = std::sqrt(dt);
  for (Eigen::Index i = 0; i < x.size(); ++i) x(i) += drift(i) * dt + sd * rng.normal();
  check_blowup(x);
}

EmPath simulate_em(const DriftFn& b, const Vector& x0, double dt, std::size_t steps,
                   std::uint64_t seed, std::uint64_t path_index) {
  if (!(dt > 0.0)) throw Error(ErrorKind::OutOfRange, "dt must be positive");
  check_blowup(x0);
  RandomStream rng(seed, stream_id(StreamPurpose::EulerMaruyama, path_index));
  EmPath out;
  out.dt = dt;
  out.points.reserve(steps + 1);
  out.points.push_back(x0);
  Vector x = x0;
  for (std::size_t k = 0; k < steps; ++k) {
    em_step(b, x, dt, rng);
    out.points.push_back(x);
  }
  return out;
}

}  // namespace markov_uq
