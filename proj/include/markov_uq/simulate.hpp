#pragma once

#include <cstdint>
#include <vector>

#include "markov_uq/chain_core.hpp"
#include "markov_uq/parallel.hpp"
#include "markov_uq/rng.hpp"
#include "markov_uq/sde.hpp"

namespace markov_uq {

/// Piecewise-constant path on [0, horizon]: states[k] holds on
/// [jump_times[k], jump_times[k+1]), the last one up to the horizon.
/// jump_times[0] = 0 carries the initial state.
struct PathSample {
  std::vector<double> jump_times;
  std::vector<std::size_t> states;
  double horizon = 0.0;
};

/// Inverse-CDF sampler for a finite law, using a 53-bit uniform.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(const Vector& p);
  std::size_t operator()(RandomStream& rng) const;

 private:
  std::vector<double> cdf_;
};

/// Precomputed jump tables for Gillespie simulation of a generator. Holding
/// times use one 53-bit uniform, the destination one 32-bit word.
class JumpSampler {
 public:
  explicit JumpSampler(const GeneratorMatrix& q);

  std::size_t size() const noexcept { return exit_.size(); }

  /// (1/horizon) * integral of f along one path started at x0, without storing it.
  double time_average(const Vector& f, std::size_t x0, double horizon, RandomStream& rng) const;

  PathSample path(std::size_t x0, double horizon, RandomStream& rng) const;

 private:
  std::size_t next_state(std::size_t x, RandomStream& rng) const;

  std::vector<double> exit_;
  std::vector<std::size_t> row_start_;
  std::vector<std::size_t> target_;
  std::vector<std::uint32_t> threshold_;  // cumulative jump probability scaled to 2^32
};

/// Gillespie path: exponential holding, jump by the normalised off-diagonal row.
/// States with zero exit rate hold until the horizon.
PathSample simulate_ctmc(const GeneratorMatrix& q, const Vector& initial, double horizon,
                         std::uint64_t seed, std::uint64_t path_index = 0);

/// Q = rate (P - I); invariant laws of P and Q coincide.
GeneratorMatrix uniformize(const TransitionKernel& p, double rate);

/// Steps P at the epochs of a rate-`rate` Poisson clock. Self-loops leave the
/// path unchanged and are not recorded.
PathSample simulate_uniformized_dtmc(const TransitionKernel& p, double rate, const Vector& initial,
                                     double horizon, std::uint64_t seed,
                                     std::uint64_t path_index = 0);

/// Exact (1/T) * integral of f over the path.
double ergodic_average(const PathSample& path, const Vector& f);
double ergodic_average(const PathSample& path, const Observable& f);

/// Time averages of n_paths independent paths with initial law `initial`.
/// Path i uses stream (Ctmc, i) under `seed`.
std::vector<double> ctmc_time_averages(const GeneratorMatrix& q, const Vector& initial,
                                       const Vector& f, double horizon, std::size_t n_paths,
                                       std::uint64_t seed, unsigned threads = 0);

struct EmPath {
  double dt = 0.0;
  std::vector<Vector> points;  // steps + 1 iterates, points[0] = x0
};

/// x_{k+1} = x_k + b(x_k) dt + sqrt(dt) Z_k. Throws SimulationBlowup past kBlowupCap.
EmPath simulate_em(const DriftFn& b, const Vector& x0, double dt, std::size_t steps,
                   std::uint64_t seed, std::uint64_t path_index = 0);

/// One EM step in place, drawing from rng.
void em_step(const DriftFn& b, Vector& x, double dt, RandomStream& rng);

/// Throws SimulationBlowup when |x| exceeds the cap or is not finite.
void check_blowup(const Vector& x);

}  // namespace markov_uq
