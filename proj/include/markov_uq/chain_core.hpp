#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "markov_uq/error.hpp"

namespace markov_uq {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Continuous-time generator Q on a finite state space: nonnegative
/// off-diagonal rates, rows summing to zero.
class GeneratorMatrix {
 public:
  explicit GeneratorMatrix(Matrix q, std::vector<std::string> states = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(q_.rows()); }
  const Matrix& rates() const noexcept { return q_; }
  double operator()(std::size_t i, std::size_t j) const { return q_(i, j); }
  double exit_rate(std::size_t i) const { return -q_(i, i); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  Matrix q_;
  std::vector<std::string> states_;
  std::uint64_t fingerprint_;
};

/// Row-stochastic one-step kernel of a discrete-time chain.
class TransitionKernel {
 public:
  explicit TransitionKernel(Matrix p, std::vector<std::string> states = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(p_.rows()); }
  const Matrix& probabilities() const noexcept { return p_; }
  double operator()(std::size_t i, std::size_t j) const { return p_(i, j); }
  const std::vector<std::string>& states() const noexcept { return states_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

 private:
  Matrix p_;
  std::vector<std::string> states_;
  std::uint64_t fingerprint_;
};

/// Strictly positive probability vector tied to the model it is invariant for.
///
/// Weights are held in log form as well, so that ratios mu_i / mu_j stay
/// representable when individual weights underflow (deep tails of truncated
/// birth-death chains).
class StationaryMeasure {
 public:
  /// Validates positivity and normalisation (1e-12).
  StationaryMeasure(Vector weights, std::uint64_t model_fingerprint);

  /// Normalises exp(log_weights) with a log-sum-exp shift.
  static StationaryMeasure from_log_weights(const Vector& log_weights,
                                            std::uint64_t model_fingerprint);

  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  const Vector& weights() const noexcept { return weights_; }
  const Vector& log_weights() const noexcept { return log_weights_; }
  double operator[](std::size_t i) const { return weights_(i); }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }

  /// mu_i / mu_j, evaluated through the log weights.
  double ratio(std::size_t i, std::size_t j) const;

  double expectation(const Vector& f) const;
  double variance(const Vector& f) const;

 private:
  StationaryMeasure() = default;

  Vector weights_;
  Vector log_weights_;
  std::uint64_t fingerprint_ = 0;
};

/// Observable together with its centred form under a stationary measure.
struct Observable {
  Vector values;
  Vector centered;
  double mean = 0.0;
  double variance = 0.0;
  double pos_sup = 0.0;  // max(centered, 0) max-entry
  double neg_sup = 0.0;  // max(-centered, 0) max-entry
  std::uint64_t measure_fingerprint = 0;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.size()); }
};

/// Stationary law of an irreducible chain. Residual ||mu Q||_inf <= 1e-10.
StationaryMeasure invariant_measure(const GeneratorMatrix& q);
StationaryMeasure invariant_measure(const TransitionKernel& p);

/// ||mu Q||_inf, resp. ||mu P - mu||_inf.
double stationarity_residual(const GeneratorMatrix& q, const StationaryMeasure& mu);
double stationarity_residual(const TransitionKernel& p, const StationaryMeasure& mu);

/// Re-tags a measure for another model after checking the stationarity residual
/// (used after uniformisation, which preserves invariant laws).
StationaryMeasure rebind(const StationaryMeasure& mu, const GeneratorMatrix& q,
                         double tolerance = 1e-10);

/// Additive symmetrisation (A + A*) / 2 with A* the L2(mu) adjoint.
GeneratorMatrix symmetrize(const GeneratorMatrix& a, const StationaryMeasure& mu);

/// D^{1/2} M D^{-1/2} with D = diag(mu); plain symmetric when M is mu-self-adjoint.
Matrix similarity_transform(const Matrix& m, const StationaryMeasure& mu);

/// Max deviation |A_ij - A*_ij| relative to the largest rate.
double adjoint_defect(const GeneratorMatrix& a, const StationaryMeasure& mu);
bool is_reversible(const GeneratorMatrix& a, const StationaryMeasure& mu,
                   double tolerance = 1e-10);

Observable center_observable(const Vector& f, const StationaryMeasure& mu);

double weighted_inner(const Vector& g, const Vector& h, const StationaryMeasure& mu);

/// Throws MeasureMismatch unless mu was computed for the model with this fingerprint.
void require_match(const StationaryMeasure& mu, std::uint64_t model_fingerprint,
                   const char* context);

}  // namespace markov_uq
