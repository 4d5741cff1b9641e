#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include "markov_uq/chain_core.hpp"
#include "markov_uq/rng.hpp"

namespace markov_uq {

using DriftFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;
using ScalarFn = std::function<double(const Vector&)>;
using InitialSampler = std::function<Vector(RandomStream&)>;

/// dX = b(X) dt + dW with identity noise on R^n.
struct SdeModel {
  int dimension = 1;
  DriftFn drift;
  JacobianFn jacobian;                       // optional
  ScalarFn potential;                        // optional, V with b = -grad V
  std::optional<double> hessian_lower_bound;  // m with D^2 V >= m I
  std::string name;
};

/// Euler-Maruyama discretisation: T = steps * dt.
struct EmScheme {
  double dt = 1e-2;
  std::size_t steps = 100;

  double horizon() const { return dt * static_cast<double>(steps); }
};

/// Paths whose norm exceeds this are reported as SimulationBlowup.
inline constexpr double kBlowupCap = 1e8;

/// Samples a vector of independent N(0, variance) coordinates.
inline InitialSampler gaussian_sampler(int dimension, double variance) {
  return [dimension, sd = std::sqrt(variance)](RandomStream& rng) {
    Vector x(dimension);
    for (int i = 0; i < dimension; ++i) x(i) = sd * rng.normal();
    return x;
  };
}

}  // namespace markov_uq
