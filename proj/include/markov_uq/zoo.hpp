#pragma once

#include <functional>
#include <string>
#include <vector>

#include "markov_uq/chain_core.hpp"
#include "markov_uq/sde.hpp"
#include "markov_uq/spectral.hpp"

namespace markov_uq {

/// Analytic constants of the truncated M/M/infinity queue (counting observable f(n) = n).
struct MmInftyPack {
  double alpha = 0.0;
  double sigma2_n = 0.0;                     // asymptotic variance of f(n) = n
  std::function<double(double)> lambda_exact;  // c -> lam c^2 / (rho^2 (1 - c / rho))
};

struct MmInftyModel {
  GeneratorMatrix q;
  StationaryMeasure mu;
  MmInftyPack pack;
  double lam = 0.0;
  double rho = 0.0;
  std::size_t n_max = 0;

  /// U(n) = kbar^n, phi(n) = rho n (1 - 1/kbar) + delta, b = lam (kbar - 1) + delta.
  /// delta > 0 keeps phi strictly positive at n = 0.
  LiapunovData liapunov(double kbar, double delta = 1.0) const;
  Vector counting() const;
};

/// Birth-death chain on {0..n_max}: birth lam (zeroed at n_max), death rho n.
/// Throws TruncationTooSmall when the Poisson(lam/rho) tail beyond n_max is >= mass_tol.
MmInftyModel mminfty_generator(double lam, double rho, std::size_t n_max, double mass_tol = 1e-12);

/// Smallest n_max whose Poisson(lam/rho) tail mass is below mass_tol.
std::size_t mminfty_min_truncation(double lam, double rho, double mass_tol = 1e-12);

struct HypercubeModel {
  TransitionKernel p;
  StationaryMeasure mu;
  double alpha = 0.0;  // analytic Poincare constant of P - I
  int d = 0;

  /// Number of ones in each state.
  Vector weight() const;
};

/// Lazy walk on {0,1}^d: pick a coordinate uniformly, then a uniform value for it.
HypercubeModel hypercube_kernel(int d);

struct Graph {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> adjacency;  // sorted neighbour lists
  std::string name;

  static Graph from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                          std::string name = "");
  static Graph cycle(std::size_t n);
  static Graph complete(std::size_t n);
  static Graph path(std::size_t n);
  std::size_t degree(std::size_t v) const { return adjacency[v].size(); }
};

struct ExclusionSpec {
  Graph graph;
  std::size_t r = 1;
};

/// Derived exclusion-chain quantities.
struct ExclusionConstants {
  std::size_t d0 = 0;     // max degree
  double d_r = 0.0;       // mean of the r largest degrees
  std::size_t delta0 = 0;  // max over edges of canonical paths through it
  double alpha = 0.0;     // r d_r delta0 / n
  double beta = 0.0;      // 3 r d_r delta0 log(n) / n
};

struct ExclusionModel {
  TransitionKernel p;
  StationaryMeasure mu;
  FunctionalConstants constants;
  ExclusionConstants derived;
  std::vector<std::vector<std::size_t>> subsets;  // state index -> occupied vertices

  /// Indicator that vertex v is occupied.
  Vector occupation(std::size_t v) const;
};

/// Shortest paths between every ordered pair of distinct vertices, found by BFS
/// that expands neighbours in increasing order; returns the maximum number of
/// paths crossing any undirected edge.
std::size_t canonical_path_congestion(const Graph& g);

ExclusionModel exclusion_chain(const ExclusionSpec& spec);

struct LangevinModel {
  SdeModel sde;
  std::optional<FunctionalConstants> poincare;
  std::optional<FunctionalConstants> log_sobolev;
};

/// dX = -grad V(X) dt + dW. Constants from the Hessian lower bound when positive.
LangevinModel langevin_model(int dimension, ScalarFn v, DriftFn grad_v, JacobianFn hess_v,
                             double hessian_lb);

/// V(x) = |x|^2 / 2 on R^n.
LangevinModel langevin_quadratic(int dimension);

/// Two-state generator [[-a, a], [b, -b]].
GeneratorMatrix two_state(double a, double b);

}  // namespace markov_uq
