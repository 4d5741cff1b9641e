#include "markov_uq/zoo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>

namespace markov_uq {

namespace {

constexpr int kMaxHypercubeDim = 12;         // 4096 states, dense storage
constexpr std::size_t kMaxExclusionStates = 5000;

// log P(X > n_max) for X ~ Poisson(m).
double log_poisson_tail(double m, std::size_t n_max) {
  const double log_m = std::log(m);
  double log_sum = -kInfinity;
  for (std::size_t n = n_max + 1;; ++n) {
    const double lt = -m + static_cast<double>(n) * log_m - std::lgamma(static_cast<double>(n) + 1.0);
    const double hi = std::max(log_sum, lt);
    log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(lt - hi));
    if (static_cast<double>(n) > m && lt < log_sum - 40.0) break;
  }
  return log_sum;
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t out = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    out = out * (n - k + i) / i;
    if (out > (1ULL << 40)) return out;
  }
  return out;
}

bool connected(const Graph& g) {
  std::vector<bool> seen(g.n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t count = 1;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : g.adjacency[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        queue.push_back(w);
      }
    }
  }
  return count == g.n;
}

}  // namespace

LiapunovData MmInftyModel::liapunov(double kbar, double delta) const {
  if (!(kbar > 1.0) || !(delta > 0.0)) {
    throw Error(ErrorKind::OutOfRange, "Liapunov data needs kbar > 1 and delta > 0");
  }
  const auto n = static_cast<Eigen::Index>(n_max + 1);
  LiapunovData out;
  out.u.resize(n);
  out.phi.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.u(k) = std::pow(kbar, static_cast<double>(k));
    out.phi(k) = rho * static_cast<double>(k) * (1.0 - 1.0 / kbar) + delta;
  }
  out.b = lam * (kbar - 1.0) + delta;
  return out;
}

Vector MmInftyModel::counting() const {
  return Vector::LinSpaced(static_cast<Eigen::Index>(n_max + 1), 0.0, static_cast<double>(n_max));
}

std::size_t mminfty_min_truncation(double lam, double rho, double mass_tol) {
  if (!(lam > 0.0) || !(rho > 0.0) || !(mass_tol > 0.0)) {
    throw Error(ErrorKind::InvalidModel, "M/M/inf needs lam, rho, mass_tol > 0");
  }
  const double m = lam / rho;
  std::size_t n = std::max<std::size_t>(1, static_cast<std::size_t>(m));
  while (log_poisson_tail(m, n) >= std::log(mass_tol)) ++n;
  return n;
}

MmInftyModel mminfty_generator(double lam, double rho, std::size_t n_max, double mass_tol) {
  if (!(lam > 0.0) || !(rho > 0.0) || !std::isfinite(lam) || !std::isfinite(rho)) {
    throw Error(ErrorKind::InvalidModel, "M/M/inf rates must be positive and finite");
  }
  if (n_max < 1) throw Error(ErrorKind::TruncationTooSmall, "need at least two states");
  const double m = lam / rho;
  const double log_tail = log_poisson_tail(m, n_max);
  if (log_tail >= std::log(mass_tol)) {
    throw Error(ErrorKind::TruncationTooSmall,
                "Poisson tail beyond N = " + std::to_string(n_max) + " is " +
                    std::to_string(std::exp(log_tail)) + ", need N >= " +
                    std::to_string(mminfty_min_truncation(lam, rho, mass_tol)));
  }
  const auto n = static_cast<Eigen::Index>(n_max + 1);
  Matrix q = Matrix::Zero(n, n);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    if (k + 1 < n) q(k, k + 1) = lam;
    if (k > 0) q(k, k - 1) = rho * static_cast<double>(k);
    q(k, k) = -(q.row(k).sum());
    labels.push_back(std::to_string(k));
  }
  GeneratorMatrix gen(std::move(q), std::move(labels));

  Vector log_w(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    log_w(k) = static_cast<double>(k) * std::log(m) - std::lgamma(static_cast<double>(k) + 1.0);
  }
  StationaryMeasure mu = StationaryMeasure::from_log_weights(log_w, gen.fingerprint());

  MmInftyPack pack;
  pack.alpha = 1.0 / rho;
  pack.sigma2_n = 2.0 * lam / (rho * rho);
  pack.lambda_exact = [lam, rho](double c) {
    if (c >= rho) return kInfinity;
    return lam * c * c / (rho * rho * (1.0 - c / rho));
  };
  return MmInftyModel{std::move(gen), std::move(mu), std::move(pack), lam, rho, n_max};
}

Vector HypercubeModel::weight() const {
  const auto n = static_cast<Eigen::Index>(p.size());
  Vector out(n);
  for (Eigen::Index x = 0; x < n; ++x) out(x) = std::popcount(static_cast<unsigned>(x));
  return out;
}

HypercubeModel hypercube_kernel(int d) {
  if (d < 1) throw Error(ErrorKind::OutOfRange, "hypercube dimension must be at least 1");
  if (d > kMaxHypercubeDim) {
    throw Error(ErrorKind::DimensionTooLarge,
                "hypercube dimension " + std::to_string(d) + " exceeds the dense limit " +
                    std::to_string(kMaxHypercubeDim));
  }
  const Eigen::Index n = Eigen::Index{1} << d;
  Matrix p = Matrix::Zero(n, n);
  std::vector<std::string> labels;
  labels.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index x = 0; x < n; ++x) {
    p(x, x) = 0.5;
    for (int i = 0; i < d; ++i) p(x, x ^ (Eigen::Index{1} << i)) = 0.5 / d;
    std::string label(static_cast<std::size_t>(d), '0');
    for (int i = 0; i < d; ++i) {
      if ((x >> i) & 1) label[static_cast<std::size_t>(d - 1 - i)] = '1';
    }
    labels.push_back(std::move(label));
  }
  TransitionKernel kernel(std::move(p), std::move(labels));
  StationaryMeasure mu(Vector::Constant(n, 1.0 / static_cast<double>(n)), kernel.fingerprint());
  return HypercubeModel{std::move(kernel), std::move(mu), static_cast<double>(d), d};
}

Graph Graph::from_edges(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                        std::string name) {
  if (n < 2) throw Error(ErrorKind::InvalidModel, "graph needs at least two vertices");
  Graph g;
  g.n = n;
  g.name = std::move(name);
  g.adjacency.assign(n, {});
  for (const auto& [u, v] : edges) {
    if (u >= n || v >= n) throw Error(ErrorKind::InvalidModel, "edge endpoint out of range");
    if (u == v) throw Error(ErrorKind::InvalidModel, "self-loops are not allowed");
    g.adjacency[u].push_back(v);
    g.adjacency[v].push_back(u);
  }
  for (auto& nb : g.adjacency) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

Graph Graph::cycle(std::size_t n) {
  if (n < 3) throw Error(ErrorKind::InvalidModel, "cycle needs at least three vertices");
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return from_edges(n, e, "cycle-" + std::to_string(n));
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return from_edges(n, e, "complete-" + std::to_string(n));
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return from_edges(n, e, "path-" + std::to_string(n));
}

std::size_t canonical_path_congestion(const Graph& g) {
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> load;
  for (std::size_t x = 0; x < g.n; ++x) {
    std::vector<std::size_t> parent(g.n, g.n);
    std::deque<std::size_t> queue{x};
    parent[x] = x;
    while (!queue.empty()) {
      const std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w : g.adjacency[v]) {
        if (parent[w] == g.n) {
          parent[w] = v;
          queue.push_back(w);
        }
      }
    }
    for (std::size_t y = 0; y < g.n; ++y) {
      if (y == x) continue;
      if (parent[y] == g.n) throw Error(ErrorKind::Disconnected, "graph is not connected");
      for (std::size_t v = y; v != x; v = parent[v]) {
        ++load[{std::min(v, parent[v]), std::max(v, parent[v])}];
      }
    }
  }
  std::size_t worst = 0;
  for (const auto& [edge, count] : load) worst = std::max(worst, count);
  return worst;
}

Vector ExclusionModel::occupation(std::size_t v) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(subsets.size()));
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    if (std::binary_search(subsets[s].begin(), subsets[s].end(), v)) {
      out(static_cast<Eigen::Index>(s)) = 1.0;
    }
  }
  return out;
}

ExclusionModel exclusion_chain(const ExclusionSpec& spec) {
  const Graph& g = spec.graph;
  const std::size_t n = g.n;
  if (n < 2 || g.adjacency.size() != n) throw Error(ErrorKind::InvalidModel, "malformed graph");
  if (spec.r < 1 || spec.r >= n) {
    throw Error(ErrorKind::OutOfRange, "need 1 <= r < n for at least two configurations");
  }
  if (!connected(g)) throw Error(ErrorKind::Disconnected, "graph is not connected");
  const std::uint64_t count = binomial(n, spec.r);
  if (count > kMaxExclusionStates) {
    throw Error(ErrorKind::StateSpaceTooLarge,
                "C(" + std::to_string(n) + ", " + std::to_string(spec.r) + ") = " +
                    std::to_string(count) + " exceeds " + std::to_string(kMaxExclusionStates));
  }

  // Lexicographic enumeration of r-subsets.
  std::vector<std::vector<std::size_t>> subsets;
  std::vector<std::size_t> cur(spec.r);
  for (std::size_t i = 0; i < spec.r; ++i) cur[i] = i;
  for (;;) {
    subsets.push_back(cur);
    std::size_t i = spec.r;
    while (i > 0 && cur[i - 1] == n - spec.r + i - 1) --i;
    if (i == 0) break;
    ++cur[i - 1];
    for (std::size_t j = i; j < spec.r; ++j) cur[j] = cur[j - 1] + 1;
  }
  std::map<std::vector<std::size_t>, std::size_t> index;
  for (std::size_t s = 0; s < subsets.size(); ++s) index[subsets[s]] = s;

  const auto m = static_cast<Eigen::Index>(subsets.size());
  Matrix p = Matrix::Zero(m, m);
  std::vector<std::string> labels;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    const auto& a = subsets[s];
    double total_degree = 0.0;
    for (std::size_t x : a) total_degree += static_cast<double>(g.degree(x));
    std::string label = "{";
    for (std::size_t k = 0; k < a.size(); ++k) label += (k ? "," : "") + std::to_string(a[k]);
    labels.push_back(label + "}");
    double moved = 0.0;
    for (std::size_t x : a) {
      for (std::size_t y : g.adjacency[x]) {
        if (std::binary_search(a.begin(), a.end(), y)) continue;
        std::vector<std::size_t> b = a;
        *std::find(b.begin(), b.end(), x) = y;
        std::sort(b.begin(), b.end());
        // P(pick x) = deg(x) / total, P(pick y | x) = 1 / deg(x).
        const double prob = 1.0 / total_degree;
        p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(index.at(b))) += prob;
        moved += prob;
      }
    }
    p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0 - moved;
  }
  TransitionKernel kernel(std::move(p), std::move(labels));
  StationaryMeasure mu = invariant_measure(kernel);

  ExclusionConstants derived;
  std::vector<std::size_t> degrees(n);
  for (std::size_t v = 0; v < n; ++v) degrees[v] = g.degree(v);
  std::sort(degrees.rbegin(), degrees.rend());
  derived.d0 = degrees.front();
  double top = 0.0;
  for (std::size_t i = 0; i < spec.r; ++i) top += static_cast<double>(degrees[i]);
  derived.d_r = top / static_cast<double>(spec.r);
  derived.delta0 = canonical_path_congestion(g);
  const double nn = static_cast<double>(n);
  const double base = static_cast<double>(spec.r) * derived.d_r * static_cast<double>(derived.delta0) / nn;
  derived.alpha = base;
  derived.beta = 3.0 * base * std::log(nn);

  FunctionalConstants constants;
  constants.poincare_alpha = derived.alpha;
  constants.log_sobolev_beta = derived.beta;
  // Detailed balance holds on regular graphs; irregular ones are checked.
  constants.reversible = true;
  for (Eigen::Index i = 0; i < m && constants.reversible; ++i) {
    for (Eigen::Index j = i + 1; j < m; ++j) {
      const double flow = mu[i] * kernel(i, j);
      if (std::abs(flow - mu[j] * kernel(j, i)) > 1e-12 * std::max(flow, 1e-300)) {
        constants.reversible = false;
        break;
      }
    }
  }
  constants.provenance = "analytic";
  return ExclusionModel{std::move(kernel), std::move(mu), constants, derived, std::move(subsets)};
}

LangevinModel langevin_model(int dimension, ScalarFn v, DriftFn grad_v, JacobianFn hess_v,
                             double hessian_lb) {
  if (dimension < 1) throw Error(ErrorKind::OutOfRange, "dimension must be at least 1");
  if (!grad_v) throw Error(ErrorKind::InvalidModel, "Langevin model needs grad V");
  LangevinModel out;
  out.sde.dimension = dimension;
  out.sde.name = "langevin";
  out.sde.potential = std::move(v);
  out.sde.drift = [g = grad_v](const Vector& x) -> Vector { return -g(x); };
  if (hess_v) {
    out.sde.jacobian = [h = std::move(hess_v)](const Vector& x) -> Matrix { return -h(x); };
  }
  if (hessian_lb > 0.0) {
    out.sde.hessian_lower_bound = hessian_lb;
    out.poincare = hessian_constants(hessian_lb, HessianConvention::Poincare);
    out.log_sobolev = hessian_constants(hessian_lb, HessianConvention::LogSobolev);
  }
  return out;
}

LangevinModel langevin_quadratic(int dimension) {
  LangevinModel out = langevin_model(
      dimension, [](const Vector& x) { return 0.5 * x.squaredNorm(); },
      [](const Vector& x) -> Vector { return x; },
      [dimension](const Vector&) -> Matrix { return Matrix::Identity(dimension, dimension); }, 1.0);
  out.sde.name = "langevin:V=quadratic";
  return out;
}

GeneratorMatrix two_state(double a, double b) {
  Matrix q(2, 2);
  q << -a, a, b, -b;
  return GeneratorMatrix(std::move(q));
}

}  // namespace markov_uq
