#include "markov_uq/chain_core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

namespace markov_uq {

namespace {

constexpr double kRowSumTolerance = 1e-12;
constexpr double kResidualTolerance = 1e-10;

std::uint64_t fnv1a(std::uint64_t hash, const void* data, std::size_t bytes) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < bytes; ++i) {
    hash ^= p[i];
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::uint64_t matrix_fingerprint(char kind, const Matrix& m) {
  std::uint64_t h = 14695981039346656037ULL;
  h = fnv1a(h, &kind, 1);
  const auto n = static_cast<std::uint64_t>(m.rows());
  h = fnv1a(h, &n, sizeof n);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      double v = m(i, j);
      if (v == 0.0) v = 0.0;  // fold -0.0
      h = fnv1a(h, &v, sizeof v);
    }
  }
  return h;
}

std::vector<std::string> default_labels(std::vector<std::string> states, std::size_t n) {
  if (states.empty()) {
    states.reserve(n);
    for (std::size_t i = 0; i < n; ++i) states.push_back(std::to_string(i));
  }
  if (states.size() != n) {
    throw Error(ErrorKind::DimensionMismatch,
                "got " + std::to_string(states.size()) + " state labels for " +
                    std::to_string(n) + " states");
  }
  return states;
}

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw Error(ErrorKind::InvalidModel, std::string(what) + " must be square");
  }
  if (m.rows() < 2) {
    throw Error(ErrorKind::InvalidModel, std::string(what) + " needs at least 2 states");
  }
  if (!m.allFinite()) {
    throw Error(ErrorKind::InvalidModel, std::string(what) + " has non-finite entries");
  }
}

// Communicating-class structure of the transition graph (edge i->j iff the
// off-diagonal entry is positive). Tarjan's algorithm, iterative.
struct ClassStructure {
  std::size_t closed_classes = 0;
  std::size_t states_in_closed = 0;
  std::size_t n = 0;
};

ClassStructure class_structure(const Matrix& m) {
  const auto n = static_cast<std::size_t>(m.rows());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  int counter = 0;
  int n_comp = 0;

  struct Frame {
    std::size_t v;
    std::size_t next;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& fr = call.back();
      const std::size_t v = fr.v;
      bool descended = false;
      while (fr.next < n) {
        const std::size_t w = fr.next++;
        if (w == v || !(m(v, w) > 0.0)) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        while (true) {
          const std::size_t w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = n_comp;
          if (w == v) break;
        }
        ++n_comp;
      }
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }

  std::vector<char> leaves(static_cast<std::size_t>(n_comp), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && m(i, j) > 0.0 && comp[i] != comp[j]) leaves[comp[i]] = 1;
    }
  }
  ClassStructure out;
  out.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (!leaves[comp[i]]) ++out.states_in_closed;
  }
  for (int c = 0; c < n_comp; ++c) {
    if (!leaves[c]) ++out.closed_classes;
  }
  return out;
}

// Grassmann-Taksar-Heyman elimination on the off-diagonal part of a rate or
// stochastic matrix. Subtraction free, so small weights keep full relative
// accuracy. Requires irreducibility (all pivots positive).
Vector gth_stationary(const Matrix& m) {
  const auto n = m.rows();
  Matrix a = m;
  for (Eigen::Index k = n - 1; k >= 1; --k) {
    double pivot = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) pivot += a(k, j);
    if (!(pivot > 0.0)) {
      throw Error(ErrorKind::Reducible, "zero pivot during elimination at state " +
                                            std::to_string(k));
    }
    for (Eigen::Index i = 0; i < k; ++i) a(i, k) /= pivot;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (Eigen::Index j = 0; j < k; ++j) {
        if (i != j) a(i, j) += aik * a(k, j);
      }
    }
  }
  Vector pi(n);
  pi(0) = 1.0;
  for (Eigen::Index k = 1; k < n; ++k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) s += pi(i) * a(i, k);
    pi(k) = s;
  }
  return pi / pi.sum();
}

StationaryMeasure solve_stationary(const Matrix& m, std::uint64_t fingerprint) {
  const ClassStructure cls = class_structure(m);
  if (cls.closed_classes > 1) {
    throw Error(ErrorKind::Reducible,
                std::to_string(cls.closed_classes) + " closed communicating classes");
  }
  if (cls.states_in_closed != cls.n) {
    throw Error(ErrorKind::NonPositive, std::to_string(cls.n - cls.states_in_closed) +
                                            " transient states carry zero stationary weight");
  }
  Vector pi = gth_stationary(m);
  for (Eigen::Index i = 0; i < pi.size(); ++i) {
    if (!(pi(i) > 0.0) || !std::isfinite(pi(i))) {
      throw Error(ErrorKind::NonPositive, "stationary weight of state " + std::to_string(i) +
                                              " underflows");
    }
  }
  return StationaryMeasure(std::move(pi), fingerprint);
}

}  // namespace

GeneratorMatrix::GeneratorMatrix(Matrix q, std::vector<std::string> states) : q_(std::move(q)) {
  check_square(q_, "generator");
  const auto n = q_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    double scale = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && q_(i, j) < 0.0) {
        std::ostringstream msg;
        msg << "negative off-diagonal rate q(" << i << "," << j << ") = " << q_(i, j);
        throw Error(ErrorKind::InvalidModel, msg.str());
      }
      row_sum += q_(i, j);
      scale += std::abs(q_(i, j));
    }
    if (std::abs(row_sum) > kRowSumTolerance * std::max(1.0, scale)) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << row_sum << ", expected 0";
      throw Error(ErrorKind::InvalidModel, msg.str());
    }
  }
  states_ = default_labels(std::move(states), static_cast<std::size_t>(n));
  fingerprint_ = matrix_fingerprint('Q', q_);
}

TransitionKernel::TransitionKernel(Matrix p, std::vector<std::string> states) : p_(std::move(p)) {
  check_square(p_, "transition kernel");
  const auto n = p_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (p_(i, j) < 0.0 || p_(i, j) > 1.0) {
        std::ostringstream msg;
        msg << "probability p(" << i << "," << j << ") = " << p_(i, j) << " outside [0,1]";
        throw Error(ErrorKind::InvalidModel, msg.str());
      }
      row_sum += p_(i, j);
    }
    if (std::abs(row_sum - 1.0) > kRowSumTolerance) {
      std::ostringstream msg;
      msg << "row " << i << " sums to " << row_sum << ", expected 1";
      throw Error(ErrorKind::InvalidModel, msg.str());
    }
  }
  states_ = default_labels(std::move(states), static_cast<std::size_t>(n));
  fingerprint_ = matrix_fingerprint('P', p_);
}

StationaryMeasure::StationaryMeasure(Vector weights, std::uint64_t model_fingerprint)
    : weights_(std::move(weights)), fingerprint_(model_fingerprint) {
  if (weights_.size() < 2) {
    throw Error(ErrorKind::InvalidModel, "stationary measure needs at least 2 states");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_(i) > 0.0) || !std::isfinite(weights_(i))) {
      throw Error(ErrorKind::NonPositive, "weight of state " + std::to_string(i) + " is " +
                                              std::to_string(weights_(i)));
    }
  }
  if (std::abs(weights_.sum() - 1.0) > kRowSumTolerance) {
    throw Error(ErrorKind::InvalidModel, "weights do not sum to 1");
  }
  log_weights_ = weights_.array().log().matrix();
}

StationaryMeasure StationaryMeasure::from_log_weights(const Vector& log_weights,
                                                      std::uint64_t model_fingerprint) {
  if (log_weights.size() < 2) {
    throw Error(ErrorKind::InvalidModel, "stationary measure needs at least 2 states");
  }
  if (!log_weights.allFinite()) {
    throw Error(ErrorKind::NonPositive, "log weights must be finite");
  }
  const double shift = log_weights.maxCoeff();
  const double log_norm = shift + std::log((log_weights.array() - shift).exp().sum());
  StationaryMeasure mu;
  mu.log_weights_ = (log_weights.array() - log_norm).matrix();
  mu.weights_ = mu.log_weights_.array().exp().matrix();
  mu.fingerprint_ = model_fingerprint;
  return mu;
}

double StationaryMeasure::ratio(std::size_t i, std::size_t j) const {
  return std::exp(log_weights_(i) - log_weights_(j));
}

double StationaryMeasure::expectation(const Vector& f) const {
  if (f.size() != weights_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "observable length does not match state count");
  }
  return weights_.dot(f);
}

double StationaryMeasure::variance(const Vector& f) const {
  const double m = expectation(f);
  return weights_.dot((f.array() - m).square().matrix());
}

StationaryMeasure invariant_measure(const GeneratorMatrix& q) {
  StationaryMeasure mu = solve_stationary(q.rates(), q.fingerprint());
  const double residual = stationarity_residual(q, mu);
  if (residual > kResidualTolerance) {
    throw Error(ErrorKind::NotInvariant,
                "stationarity residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return mu;
}

StationaryMeasure invariant_measure(const TransitionKernel& p) {
  StationaryMeasure mu = solve_stationary(p.probabilities(), p.fingerprint());
  const double residual = stationarity_residual(p, mu);
  if (residual > kResidualTolerance) {
    throw Error(ErrorKind::NotInvariant,
                "stationarity residual " + std::to_string(residual) + " exceeds 1e-10");
  }
  return mu;
}

double stationarity_residual(const GeneratorMatrix& q, const StationaryMeasure& mu) {
  if (mu.size() != q.size()) {
    throw Error(ErrorKind::DimensionMismatch, "measure and generator sizes differ");
  }
  return (mu.weights().transpose() * q.rates()).cwiseAbs().maxCoeff();
}

double stationarity_residual(const TransitionKernel& p, const StationaryMeasure& mu) {
  if (mu.size() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "measure and kernel sizes differ");
  }
  return (mu.weights().transpose() * p.probabilities() - mu.weights().transpose())
      .cwiseAbs()
      .maxCoeff();
}

StationaryMeasure rebind(const StationaryMeasure& mu, const GeneratorMatrix& q,
                         double tolerance) {
  const double residual = stationarity_residual(q, mu);
  if (residual > tolerance) {
    throw Error(ErrorKind::NotInvariant,
                "measure is not invariant for the target generator (residual " +
                    std::to_string(residual) + ")");
  }
  return StationaryMeasure::from_log_weights(mu.log_weights(), q.fingerprint());
}

void require_match(const StationaryMeasure& mu, std::uint64_t model_fingerprint,
                   const char* context) {
  if (mu.fingerprint() != model_fingerprint) {
    throw Error(ErrorKind::MeasureMismatch,
                std::string(context) + ": stationary measure belongs to a different model");
  }
}

GeneratorMatrix symmetrize(const GeneratorMatrix& a, const StationaryMeasure& mu) {
  require_match(mu, a.fingerprint(), "symmetrize");
  const auto n = static_cast<Eigen::Index>(a.size());
  Matrix s = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      // adjoint entry mu_j A_ji / mu_i
      const double adj = a(j, i) == 0.0 ? 0.0 : mu.ratio(j, i) * a(j, i);
      s(i, j) = 0.5 * (a(i, j) + adj);
    }
    s(i, i) = -s.row(i).sum();
  }
  return GeneratorMatrix(std::move(s), a.states());
}

Matrix similarity_transform(const Matrix& m, const StationaryMeasure& mu) {
  const auto n = m.rows();
  Matrix out(n, n);
  const Vector& lw = mu.log_weights();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = (i == j || m(i, j) == 0.0)
                      ? m(i, j)
                      : std::exp(0.5 * (lw(i) - lw(j))) * m(i, j);
    }
  }
  return out;
}

double adjoint_defect(const GeneratorMatrix& a, const StationaryMeasure& mu) {
  require_match(mu, a.fingerprint(), "adjoint_defect");
  const auto n = static_cast<Eigen::Index>(a.size());
  const double scale = std::max(1.0, a.rates().cwiseAbs().maxCoeff());
  double worst = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double adj = a(j, i) == 0.0 ? 0.0 : mu.ratio(j, i) * a(j, i);
      worst = std::max(worst, std::abs(a(i, j) - adj));
    }
  }
  return worst / scale;
}

bool is_reversible(const GeneratorMatrix& a, const StationaryMeasure& mu, double tolerance) {
  return adjoint_defect(a, mu) <= tolerance;
}

Observable center_observable(const Vector& f, const StationaryMeasure& mu) {
  if (static_cast<std::size_t>(f.size()) != mu.size()) {
    throw Error(ErrorKind::DimensionMismatch, "observable has " + std::to_string(f.size()) +
                                                  " entries, measure has " +
                                                  std::to_string(mu.size()));
  }
  if (!f.allFinite()) {
    throw Error(ErrorKind::InvalidModel, "observable has non-finite entries");
  }
  Observable obs;
  obs.values = f;
  obs.mean = mu.expectation(f);
  obs.centered = (f.array() - obs.mean).matrix();
  obs.variance = mu.weights().dot(obs.centered.cwiseAbs2());
  obs.pos_sup = std::max(0.0, obs.centered.maxCoeff());
  obs.neg_sup = std::max(0.0, -obs.centered.minCoeff());
  obs.measure_fingerprint = mu.fingerprint();
  return obs;
}

double weighted_inner(const Vector& g, const Vector& h, const StationaryMeasure& mu) {
  if (static_cast<std::size_t>(g.size()) != mu.size() ||
      static_cast<std::size_t>(h.size()) != mu.size()) {
    throw Error(ErrorKind::DimensionMismatch, "inner product operands must match state count");
  }
  return (mu.weights().array() * g.array() * h.array()).sum();
}

}  // namespace markov_uq
