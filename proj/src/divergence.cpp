#include "markov_uq/divergence.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace markov_uq {

namespace {

constexpr double kSearchFloor = 1e-12;
constexpr double kUnboundedCap = 1e8;
constexpr int kGridPoints = 400;

double checked(const LambdaFunction& lambda, double c) {
  const double v = lambda(c);
  if (std::isnan(v)) {
    throw Error(ErrorKind::EvaluationFailure, "Lambda returned NaN at c = " + std::to_string(c));
  }
  return v;
}

}  // namespace

std::string_view to_string(LambdaKind kind) {
  switch (kind) {
    case LambdaKind::EmpiricalCgf: return "empirical-cgf";
    case LambdaKind::Bernstein: return "bernstein";
    case LambdaKind::LogSobolev: return "log-sobolev";
    case LambdaKind::FSobolev: return "f-sobolev";
    case LambdaKind::Kappa: return "kappa";
  }
  return "unknown";
}

double LambdaFunction::operator()(double c) const {
  if (c == 0.0) return 0.0;
  if (!(c > c_minus && c < c_plus)) return kInfinity;
  return evaluator(c);
}

void require_probability_vector(const Vector& p, const char* what) {
  if (p.size() == 0 || !p.allFinite() || p.minCoeff() < 0.0 ||
      std::abs(p.sum() - 1.0) > 1e-10) {
    throw Error(ErrorKind::InvalidModel, std::string(what) + " is not a probability vector");
  }
}

double cgf(const Vector& p, const Vector& f, double c) {
  if (p.size() != f.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cgf: p and f lengths differ");
  }
  if (c == 0.0) return 0.0;
  double shift = -kInfinity;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) shift = std::max(shift, c * f(i));
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) acc += p(i) * std::exp(c * f(i) - shift);
  }
  return shift + std::log(acc);
}

double relative_entropy(const Vector& p_tilde, const Vector& p) {
  if (p_tilde.size() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "relative_entropy: lengths differ");
  }
  double r = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p_tilde(i) <= 0.0) continue;
    if (p(i) <= 0.0) return kInfinity;
    r += p_tilde(i) * std::log(p_tilde(i) / p(i));
  }
  return std::max(r, 0.0);
}

XiResult xi_infimum(const LambdaFunction& lambda, double eta, Sign sign) {
  if (!(eta >= 0.0)) {
    throw Error(ErrorKind::OutOfRange, "xi_infimum: eta must be nonnegative");
  }
  const double s = sign == Sign::Plus ? 1.0 : -1.0;
  const double singular = sign == Sign::Plus ? lambda.c_plus : -lambda.c_minus;
  const bool capped = std::isfinite(singular);
  const double c_cap = capped ? singular : kUnboundedCap;

  auto objective = [&](double log_c) {
    const double c = std::exp(log_c);
    const double v = checked(lambda, s * c);
    return (v + eta) / c;
  };

  const double lo = std::log(kSearchFloor * std::min(1.0, c_cap));
  // Stay strictly inside an open domain.
  const double hi = capped ? std::log(c_cap) + std::log1p(-1e-14) : std::log(c_cap);

  std::vector<double> grid(kGridPoints), values(kGridPoints);
  std::size_t best = 0;
  for (int k = 0; k < kGridPoints; ++k) {
    grid[k] = lo + (hi - lo) * k / (kGridPoints - 1);
    values[k] = objective(grid[k]);
    if (values[k] < values[best]) best = static_cast<std::size_t>(k);
  }
  if (!std::isfinite(values[best])) {
    throw Error(ErrorKind::EvaluationFailure, "Lambda is infinite on the whole search range");
  }

  XiResult out;
  out.method = std::string(to_string(lambda.kind));

  double a = grid[best == 0 ? 0 : best - 1];
  double b = grid[std::min<std::size_t>(best + 1, kGridPoints - 1)];
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = objective(x1);
  double f2 = objective(x2);
  double best_u = grid[best];
  double best_v = values[best];
  for (int it = 0; it < 200 && (b - a) > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = objective(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = objective(x2);
    }
    if (f1 < best_v) {
      best_v = f1;
      best_u = x1;
    }
    if (f2 < best_v) {
      best_v = f2;
      best_u = x2;
    }
  }

  const double edge = 1e-9 * (hi - lo);
  out.value = best_v;
  if (best_u - lo <= edge || (best == 0 && values[0] <= best_v)) {
    out.boundary = Boundary::AtZero;
  } else if (hi - best_u <= edge) {
    out.boundary = Boundary::AtCap;
  } else {
    out.boundary = Boundary::Interior;
    out.minimizer_c = std::exp(best_u);
  }
  if (out.boundary == Boundary::AtZero) out.value = values[0];
  if (out.boundary == Boundary::AtCap) out.value = objective(hi);
  return out;
}

double bernstein_xi(double sigma2, double m, double eta) {
  if (sigma2 < 0.0 || m < 0.0 || eta < 0.0) {
    throw Error(ErrorKind::OutOfRange, "bernstein_xi: arguments must be nonnegative");
  }
  return std::sqrt(2.0 * sigma2 * eta) + m * eta;
}

double linearized_xi(double variance, double eta) {
  if (variance < 0.0 || eta < 0.0) {
    throw Error(ErrorKind::OutOfRange, "linearized_xi: arguments must be nonnegative");
  }
  return std::sqrt(2.0 * variance * eta);
}

Vector tilted_measure(const Vector& p, const Vector& f, double c) {
  require_probability_vector(p, "tilted_measure: p");
  if (p.size() != f.size()) {
    throw Error(ErrorKind::DimensionMismatch, "tilted_measure: p and f lengths differ");
  }
  if (c == 0.0) return p;
  double shift = -kInfinity;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) shift = std::max(shift, c * f(i));
  }
  Vector out(p.size());
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    out(i) = p(i) > 0.0 ? p(i) * std::exp(c * f(i) - shift) : 0.0;
  }
  return out / out.sum();
}

double solve_tilt_level(const Vector& p, const Vector& f, double eta) {
  require_probability_vector(p, "solve_tilt_level: p");
  if (p.size() != f.size()) {
    throw Error(ErrorKind::DimensionMismatch, "solve_tilt_level: p and f lengths differ");
  }
  if (!(eta > 0.0)) {
    throw Error(ErrorKind::OutOfRange, "solve_tilt_level: eta must be positive");
  }
  double f_max = -kInfinity;
  double f_min = kInfinity;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) {
      f_max = std::max(f_max, f(i));
      f_min = std::min(f_min, f(i));
    }
  }
  if (f_max == f_min) {
    throw Error(ErrorKind::ConstantObservable, "f is constant on the support of p");
  }
  double top_mass = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0 && f(i) == f_max) top_mass += p(i);
  }
  const double sup_entropy = -std::log(top_mass);
  if (eta >= sup_entropy) {
    throw Error(ErrorKind::EtaUnreachable,
                "eta = " + std::to_string(eta) + " is not below sup_c R(p^c||p) = " +
                    std::to_string(sup_entropy));
  }

  auto entropy_at = [&](double c) { return relative_entropy(tilted_measure(p, f, c), p); };
  const double scale = 1.0 / (f_max - f_min);
  double lo = 0.0;
  double hi = scale;
  while (entropy_at(hi) < eta) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12 * scale) {
      throw Error(ErrorKind::EtaUnreachable, "eta too close to the tilting supremum");
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (entropy_at(mid) < eta) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double c = 0.5 * (lo + hi);
  if (std::abs(entropy_at(c) - eta) > 1e-10) {
    throw Error(ErrorKind::EtaUnreachable, "tilt level could not be resolved to 1e-10");
  }
  return c;
}

LambdaFunction empirical_cgf_lambda(const Vector& p, const Vector& f) {
  require_probability_vector(p, "empirical_cgf_lambda: p");
  if (p.size() != f.size()) {
    throw Error(ErrorKind::DimensionMismatch, "empirical_cgf_lambda: lengths differ");
  }
  const Vector centered = (f.array() - p.dot(f)).matrix();
  LambdaFunction out;
  out.kind = LambdaKind::EmpiricalCgf;
  out.evaluator = [p, centered](double c) { return cgf(p, centered, c); };
  return out;
}

LambdaFunction bernstein_lambda(double sigma2, double m_plus, double m_minus) {
  if (sigma2 < 0.0 || m_plus < 0.0 || m_minus < 0.0) {
    throw Error(ErrorKind::OutOfRange, "bernstein_lambda: parameters must be nonnegative");
  }
  LambdaFunction out;
  out.kind = LambdaKind::Bernstein;
  out.c_plus = m_plus > 0.0 ? 1.0 / m_plus : kInfinity;
  out.c_minus = m_minus > 0.0 ? -1.0 / m_minus : -kInfinity;
  out.evaluator = [sigma2, m_plus, m_minus](double c) {
    const double m = c > 0.0 ? m_plus : m_minus;
    const double denom = 1.0 - std::abs(c) * m;
    if (!(denom > 0.0)) return kInfinity;
    return sigma2 * c * c / (2.0 * denom);
  };
  return out;
}

}  // namespace markov_uq
