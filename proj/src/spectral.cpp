#include "markov_uq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "markov_uq/rng.hpp"

namespace markov_uq {

namespace {

// Plainly symmetric matrix D^{1/2} A_s D^{-1/2}; its spectrum is that of A_s on L2(mu).
Matrix symmetric_form(const GeneratorMatrix& a, const StationaryMeasure& mu) {
  const Matrix s = similarity_transform(symmetrize(a, mu).rates(), mu);
  return 0.5 * (s + s.transpose());
}

Eigen::SelfAdjointEigenSolver<Matrix> eigensolve(const Matrix& s, bool vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      s, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::EigenFailure, "symmetric eigensolver did not converge");
  }
  return es;
}

double scale_of(const Matrix& s) { return std::max(1.0, s.cwiseAbs().maxCoeff()); }

void require_observable(const Observable& f, const StationaryMeasure& mu, const char* context) {
  if (f.size() != mu.size()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(context) + ": observable length");
  }
  if (f.measure_fingerprint != mu.fingerprint()) {
    throw Error(ErrorKind::MeasureMismatch,
                std::string(context) + ": observable was centred under another measure");
  }
}

void require_reversible(const GeneratorMatrix& a, const StationaryMeasure& mu,
                        const char* context) {
  require_match(mu, a.fingerprint(), context);
  if (!is_reversible(a, mu)) {
    throw Error(ErrorKind::NotReversible,
                std::string(context) + ": adjoint defect " +
                    std::to_string(adjoint_defect(a, mu)) + " exceeds 1e-10");
  }
}

double gap_of(const Vector& evals, double scale) {
  const auto n = evals.size();
  const double gap = evals(n - 1) - evals(n - 2);
  if (!(gap > 1e-12 * scale)) {
    throw Error(ErrorKind::ZeroGap, "symmetrised generator has no spectral gap");
  }
  return gap;
}

}  // namespace

double kappa(const GeneratorMatrix& a, const Vector& v, const StationaryMeasure& mu) {
  require_match(mu, a.fingerprint(), "kappa");
  if (static_cast<std::size_t>(v.size()) != a.size()) {
    throw Error(ErrorKind::DimensionMismatch, "kappa: potential length");
  }
  Matrix s = symmetric_form(a, mu);
  s.diagonal() += v;
  return eigensolve(s, false).eigenvalues().maxCoeff();
}

LambdaFunction kappa_lambda(const GeneratorMatrix& a, const Observable& f,
                            const StationaryMeasure& mu) {
  require_match(mu, a.fingerprint(), "kappa_lambda");
  require_observable(f, mu, "kappa_lambda");
  LambdaFunction out;
  out.kind = LambdaKind::Kappa;
  out.evaluator = [s = symmetric_form(a, mu), fc = f.centered](double c) {
    Matrix m = s;
    m.diagonal() += c * fc;
    return std::max(0.0, eigensolve(m, false).eigenvalues().maxCoeff());
  };
  return out;
}

FunctionalConstants poincare_constant(const GeneratorMatrix& a, const StationaryMeasure& mu) {
  require_match(mu, a.fingerprint(), "poincare_constant");
  const Matrix s = symmetric_form(a, mu);
  const auto es = eigensolve(s, false);
  FunctionalConstants out;
  out.poincare_alpha = 1.0 / gap_of(es.eigenvalues(), scale_of(s));
  out.reversible = is_reversible(a, mu);
  out.provenance = "spectral";
  return out;
}

Vector gap_eigenfunction(const GeneratorMatrix& a, const StationaryMeasure& mu) {
  require_match(mu, a.fingerprint(), "gap_eigenfunction");
  const Matrix s = symmetric_form(a, mu);
  const auto es = eigensolve(s, true);
  gap_of(es.eigenvalues(), scale_of(s));
  const Vector v = es.eigenvectors().col(s.rows() - 2);
  return (v.array() * (-0.5 * mu.log_weights().array()).exp()).matrix();
}

BernsteinParams poincare_bernstein_params(const GeneratorMatrix& a, const Observable& f,
                                          const StationaryMeasure& mu) {
  require_observable(f, mu, "poincare_bernstein_params");
  const double alpha = poincare_constant(a, mu).poincare_alpha;
  return {2.0 * alpha * f.variance, alpha * f.pos_sup, alpha * f.neg_sup};
}

double asymptotic_variance(const GeneratorMatrix& a, const Observable& f,
                           const StationaryMeasure& mu) {
  require_reversible(a, mu, "asymptotic_variance");
  require_observable(f, mu, "asymptotic_variance");
  const Matrix s = symmetric_form(a, mu);
  const auto es = eigensolve(s, true);
  const Vector& ev = es.eigenvalues();
  const auto n = s.rows();
  if (!(ev(n - 1) - ev(n - 2) > 1e-12 * scale_of(s))) {
    throw Error(ErrorKind::SingularPoisson, "Poisson equation has no unique centred solution");
  }
  // In the symmetric frame f_hat becomes u = sqrt(mu) f_hat, orthogonal to the top eigenvector.
  const Vector u = (f.centered.array() * (0.5 * mu.log_weights().array()).exp()).matrix();
  const Vector coeff = es.eigenvectors().transpose() * u;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < n - 1; ++k) acc += coeff(k) * coeff(k) / -ev(k);
  return 2.0 * acc;
}

BernsteinParams reversible_bernstein_params(const GeneratorMatrix& a, const Observable& f,
                                            const StationaryMeasure& mu) {
  const double sigma2 = asymptotic_variance(a, f, mu);
  const double alpha = poincare_constant(a, mu).poincare_alpha;
  return {sigma2, alpha * f.pos_sup, alpha * f.neg_sup};
}

void check_liapunov(const GeneratorMatrix& a, const LiapunovData& lia) {
  const auto n = static_cast<Eigen::Index>(a.size());
  if (lia.u.size() != n || lia.phi.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "Liapunov data length");
  }
  if (!(lia.u.minCoeff() > 0.0) || !(lia.phi.minCoeff() > 0.0) || !(lia.b >= 0.0)) {
    throw Error(ErrorKind::LiapunovViolated, "U and phi must be positive, b nonnegative");
  }
  const Matrix& q = a.rates();
  for (Eigen::Index i = 0; i < n; ++i) {
    double drift = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (q(i, j) != 0.0) drift -= q(i, j) * (lia.u(j) / lia.u(i));
    }
    const double need = lia.phi(i) - lia.b;
    if (drift < need - 1e-10 * std::max(1.0, std::abs(need))) {
      throw Error(ErrorKind::LiapunovViolated,
                  "-(AU)/U = " + std::to_string(drift) + " < phi - b = " + std::to_string(need) +
                      " at state " + a.states()[static_cast<std::size_t>(i)]);
    }
  }
}

BernsteinParams liapunov_bernstein_params(const GeneratorMatrix& a, const Observable& f,
                                          const StationaryMeasure& mu, const LiapunovData& lia,
                                          double alpha) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::OutOfRange, "alpha must be positive");
  check_liapunov(a, lia);
  const double sigma2 = asymptotic_variance(a, f, mu);
  double plus = 0.0;
  double minus = 0.0;
  for (Eigen::Index i = 0; i < f.centered.size(); ++i) {
    plus = std::max(plus, f.centered(i) / lia.phi(i));
    minus = std::max(minus, -f.centered(i) / lia.phi(i));
  }
  const double scale = 1.0 + alpha * lia.b;
  return {sigma2, scale * plus, scale * minus};
}

double perturbation_kappa_bound(double d, double b_plus, double b_x0_norm2, double c) {
  if (!(d > 0.0) || b_plus < 0.0 || b_x0_norm2 < 0.0 || c < 0.0) {
    throw Error(ErrorKind::OutOfRange, "perturbation bound needs D > 0 and B+, |Bx0|^2, c >= 0");
  }
  if (b_plus > 0.0 && c >= d / b_plus) {
    throw Error(ErrorKind::OutOfRange, "c must stay below D / B+");
  }
  if (c == 0.0) return 0.0;
  return c * c * b_x0_norm2 / (d - c * b_plus);
}

LambdaFunction log_sobolev_lambda(const Observable& f, const StationaryMeasure& mu, double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::OutOfRange, "log-Sobolev beta must be positive");
  require_observable(f, mu, "log_sobolev_lambda");
  LambdaFunction out;
  out.kind = LambdaKind::LogSobolev;
  out.evaluator = [p = mu.weights(), fc = f.centered, beta](double c) {
    return cgf(p, fc, beta * c) / beta;
  };
  return out;
}

FSobolevFunction FSobolevFunction::scaled_log(double beta) {
  if (!(beta > 0.0)) throw Error(ErrorKind::OutOfRange, "beta must be positive");
  FSobolevFunction fs;
  fs.f = [beta](double x) { return std::log(x) / beta; };
  fs.f_inv = [beta](double y) { return std::exp(beta * y); };
  fs.f_at_zero = -kInfinity;
  return fs;
}

void validate_f_sobolev(const FSobolevFunction& fs) {
  if (!fs.f || !fs.f_inv) throw Error(ErrorKind::InvalidModel, "F and F^-1 must both be given");
  if (std::abs(fs.f(1.0)) > 1e-12) throw Error(ErrorKind::InvalidModel, "F(1) must be 0");
  const double xs[] = {1e-3, 1e-2, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0};
  double prev = -kInfinity;
  for (double x : xs) {
    const double y = fs.f(x);
    if (!(y > prev)) throw Error(ErrorKind::InvalidModel, "F is not strictly increasing");
    if (!(y > fs.f_at_zero)) throw Error(ErrorKind::InvalidModel, "F(x) must exceed F(0+)");
    if (std::abs(fs.f_inv(y) - x) > 1e-8 * x) {
      throw Error(ErrorKind::InvalidModel, "F^-1 does not invert F");
    }
    prev = y;
  }
}

double f_sobolev_lambda(const Observable& f, const StationaryMeasure& mu,
                        const FSobolevFunction& fs, double c, double c_minus, double c_plus) {
  require_observable(f, mu, "f_sobolev_lambda");
  if (c == 0.0) return 0.0;
  if (!(c > c_minus && c < c_plus)) return kInfinity;
  double acc = 0.0;
  for (Eigen::Index i = 0; i < f.centered.size(); ++i) {
    const double v = c * f.centered(i);
    if (!(v > fs.f_at_zero)) {
      throw Error(ErrorKind::DomainViolation,
                  "V_c = " + std::to_string(v) + " is not above F(0+)");
    }
    acc += mu[static_cast<std::size_t>(i)] * fs.f_inv(v);
  }
  return fs.f(acc);
}

LambdaFunction f_sobolev_lambda_function(const Observable& f, const StationaryMeasure& mu,
                                         FSobolevFunction fs, double c_minus, double c_plus) {
  require_observable(f, mu, "f_sobolev_lambda");
  LambdaFunction out;
  out.kind = LambdaKind::FSobolev;
  out.c_minus = c_minus;
  out.c_plus = c_plus;
  out.evaluator = [f, mu, fs = std::move(fs)](double c) {
    try {
      return f_sobolev_lambda(f, mu, fs, c);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DomainViolation) return kInfinity;
      throw;
    }
  };
  return out;
}

LogSobolevEstimate log_sobolev_constant_numeric(const GeneratorMatrix& a,
                                                const StationaryMeasure& mu,
                                                std::uint64_t seed) {
  require_reversible(a, mu, "log_sobolev_constant_numeric");
  const auto n = static_cast<Eigen::Index>(a.size());
  if (n > 64) {
    throw Error(ErrorKind::DimensionTooLarge, "numeric log-Sobolev estimate limited to 64 states");
  }
  const double alpha = poincare_constant(a, mu).poincare_alpha;
  const Vector& w = mu.weights();
  const Matrix& q = a.rates();

  // Ratio Ent(g^2) / E(g,g) on the unit sphere of L2(mu), plus its L2(mu) gradient.
  auto evaluate = [&](const Vector& g, Vector* grad) {
    // Near-constant g makes the ratio 0/0 in floating point; its limit is 2 alpha.
    const double mean = w.dot(g);
    if ((w.array() * (g.array() - mean).square()).sum() < 1e-6) {
      if (grad) *grad = Vector::Zero(n);
      return 2.0 * alpha;
    }
    const Vector ag = q * g;
    const double energy = -(w.array() * g.array() * ag.array()).sum();
    if (!(energy > 1e-300)) return -kInfinity;
    double ent = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (g(i) > 0.0) ent += w(i) * g(i) * g(i) * std::log(g(i) * g(i));
    }
    const double r = ent / energy;
    if (grad) {
      grad->resize(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dent = g(i) > 0.0 ? 2.0 * g(i) * std::log(g(i) * g(i)) : 0.0;
        (*grad)(i) = (dent + 2.0 * r * ag(i)) / energy;
      }
      // Drop the radial part; the ratio is scale invariant.
      *grad -= (w.array() * grad->array() * g.array()).sum() * g;
    }
    return r;
  };
  auto normalise = [&](Vector& g) {
    g = g.cwiseAbs();
    g /= std::sqrt((w.array() * g.array().square()).sum());
  };

  constexpr int kStarts = 32;
  std::vector<double> finals;
  finals.reserve(kStarts);
  for (int k = 0; k < kStarts; ++k) {
    RandomStream rng(seed, static_cast<std::uint64_t>(k));
    const double spread = 0.05 * std::pow(60.0, k / double(kStarts - 1));
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = std::exp(spread * rng.normal());
    normalise(g);
    Vector grad;
    double r = evaluate(g, &grad);
    double step = 1.0;
    for (int it = 0; it < 5000 && std::isfinite(r); ++it) {
      bool improved = false;
      while (step > 1e-14) {
        Vector trial = g + step * grad;
        normalise(trial);
        Vector trial_grad;
        const double tr = evaluate(trial, &trial_grad);
        if (tr > r) {
          const double gain = tr - r;
          g = std::move(trial);
          grad = std::move(trial_grad);
          r = tr;
          step *= 2.0;
          improved = gain > 1e-12 * std::max(1.0, std::abs(r));
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }
    finals.push_back(std::max(std::isfinite(r) ? r : 0.0, 2.0 * alpha));
  }

  LogSobolevEstimate out;
  out.restarts = kStarts;
  out.beta = *std::max_element(finals.begin(), finals.end());
  out.best_ratio = out.beta;
  for (double v : finals) {
    if (out.beta - v <= 1e-6 * out.beta) ++out.agreeing_restarts;
  }
  return out;
}

HarrisRate harris_xi(const HarrisParams& p) {
  if (!(p.gamma > 0.0 && p.gamma < 1.0) || !(p.k >= 0.0) || !(p.alpha > 0.0 && p.alpha < 1.0) ||
      !(p.alpha0 > 0.0 && p.alpha0 < p.alpha) || !(p.t > 0.0)) {
    throw Error(ErrorKind::ConstraintViolated,
                "need 0<gamma<1, K>=0, 0<alpha0<alpha<1 and T>0");
  }
  if (!(p.r > 2.0 * p.k / (1.0 - p.gamma))) {
    throw Error(ErrorKind::ConstraintViolated, "R must exceed 2K/(1-gamma)");
  }
  const double gamma0 = p.gamma + 2.0 * p.k / p.r;
  // K = 0 makes beta infinite; the second branch then tends to gamma0.
  double second = gamma0;
  if (p.k > 0.0) {
    const double rb = p.r * p.alpha0 / p.k;
    second = (2.0 + rb * gamma0) / (2.0 + rb);
  }
  HarrisRate out;
  out.xi = std::max(1.0 - (p.alpha - p.alpha0), second);
  out.rate = std::log(1.0 / out.xi) / p.t;
  return out;
}

double poincare_from_decay(const std::vector<DecaySeries>& series) {
  double min_rate = kInfinity;
  bool any = false;
  for (const auto& s : series) {
    const bool all_zero =
        std::all_of(s.begin(), s.end(), [](const auto& pt) { return pt.second == 0.0; });
    if (all_zero) continue;
    std::vector<std::pair<double, double>> pts;
    for (const auto& [t, norm] : s) {
      if (norm > 0.0 && std::isfinite(norm)) pts.emplace_back(t, std::log(norm));
    }
    if (pts.size() < 3) {
      throw Error(ErrorKind::InsufficientSamples, "decay fit needs at least 3 positive samples");
    }
    // Faster modes inflate the early slope, so only the later half is fitted.
    std::sort(pts.begin(), pts.end());
    pts.erase(pts.begin(), pts.begin() + static_cast<std::ptrdiff_t>(
                                             std::min(pts.size() / 2, pts.size() - 3)));
    double tm = 0.0, ym = 0.0;
    for (const auto& [t, y] : pts) {
      tm += t;
      ym += y;
    }
    tm /= static_cast<double>(pts.size());
    ym /= static_cast<double>(pts.size());
    double stt = 0.0, sty = 0.0;
    for (const auto& [t, y] : pts) {
      stt += (t - tm) * (t - tm);
      sty += (t - tm) * (y - ym);
    }
    if (!(stt > 0.0)) {
      throw Error(ErrorKind::InsufficientSamples, "decay samples need distinct times");
    }
    const double rate = -sty / stt;
    if (!(rate > 0.0)) throw Error(ErrorKind::NonDecaying, "fitted decay rate is not positive");
    min_rate = std::min(min_rate, rate);
    any = true;
  }
  if (!any) throw Error(ErrorKind::InsufficientSamples, "no non-degenerate decay series");
  return 1.0 / min_rate;
}

double carlen_loss_beta(double alpha, double c) {
  if (!(alpha > 0.0)) throw Error(ErrorKind::OutOfRange, "alpha must be positive");
  const double e2 = std::exp(2.0);
  return 3.0 * alpha + 1.0 / ((1.0 + alpha * std::abs(c)) * std::numbers::pi * e2);
}

FunctionalConstants hessian_constants(double m, HessianConvention convention) {
  if (!(m > 0.0)) throw Error(ErrorKind::OutOfRange, "Hessian lower bound must be positive");
  FunctionalConstants out;
  out.reversible = true;
  out.provenance = "analytic";
  if (convention == HessianConvention::Poincare) {
    out.poincare_alpha = 1.0 / m;
  } else {
    out.log_sobolev_beta = 2.0 / m;
    out.poincare_alpha = 1.0 / m;
  }
  return out;
}

}  // namespace markov_uq
