#include "markov_uq/bound.hpp"

#include <cmath>

namespace markov_uq {

namespace {

[[noreturn]] void not_applicable(Method m, const std::string& why) {
  throw Error(ErrorKind::NoApplicableMethod,
              "method '" + std::string(to_string(m)) + "' is not applicable: " + why);
}

// Closed-form Bernstein value; the optimiser only supplies the minimising c.
XiResult bernstein_side(double sigma2, double m, double eta, Sign sign) {
  XiResult out;
  out.method = "bernstein";
  out.value = bernstein_xi(sigma2, m, eta);
  if (sigma2 > 0.0 && eta > 0.0) {
    const LambdaFunction lam = sign == Sign::Plus ? bernstein_lambda(sigma2, m, 0.0)
                                                  : bernstein_lambda(sigma2, 0.0, m);
    const XiResult numeric = xi_infimum(lam, eta, sign);
    out.minimizer_c = numeric.minimizer_c;
    out.boundary = numeric.boundary;
  } else {
    out.boundary = Boundary::AtZero;
  }
  return out;
}

void fill_bernstein(UqBoundReport& r, const BernsteinParams& p) {
  r.sigma2 = p.sigma2;
  r.m_plus = p.m_plus;
  r.m_minus = p.m_minus;
  r.xi_plus = bernstein_side(p.sigma2, p.m_plus, r.eta, Sign::Plus);
  r.xi_minus = bernstein_side(p.sigma2, p.m_minus, r.eta, Sign::Minus);
}

void fill_numeric(UqBoundReport& r, const LambdaFunction& lam) {
  r.xi_plus = xi_infimum(lam, r.eta, Sign::Plus);
  r.xi_minus = xi_infimum(lam, r.eta, Sign::Minus);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::Auto: return "auto";
    case Method::Poincare: return "poincare";
    case Method::Reversible: return "reversible";
    case Method::Liapunov: return "liapunov";
    case Method::LogSobolev: return "log-sobolev";
    case Method::FSobolev: return "f-sobolev";
    case Method::Kappa: return "kappa";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::Auto, Method::Poincare, Method::Reversible, Method::Liapunov,
                   Method::LogSobolev, Method::FSobolev, Method::Kappa}) {
    if (name == to_string(m)) return m;
  }
  throw Error(ErrorKind::OutOfRange, "unknown method '" + std::string(name) + "'");
}

UqBoundReport assemble_bound(const GeneratorMatrix& a, const StationaryMeasure& mu,
                             const Observable& f, double eta, const BoundOptions& options) {
  require_match(mu, a.fingerprint(), "assemble_bound");
  if (f.measure_fingerprint != mu.fingerprint()) {
    throw Error(ErrorKind::MeasureMismatch, "observable was centred under another measure");
  }
  if (!(eta >= 0.0) || !std::isfinite(eta)) {
    throw Error(ErrorKind::OutOfRange, "eta must be finite and nonnegative");
  }
  UqBoundReport r;
  r.eta = eta;
  r.eta_source = "override";
  r.mean = f.mean;
  r.variance = f.variance;

  Method m = options.method;
  const bool reversible = is_reversible(a, mu);
  if (m == Method::Auto) m = reversible ? Method::Reversible : Method::Poincare;
  r.method = std::string(to_string(m));

  try {
    switch (m) {
      case Method::Poincare: {
        const FunctionalConstants c = poincare_constant(a, mu);
        r.alpha = c.poincare_alpha;
        r.constants_provenance = c.provenance;
        fill_bernstein(r, poincare_bernstein_params(a, f, mu));
        break;
      }
      case Method::Reversible: {
        if (!reversible) not_applicable(m, "generator is not self-adjoint in L2(mu)");
        const FunctionalConstants c = poincare_constant(a, mu);
        r.alpha = c.poincare_alpha;
        r.constants_provenance = c.provenance;
        fill_bernstein(r, reversible_bernstein_params(a, f, mu));
        break;
      }
      case Method::Liapunov: {
        if (!options.liapunov) not_applicable(m, "no Liapunov data supplied");
        if (!reversible) not_applicable(m, "generator is not self-adjoint in L2(mu)");
        double alpha = 0.0;
        if (options.liapunov_alpha) {
          alpha = *options.liapunov_alpha;
          r.constants_provenance = "user";
        } else {
          alpha = poincare_constant(a, mu).poincare_alpha;
          r.constants_provenance = "spectral";
        }
        r.alpha = alpha;
        fill_bernstein(r, liapunov_bernstein_params(a, f, mu, *options.liapunov, alpha));
        break;
      }
      case Method::LogSobolev: {
        double beta = 0.0;
        if (options.beta) {
          beta = *options.beta;
          r.constants_provenance = "user";
        } else {
          beta = log_sobolev_constant_numeric(a, mu, options.seed).beta;
          r.constants_provenance = "numeric";
        }
        r.beta = beta;
        fill_numeric(r, log_sobolev_lambda(f, mu, beta));
        break;
      }
      case Method::FSobolev: {
        if (!options.f_sobolev) not_applicable(m, "no F-Sobolev function supplied");
        validate_f_sobolev(*options.f_sobolev);
        r.constants_provenance = "user";
        fill_numeric(r, f_sobolev_lambda_function(f, mu, *options.f_sobolev));
        break;
      }
      case Method::Kappa: {
        if (a.size() > 200) not_applicable(m, "kappa optimisation limited to 200 states");
        r.constants_provenance = "spectral";
        fill_numeric(r, kappa_lambda(a, f, mu));
        break;
      }
      case Method::Auto: break;
    }
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::NotReversible:
      case ErrorKind::LiapunovViolated:
      case ErrorKind::DimensionTooLarge:
      case ErrorKind::InvalidModel:
        not_applicable(m, e.what());
      default:
        throw;
    }
  }
  return r;
}

UqBoundReport assemble_bound(const GeneratorMatrix& a, const StationaryMeasure& mu,
                             const Observable& f, const EntropyRate& rate, double horizon,
                             const BoundOptions& options) {
  if (!(horizon > 0.0)) throw Error(ErrorKind::OutOfRange, "horizon must be positive");
  UqBoundReport r = assemble_bound(a, mu, f, rate.eta(horizon), options);
  r.eta_source = rate.estimator;
  r.horizon = horizon;
  r.entropy = rate;
  return r;
}

UqBoundReport with_eta(const GeneratorMatrix& a, const StationaryMeasure& mu, const Observable& f,
                       const UqBoundReport& report, double eta, const BoundOptions& options) {
  BoundOptions o = options;
  o.method = parse_method(report.method);
  if (report.beta) o.beta = report.beta;
  UqBoundReport r = assemble_bound(a, mu, f, eta, o);
  r.constants_provenance = report.constants_provenance;
  r.eta_source = report.eta_source;
  r.horizon = report.horizon;
  return r;
}

}  // namespace markov_uq
