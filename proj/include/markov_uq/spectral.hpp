#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "markov_uq/chain_core.hpp"
#include "markov_uq/divergence.hpp"

namespace markov_uq {

/// Poincare / log-Sobolev constants of a generator (time units).
struct FunctionalConstants {
  double poincare_alpha = 0.0;
  std::optional<double> log_sobolev_beta;
  bool reversible = false;
  std::string provenance;  // spectral | analytic | decay-fit | numeric | user
};

/// Parameters of a Bernstein-type bound Lambda(+-c) <= sigma2 c^2 / (2 (1 - c M+-)).
struct BernsteinParams {
  double sigma2 = 0.0;
  double m_plus = 0.0;
  double m_minus = 0.0;
};

/// Liapunov data: -(A U) / U >= phi - b on every state.
struct LiapunovData {
  Vector u;
  Vector phi;
  double b = 0.0;
};

struct HarrisParams {
  double gamma = 0.5;
  double k = 0.0;
  double r = 1.0;
  double alpha = 0.5;
  double alpha0 = 0.25;
  double t = 1.0;
};

struct HarrisRate {
  double xi = 1.0;
  double rate = 0.0;
};

/// Largest eigenvalue of symmetrize(A) + diag(V) as an operator on L2(mu).
double kappa(const GeneratorMatrix& a, const Vector& v, const StationaryMeasure& mu);

/// Lambda(c) = kappa(c * centred f). The symmetrised similarity matrix is cached.
LambdaFunction kappa_lambda(const GeneratorMatrix& a, const Observable& f,
                            const StationaryMeasure& mu);

/// alpha = 1 / spectral gap of the symmetrised generator.
FunctionalConstants poincare_constant(const GeneratorMatrix& a, const StationaryMeasure& mu);

/// Eigenfunction of the symmetrised generator for the gap eigenvalue, unit L2(mu) norm.
Vector gap_eigenfunction(const GeneratorMatrix& a, const StationaryMeasure& mu);

/// sigma2 = 2 alpha Var, M+- = alpha ||f_hat^+-||_inf.
BernsteinParams poincare_bernstein_params(const GeneratorMatrix& a, const Observable& f,
                                          const StationaryMeasure& mu);

/// sigma^2(f) = 2 <(-A)^{-1} f_hat, f_hat> for reversible A.
double asymptotic_variance(const GeneratorMatrix& a, const Observable& f,
                           const StationaryMeasure& mu);

/// sigma2 = sigma^2(f), M+- = alpha ||f_hat^+-||_inf. Requires reversibility.
BernsteinParams reversible_bernstein_params(const GeneratorMatrix& a, const Observable& f,
                                            const StationaryMeasure& mu);

/// Throws LiapunovViolated unless -(A U)_i / U_i >= phi_i - b - 1e-10 for all i.
void check_liapunov(const GeneratorMatrix& a, const LiapunovData& lia);

/// sigma2 = sigma^2(f), M+- = (1 + alpha b) ||f_hat^+- / phi||_inf.
BernsteinParams liapunov_bernstein_params(const GeneratorMatrix& a, const Observable& f,
                                          const StationaryMeasure& mu, const LiapunovData& lia,
                                          double alpha);

/// c^2 ||B x0||^2 / (D - c B+) for 0 <= c < D / B+ (B+ = 0: no upper limit).
double perturbation_kappa_bound(double d, double b_plus, double b_x0_norm2, double c);

/// Lambda(c) = (1/beta) log E_mu[exp(beta c f_hat)].
LambdaFunction log_sobolev_lambda(const Observable& f, const StationaryMeasure& mu, double beta);

/// Paired F / F^{-1} for an F-Sobolev inequality. F is increasing and concave
/// with F(1) = 0; F^{-1} is defined on (F(0+), inf).
struct FSobolevFunction {
  std::function<double(double)> f;
  std::function<double(double)> f_inv;
  double f_at_zero = -kInfinity;  // F(0+)

  /// F(x) = log(x) / beta; reproduces the log-Sobolev Lambda with constant beta.
  static FSobolevFunction scaled_log(double beta);
};

/// Checks F(1) = 0, monotonicity, and F(F^{-1}(y)) = y on sample points.
void validate_f_sobolev(const FSobolevFunction& fs);

/// F(E_mu[F^{-1}(c f_hat)]) for c in (c_minus, c_plus), +inf otherwise.
double f_sobolev_lambda(const Observable& f, const StationaryMeasure& mu,
                        const FSobolevFunction& fs, double c, double c_minus = -kInfinity,
                        double c_plus = kInfinity);

LambdaFunction f_sobolev_lambda_function(const Observable& f, const StationaryMeasure& mu,
                                         FSobolevFunction fs, double c_minus = -kInfinity,
                                         double c_plus = kInfinity);

struct LogSobolevEstimate {
  double beta = 0.0;
  double best_ratio = 0.0;           // best Ent(g^2)/E(g,g) found before the 2 alpha floor
  int agreeing_restarts = 0;         // starts within 1e-6 (relative) of the best
  int restarts = 0;
  std::string provenance = "numeric";
};

/// Best-effort estimate of sup Ent_mu(g^2) / <-A g, g> over ||g||_{L2(mu)} = 1,
/// by multi-start projected gradient ascent (32 starts, tolerance 1e-8).
/// Floored at 2 alpha, the value approached as g tends to a constant.
LogSobolevEstimate log_sobolev_constant_numeric(const GeneratorMatrix& a,
                                                const StationaryMeasure& mu,
                                                std::uint64_t seed = 0x5eedULL);

HarrisRate harris_xi(const HarrisParams& p);

/// One decay series (t, ||P_t f - mu[f]||_2) per observable.
using DecaySeries = std::vector<std::pair<double, double>>;

/// alpha = 1 / (smallest least-squares decay rate over the observables).
double poincare_from_decay(const std::vector<DecaySeries>& series);

/// beta = 3 alpha + 1 / ((1 + alpha |C|) pi e^2).
double carlen_loss_beta(double alpha, double c);

enum class HessianConvention { Poincare, LogSobolev };

/// Constants from a lower bound m on the Hessian of the potential.
FunctionalConstants hessian_constants(double hessian_lower_bound, HessianConvention convention);

}  // namespace markov_uq
