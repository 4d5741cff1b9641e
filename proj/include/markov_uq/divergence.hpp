#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>

#include "markov_uq/chain_core.hpp"

namespace markov_uq {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class LambdaKind { EmpiricalCgf, Bernstein, LogSobolev, FSobolev, Kappa };

std::string_view to_string(LambdaKind kind);

/// A bound Lambda(c) on a (time-normalised) cumulant generating function.
/// Finite on the open interval (c_minus, c_plus), +inf outside it.
struct LambdaFunction {
  std::function<double(double)> evaluator;
  double c_minus = -kInfinity;
  double c_plus = kInfinity;
  LambdaKind kind = LambdaKind::EmpiricalCgf;

  double operator()(double c) const;
};

enum class Sign { Plus, Minus };

enum class Boundary { Interior, AtZero, AtCap };

struct XiResult {
  double value = 0.0;
  std::optional<double> minimizer_c;  // empty when the infimum sits on a boundary
  Boundary boundary = Boundary::Interior;
  std::string method;
};

/// log E_p[exp(c f)], log-sum-exp shifted. Exactly 0 at c = 0.
double cgf(const Vector& p, const Vector& f, double c);

/// KL divergence R(p_tilde || p) with 0 log 0 = 0; +inf off absolute continuity.
double relative_entropy(const Vector& p_tilde, const Vector& p);

/// inf_{c>0} (Lambda(+-c) + eta) / c.
///
/// Scans a log-spaced grid over (1e-12, c_cap) and refines the best cell by
/// golden-section search in log c. c_cap is the singularity of Lambda on the
/// requested side, or 1e8 when Lambda is finite everywhere. The objective is
/// quasi-convex because Lambda is convex with Lambda(0) = 0, so the grid
/// minimum brackets the infimum. When the infimum is approached at either end
/// of the range the result is flagged and its value is the objective at that
/// end, which never undercuts the true infimum.
XiResult xi_infimum(const LambdaFunction& lambda, double eta, Sign sign);

/// sqrt(2 sigma2 eta) + M eta, the closed form for a Bernstein-type Lambda.
double bernstein_xi(double sigma2, double m, double eta);

/// sqrt(2 variance eta), the small-eta leading term.
double linearized_xi(double variance, double eta);

/// p^c_i proportional to p_i exp(c f_i).
Vector tilted_measure(const Vector& p, const Vector& f, double c);

/// The c >= 0 at which R(p^c || p) = eta, found by bisection on the monotone
/// map c -> R(p^c || p). Throws EtaUnreachable when eta is at or above
/// sup_c R(p^c || p) = -log p(argmax f), ConstantObservable when f is constant
/// on the support of p.
double solve_tilt_level(const Vector& p, const Vector& f, double eta);

/// Centred empirical CGF c -> log E_p[exp(c (f - E_p f))].
LambdaFunction empirical_cgf_lambda(const Vector& p, const Vector& f);

/// c -> sigma2 c^2 / (2 (1 - |c| M)), M = m_plus for c > 0 and m_minus for c < 0.
LambdaFunction bernstein_lambda(double sigma2, double m_plus, double m_minus);

/// Throws unless p is a nonnegative vector summing to 1 (tolerance 1e-10).
void require_probability_vector(const Vector& p, const char* what);

}  // namespace markov_uq
