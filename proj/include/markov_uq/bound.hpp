#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "markov_uq/divergence.hpp"
#include "markov_uq/rel_entropy.hpp"
#include "markov_uq/spectral.hpp"

namespace markov_uq {

enum class Method { Auto, Poincare, Reversible, Liapunov, LogSobolev, FSobolev, Kappa };

std::string_view to_string(Method m);
/// Throws OutOfRange for unknown names.
Method parse_method(std::string_view name);

struct BoundOptions {
  Method method = Method::Auto;
  std::optional<LiapunovData> liapunov;
  std::optional<double> liapunov_alpha;  // Poincare constant paired with the Liapunov data
  std::optional<double> beta;            // log-Sobolev constant; numeric estimate when absent
  std::optional<FSobolevFunction> f_sobolev;
  std::uint64_t seed = 0x5eedULL;        // for the numeric log-Sobolev estimate
};

/// Certified two-sided bound on the bias of ergodic averages of f.
struct UqBoundReport {
  std::string method;
  double eta = 0.0;
  std::string eta_source;  // override | exact-formula | monte-carlo | taylor-bound
  std::optional<double> horizon;
  std::optional<EntropyRate> entropy;
  XiResult xi_plus;
  XiResult xi_minus;
  // Constants that entered the Lambda bound.
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> sigma2;
  std::optional<double> m_plus;
  std::optional<double> m_minus;
  std::string constants_provenance;
  double mean = 0.0;
  double variance = 0.0;
};

/// Resolves the method and assembles Xi+- at the given eta. Throws
/// NoApplicableMethod when the requested method's preconditions fail.
UqBoundReport assemble_bound(const GeneratorMatrix& a, const StationaryMeasure& mu,
                             const Observable& f, double eta, const BoundOptions& options = {});

/// eta = rate.rate + rate.initial_term / horizon.
UqBoundReport assemble_bound(const GeneratorMatrix& a, const StationaryMeasure& mu,
                             const Observable& f, const EntropyRate& rate, double horizon,
                             const BoundOptions& options = {});

/// Re-evaluates Xi+- of an assembled report at another eta (for sweeps).
UqBoundReport with_eta(const GeneratorMatrix& a, const StationaryMeasure& mu, const Observable& f,
                       const UqBoundReport& report, double eta, const BoundOptions& options = {});

}  // namespace markov_uq
