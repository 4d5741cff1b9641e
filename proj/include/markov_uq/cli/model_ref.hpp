#pragma once

#include <map>
#include <optional>
#include <string>

#include "markov_uq/io.hpp"
#include "markov_uq/zoo.hpp"

namespace markov_uq::cli {

/// A model addressed on the command line, normalised for the pipelines:
/// discrete-time kernels are analysed through their uniformised generator P - I.
struct ResolvedModel {
  std::string ref;
  std::string kind;  // ctmc | dtmc | sde
  std::optional<GeneratorMatrix> generator;
  std::optional<TransitionKernel> kernel;
  std::optional<StationaryMeasure> mu;  // tied to `generator`
  std::optional<StationaryMeasure> kernel_mu;
  std::optional<FunctionalConstants> analytic;
  std::optional<double> analytic_sigma2;  // for the default observable
  std::optional<LiapunovData> liapunov;
  std::optional<Vector> default_observable;
  std::optional<LangevinModel> langevin;

  bool finite() const { return generator.has_value(); }
};

/// "name:k=v,k=v" -> (name, {k: v}).
std::pair<std::string, std::map<std::string, std::string>> split_ref(const std::string& ref);

/// Zoo string, inline JSON (starting with '{'), or a path to a JSON model file.
ResolvedModel resolve_model(const std::string& ref);

/// Like resolve_model, plus "perturb:eps=0.1[,seed=k]" relative to the base.
ResolvedModel resolve_alt(const std::string& ref, const ResolvedModel& base, std::uint64_t seed);

/// Inline JSON, a JSON file, "index" (state index), or "indicator:k".
/// Empty ref selects the model's default observable.
Vector resolve_observable(const std::string& ref, const ResolvedModel& model);

/// Names and parameter templates of the zoo, for zoo-list.
Json zoo_listing();

}  // namespace markov_uq::cli
