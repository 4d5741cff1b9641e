#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "markov_uq/bound.hpp"
#include "markov_uq/validate.hpp"
#include "markov_uq/zoo.hpp"

namespace markov_uq {

using Json = nlohmann::ordered_json;

/// A finite model read from {"kind": "ctmc"|"dtmc", "states": [...], "matrix": [[...]]}.
struct FiniteModel {
  std::optional<GeneratorMatrix> ctmc;
  std::optional<TransitionKernel> dtmc;

  bool is_ctmc() const { return ctmc.has_value(); }
  std::size_t size() const { return ctmc ? ctmc->size() : dtmc->size(); }
  const std::vector<std::string>& states() const { return ctmc ? ctmc->states() : dtmc->states(); }
};

/// Parses JSON text; syntax errors become InvalidModel with "source:line:column".
Json parse_json(std::string_view text, std::string_view source);

FiniteModel model_from_json(const Json& j, std::string_view source);
Json model_to_json(const FiniteModel& m);

/// {"values": [...]}
Vector observable_from_json(const Json& j, std::string_view source);

/// {"n": 4, "edges": [[0,1], ...]}
Graph graph_from_json(const Json& j, std::string_view source);

std::string read_file(const std::string& path);

Json to_json(const XiResult& xi);
Json to_json(const FunctionalConstants& c);
Json to_json(const EntropyRate& r);
Json to_json(const ValidationReport& v);
Json to_json(const UqBoundReport& b);

/// Round-trip safe decimal: 17 significant digits.
std::string format_double(double x);

}  // namespace markov_uq
