#include "markov_uq/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace markov_uq {

namespace {

[[noreturn]] void schema_error(std::string_view source, const std::string& msg) {
  throw Error(ErrorKind::InvalidModel, std::string(source) + ": " + msg);
}

Matrix matrix_from_json(const Json& j, std::string_view source) {
  if (!j.is_array() || j.empty()) schema_error(source, "\"matrix\" must be a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) {
      schema_error(source, "row " + std::to_string(i) + " of \"matrix\" must have " +
                               std::to_string(n) + " entries");
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      const Json& v = row[static_cast<std::size_t>(k)];
      if (!v.is_number()) {
        schema_error(source, "matrix[" + std::to_string(i) + "][" + std::to_string(k) +
                                 "] is not a number");
      }
      m(i, k) = v.get<double>();
    }
  }
  return m;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json parse_json(std::string_view text, std::string_view source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < upto; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    const auto cut = what.find("syntax error");
    if (cut != std::string::npos) what = what.substr(cut);
    throw Error(ErrorKind::InvalidModel, std::string(source) + ":" + std::to_string(line) + ":" +
                                             std::to_string(col) + ": " + what);
  }
}

FiniteModel model_from_json(const Json& j, std::string_view source) {
  if (!j.is_object()) schema_error(source, "model must be a JSON object");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    schema_error(source, "missing string field \"kind\" (\"ctmc\" or \"dtmc\")");
  }
  if (!j.contains("matrix")) schema_error(source, "missing field \"matrix\"");
  Matrix m = matrix_from_json(j["matrix"], source);
  std::vector<std::string> states;
  if (j.contains("states")) {
    const Json& s = j["states"];
    if (!s.is_array() || static_cast<Eigen::Index>(s.size()) != m.rows()) {
      schema_error(source, "\"states\" must list one label per matrix row");
    }
    for (const Json& label : s) {
      states.push_back(label.is_string() ? label.get<std::string>() : label.dump());
    }
  }
  const std::string kind = j["kind"].get<std::string>();
  FiniteModel out;
  if (kind == "ctmc") {
    out.ctmc.emplace(std::move(m), std::move(states));
  } else if (kind == "dtmc") {
    out.dtmc.emplace(std::move(m), std::move(states));
  } else {
    schema_error(source, "\"kind\" must be \"ctmc\" or \"dtmc\", got \"" + kind + "\"");
  }
  return out;
}

Json model_to_json(const FiniteModel& m) {
  const Matrix& mat = m.ctmc ? m.ctmc->rates() : m.dtmc->probabilities();
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < mat.cols(); ++k) row.push_back(mat(i, k));
    rows.push_back(std::move(row));
  }
  return Json{{"kind", m.is_ctmc() ? "ctmc" : "dtmc"}, {"states", m.states()}, {"matrix", rows}};
}

Vector observable_from_json(const Json& j, std::string_view source) {
  const Json* values = &j;
  if (j.is_object()) {
    if (!j.contains("values")) schema_error(source, "missing field \"values\"");
    values = &j["values"];
  }
  if (!values->is_array() || values->empty()) {
    schema_error(source, "\"values\" must be a non-empty array of numbers");
  }
  Vector out(static_cast<Eigen::Index>(values->size()));
  for (std::size_t i = 0; i < values->size(); ++i) {
    if (!(*values)[i].is_number()) {
      schema_error(source, "values[" + std::to_string(i) + "] is not a number");
    }
    out(static_cast<Eigen::Index>(i)) = (*values)[i].get<double>();
  }
  return out;
}

Graph graph_from_json(const Json& j, std::string_view source) {
  if (!j.is_object() || !j.contains("n") || !j["n"].is_number_unsigned()) {
    schema_error(source, "graph needs a nonnegative integer field \"n\"");
  }
  if (!j.contains("edges") || !j["edges"].is_array()) {
    schema_error(source, "graph needs an array field \"edges\"");
  }
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (const Json& e : j["edges"]) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
      schema_error(source, "each edge must be a pair of vertex indices");
    }
    edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  return Graph::from_edges(j["n"].get<std::size_t>(), edges, std::string(source));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::InvalidModel, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json to_json(const XiResult& xi) {
  Json j;
  j["value"] = xi.value;
  j["c"] = xi.minimizer_c ? Json(*xi.minimizer_c) : Json("boundary");
  j["method"] = xi.method;
  return j;
}

Json to_json(const FunctionalConstants& c) {
  Json j;
  j["alpha"] = c.poincare_alpha;
  j["beta"] = optional_number(c.log_sobolev_beta);
  j["provenance"] = c.provenance;
  return j;
}

Json to_json(const EntropyRate& r) {
  Json j;
  j["rate"] = r.rate;
  j["initial_term"] = r.initial_term;
  j["std_error"] = r.std_error;
  j["estimator"] = r.estimator;
  return j;
}

Json to_json(const ValidationReport& v) {
  Json j;
  j["certified_bound_plus"] = v.bound_plus;
  j["certified_bound_minus"] = v.bound_minus;
  j["empirical_bias"] = v.empirical_bias;
  j["empirical_std_error"] = v.std_error;
  j["base_mean"] = v.base_mean;
  j["n_paths"] = v.n_paths;
  j["T"] = v.horizon;
  j["verdict"] = std::string(to_string(v.verdict));
  return j;
}

Json to_json(const UqBoundReport& b) {
  Json j;
  j["method"] = b.method;
  j["eta"] = b.eta;
  j["eta_source"] = b.eta_source;
  j["T"] = optional_number(b.horizon);
  j["entropy"] = b.entropy ? to_json(*b.entropy) : Json(nullptr);
  j["xi_plus"] = to_json(b.xi_plus);
  j["xi_minus"] = to_json(b.xi_minus);
  Json params;
  params["alpha"] = optional_number(b.alpha);
  params["beta"] = optional_number(b.beta);
  params["sigma2"] = optional_number(b.sigma2);
  params["m_plus"] = optional_number(b.m_plus);
  params["m_minus"] = optional_number(b.m_minus);
  params["provenance"] = b.constants_provenance;
  j["lambda_params"] = std::move(params);
  j["mean"] = b.mean;
  j["variance"] = b.variance;
  return j;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace markov_uq
