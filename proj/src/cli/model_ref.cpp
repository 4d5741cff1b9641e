#include "markov_uq/cli/model_ref.hpp"

#include <cmath>
#include <filesystem>
#include <set>

#include "markov_uq/simulate.hpp"
#include "markov_uq/validate.hpp"

namespace markov_uq::cli {

namespace {

[[noreturn]] void bad_ref(const std::string& ref, const std::string& why) {
  throw Error(ErrorKind::InvalidModel, "model '" + ref + "': " + why);
}

class Params {
 public:
  Params(std::string ref, std::map<std::string, std::string> kv)
      : ref_(std::move(ref)), kv_(std::move(kv)) {}

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    used_.insert(key);
    const auto it = kv_.find(key);
    if (it == kv_.end()) {
      if (!fallback) bad_ref(ref_, "missing parameter '" + key + "'");
      return *fallback;
    }
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      bad_ref(ref_, "parameter '" + key + "' is not a number: '" + it->second + "'");
    }
  }

  std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    const double v = number(key, fallback ? std::optional<double>(double(*fallback)) : std::nullopt);
    if (v < 0 || v != std::floor(v)) bad_ref(ref_, "parameter '" + key + "' must be a count");
    return static_cast<std::size_t>(v);
  }

  std::string text(const std::string& key, const std::string& fallback) {
    used_.insert(key);
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }

  void finish() const {
    for (const auto& [k, v] : kv_) {
      if (!used_.count(k)) bad_ref(ref_, "unknown parameter '" + k + "'");
    }
  }

 private:
  std::string ref_;
  std::map<std::string, std::string> kv_;
  std::set<std::string> used_;
};

void attach_kernel(ResolvedModel& m, TransitionKernel p, StationaryMeasure mu) {
  GeneratorMatrix q = uniformize(p, 1.0);
  m.mu = rebind(mu, q);
  m.generator = std::move(q);
  m.kernel_mu = std::move(mu);
  m.kernel = std::move(p);
  m.kind = "dtmc";
}

Graph named_graph(const std::string& name, const std::string& ref) {
  const auto dash = name.rfind('-');
  if (dash != std::string::npos) {
    const std::string family = name.substr(0, dash);
    const std::string size = name.substr(dash + 1);
    if ((family == "cycle" || family == "complete" || family == "path") && !size.empty() &&
        size.find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t n = std::stoul(size);
      if (family == "cycle") return Graph::cycle(n);
      if (family == "complete") return Graph::complete(n);
      return Graph::path(n);
    }
  }
  if (!std::filesystem::exists(name)) {
    bad_ref(ref, "graph '" + name + "' is neither cycle-N, complete-N, path-N nor a file");
  }
  return graph_from_json(parse_json(read_file(name), name), name);
}

ResolvedModel from_finite(const std::string& ref, FiniteModel fm) {
  ResolvedModel m;
  m.ref = ref;
  if (fm.ctmc) {
    m.kind = "ctmc";
    m.mu = invariant_measure(*fm.ctmc);
    m.generator = std::move(fm.ctmc);
  } else {
    StationaryMeasure mu = invariant_measure(*fm.dtmc);
    attach_kernel(m, std::move(*fm.dtmc), std::move(mu));
  }
  return m;
}

}  // namespace

std::pair<std::string, std::map<std::string, std::string>> split_ref(const std::string& ref) {
  const auto colon = ref.find(':');
  std::map<std::string, std::string> kv;
  if (colon == std::string::npos) return {ref, kv};
  const std::string name = ref.substr(0, colon);
  std::string rest = ref.substr(colon + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = rest.find(',', start);
    const std::string item = rest.substr(start, comma == std::string::npos ? std::string::npos
                                                                           : comma - start);
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) bad_ref(ref, "expected key=value, got '" + item + "'");
      kv[item.substr(0, eq)] = item.substr(eq + 1);
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return {name, kv};
}

ResolvedModel resolve_model(const std::string& ref) {
  if (ref.empty()) throw Error(ErrorKind::InvalidModel, "no model given");
  if (ref.front() == '{') return from_finite(ref, model_from_json(parse_json(ref, "<inline>"), "<inline>"));

  auto [name, kv] = split_ref(ref);
  Params params(ref, kv);
  ResolvedModel m;
  m.ref = ref;
  if (name == "two-state") {
    const double a = params.number("a", 1.0);
    const double b = params.number("b", 1.0);
    params.finish();
    m.kind = "ctmc";
    m.generator = two_state(a, b);
    m.mu = invariant_measure(*m.generator);
    m.default_observable = Vector::LinSpaced(2, 0.0, 1.0);
    return m;
  }
  if (name == "mminfty") {
    const double lam = params.number("lam", 1.0);
    const double rho = params.number("rho", 1.0);
    const double tol = params.number("mass_tol", 1e-12);
    const double kbar = params.number("kbar", 2.0);
    const std::size_t n_max =
        kv.count("N") ? params.count("N") : mminfty_min_truncation(lam, rho, tol);
    params.finish();
    MmInftyModel mm = mminfty_generator(lam, rho, n_max, tol);
    m.kind = "ctmc";
    m.liapunov = mm.liapunov(kbar);
    m.default_observable = mm.counting();
    m.analytic = FunctionalConstants{mm.pack.alpha, std::nullopt, true, "analytic"};
    m.analytic_sigma2 = mm.pack.sigma2_n;
    m.mu = std::move(mm.mu);
    m.generator = std::move(mm.q);
    return m;
  }
  if (name == "hypercube") {
    const std::size_t d = params.count("d", 3);
    params.finish();
    HypercubeModel h = hypercube_kernel(static_cast<int>(d));
    m.default_observable = h.weight();
    m.analytic = FunctionalConstants{h.alpha, std::nullopt, true, "analytic"};
    attach_kernel(m, std::move(h.p), std::move(h.mu));
    return m;
  }
  if (name == "exclusion") {
    const std::string graph = params.text("graph", "cycle-4");
    const std::size_t r = params.count("r", 1);
    params.finish();
    ExclusionModel ex = exclusion_chain({named_graph(graph, ref), r});
    m.default_observable = ex.occupation(0);
    m.analytic = ex.constants;
    attach_kernel(m, std::move(ex.p), std::move(ex.mu));
    return m;
  }
  if (name == "langevin") {
    const std::string v = params.text("V", "quadratic");
    const std::size_t n = params.count("n", 1);
    params.finish();
    if (v != "quadratic") bad_ref(ref, "only V=quadratic is built in");
    m.kind = "sde";
    m.langevin = langevin_quadratic(static_cast<int>(n));
    m.analytic = m.langevin->log_sobolev;
    return m;
  }
  if (kv.empty() && std::filesystem::exists(ref)) {
    return from_finite(ref, model_from_json(parse_json(read_file(ref), ref), ref));
  }
  bad_ref(ref, "not a zoo model, inline JSON or readable file");
}

ResolvedModel resolve_alt(const std::string& ref, const ResolvedModel& base, std::uint64_t seed) {
  auto [name, kv] = split_ref(ref);
  if (name != "perturb") {
    ResolvedModel alt = resolve_model(ref);
    if (!alt.finite() || !base.finite() || alt.generator->size() != base.generator->size()) {
      throw Error(ErrorKind::DimensionMismatch, "alternative model must match the base state space");
    }
    return alt;
  }
  if (!base.finite()) throw Error(ErrorKind::InvalidModel, "perturb: needs a finite base model");
  Params params(ref, kv);
  const double eps = params.number("eps", 0.1);
  const std::uint64_t s = kv.count("seed") ? params.count("seed") : seed;
  params.finish();
  ResolvedModel alt;
  alt.ref = ref;
  alt.kind = "ctmc";
  alt.generator = perturb_generator(*base.generator, eps, s);
  alt.mu = invariant_measure(*alt.generator);
  return alt;
}

Vector resolve_observable(const std::string& ref, const ResolvedModel& model) {
  if (!model.finite()) throw Error(ErrorKind::InvalidModel, "observables apply to finite models");
  const auto n = static_cast<Eigen::Index>(model.generator->size());
  Vector f;
  if (ref.empty()) {
    if (!model.default_observable) {
      throw Error(ErrorKind::InvalidModel, "model has no default observable; pass --observable");
    }
    f = *model.default_observable;
  } else if (ref == "index") {
    f = Vector::LinSpaced(n, 0.0, static_cast<double>(n - 1));
  } else if (ref.rfind("indicator:", 0) == 0) {
    const std::size_t k = std::stoul(ref.substr(10));
    if (static_cast<Eigen::Index>(k) >= n) throw Error(ErrorKind::DimensionMismatch, "indicator state out of range");
    f = Vector::Zero(n);
    f(static_cast<Eigen::Index>(k)) = 1.0;
  } else if (ref.front() == '{' || ref.front() == '[') {
    f = observable_from_json(parse_json(ref, "<inline observable>"), "<inline observable>");
  } else {
    f = observable_from_json(parse_json(read_file(ref), ref), ref);
  }
  if (f.size() != n) {
    throw Error(ErrorKind::DimensionMismatch, "observable has " + std::to_string(f.size()) +
                                                  " values, model has " + std::to_string(n) +
                                                  " states");
  }
  return f;
}

Json zoo_listing() {
  Json out = Json::array();
  out.push_back({{"name", "two-state"}, {"template", "two-state:a=1,b=1"}, {"kind", "ctmc"}});
  out.push_back({{"name", "mminfty"},
                 {"template", "mminfty:lam=1,rho=1,mass_tol=1e-12,kbar=2"},
                 {"optional", {"N (default: smallest truncation with tail mass below mass_tol)"}},
                 {"kind", "ctmc"}});
  out.push_back({{"name", "hypercube"}, {"template", "hypercube:d=3"}, {"kind", "dtmc"}});
  out.push_back({{"name", "exclusion"},
                 {"template", "exclusion:graph=cycle-4,r=1"},
                 {"graphs", {"cycle-N", "complete-N", "path-N", "<graph.json>"}},
                 {"kind", "dtmc"}});
  out.push_back({{"name", "langevin"}, {"template", "langevin:V=quadratic,n=1"}, {"kind", "sde"}});
  return out;
}

}  // namespace markov_uq::cli
