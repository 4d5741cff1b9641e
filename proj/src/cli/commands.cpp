#include "markov_uq/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "markov_uq/cli/model_ref.hpp"
#include "markov_uq/rel_entropy.hpp"

namespace markov_uq::cli {

namespace {

struct RunConfig {
  std::string command;
  std::string model;
  std::string alt_model;
  std::string observable;
  std::string method = "auto";
  std::optional<double> eta;
  std::optional<double> horizon;
  double dt = 0.01;
  std::size_t paths = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::optional<double> beta;
  std::string out;
  std::string csv;
  std::string sweep;  // eta | T
  std::vector<double> grid;
  std::string config;
};

// Usage problems share the model-error exit code.
[[noreturn]] void usage(const std::string& msg) { throw Error(ErrorKind::InvalidModel, msg); }

std::uint64_t default_seed() {
  if (const char* s = std::getenv("MARKOV_UQ_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      usage("MARKOV_UQ_SEED is not an unsigned integer: '" + std::string(s) + "'");
    }
  }
  return 1;
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--model", c.model, "zoo string, inline JSON or model file");
  sub->add_option("--alt-model", c.alt_model, "alternative model, or perturb:eps=0.1");
  sub->add_option("--observable", c.observable, "inline JSON, file, index or indicator:k");
  sub->add_option("--method", c.method,
                  "auto|poincare|reversible|liapunov|log-sobolev|f-sobolev|kappa");
  sub->add_option("--eta", c.eta, "relative-entropy rate override");
  sub->add_option("--T", c.horizon, "time horizon");
  sub->add_option("--dt", c.dt, "Euler-Maruyama step");
  sub->add_option("--paths", c.paths, "Monte Carlo paths");
  sub->add_option("--seed", c.seed, "master seed (default MARKOV_UQ_SEED or 1)");
  sub->add_option("--threads", c.threads, "worker cap (0 = all cores)");
  sub->add_option("--beta", c.beta, "log-Sobolev constant for log-sobolev / f-sobolev");
  sub->add_option("--out", c.out, "write the JSON report here instead of stdout");
  sub->add_option("--csv", c.csv, "write a CSV sweep or per-path table here");
  sub->add_option("--sweep", c.sweep, "eta|T grid for bound CSV output")
      ->check(CLI::IsMember({"eta", "T"}));
  sub->add_option("--grid", c.grid, "sweep values")->delimiter(',');
  sub->add_option("--config", c.config, "JSON file with the same keys as the flags");
}

// Config-file values apply only where the flag was not given.
void apply_config(CLI::App* sub, RunConfig& c) {
  if (c.config.empty()) return;
  const Json j = parse_json(read_file(c.config), c.config);
  if (!j.is_object()) usage(c.config + ": config must be a JSON object");
  auto given = [&](const char* flag) { return sub->count(flag) > 0; };
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "model" && !given("--model")) c.model = value.is_string() ? value.get<std::string>() : value.dump();
      else if ((key == "alt-model" || key == "alt_model") && !given("--alt-model")) c.alt_model = value.is_string() ? value.get<std::string>() : value.dump();
      else if (key == "observable" && !given("--observable")) c.observable = value.is_string() ? value.get<std::string>() : value.dump();
      else if (key == "method" && !given("--method")) c.method = value.get<std::string>();
      else if (key == "eta" && !given("--eta")) c.eta = value.get<double>();
      else if (key == "T" && !given("--T")) c.horizon = value.get<double>();
      else if (key == "dt" && !given("--dt")) c.dt = value.get<double>();
      else if (key == "paths" && !given("--paths")) c.paths = value.get<std::size_t>();
      else if (key == "seed" && !given("--seed")) c.seed = value.get<std::uint64_t>();
      else if (key == "threads" && !given("--threads")) c.threads = value.get<unsigned>();
      else if (key == "beta" && !given("--beta")) c.beta = value.get<double>();
      else if (key == "out" && !given("--out")) c.out = value.get<std::string>();
      else if (key == "csv" && !given("--csv")) c.csv = value.get<std::string>();
      else if (key == "sweep" && !given("--sweep")) c.sweep = value.get<std::string>();
      else if (key == "grid" && !given("--grid")) c.grid = value.get<std::vector<double>>();
      else if (key != "model" && key != "alt-model" && key != "alt_model" && key != "observable" &&
               key != "method" && key != "eta" && key != "T" && key != "dt" && key != "paths" &&
               key != "seed" && key != "threads" && key != "beta" && key != "out" &&
               key != "csv" && key != "sweep" && key != "grid") {
        usage(c.config + ": unknown key \"" + key + "\"");
      }
    } catch (const nlohmann::json::exception& e) {
      usage(c.config + ": key \"" + key + "\" has the wrong type");
    }
  }
}

void emit(const RunConfig& c, const Json& report, std::ostream& out) {
  const std::string text = report.dump(2) + "\n";
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) usage("cannot write '" + c.out + "'");
  f << text;
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) usage("cannot write '" + path + "'");
  return f;
}

Observable centred(const ResolvedModel& m, const std::string& ref) {
  return center_observable(resolve_observable(ref, m), *m.mu);
}

BoundOptions bound_options(const RunConfig& c, const ResolvedModel& m) {
  BoundOptions o;
  o.method = parse_method(c.method);
  o.liapunov = m.liapunov;
  if (m.liapunov && m.analytic) o.liapunov_alpha = m.analytic->poincare_alpha;
  o.beta = c.beta;
  if (c.beta) o.f_sobolev = FSobolevFunction::scaled_log(*c.beta);
  o.seed = c.seed;
  return o;
}

// Entropy rate of the alternative, started from its own stationary law.
EntropyRate finite_rate(const ResolvedModel& base, const ResolvedModel& alt) {
  if (base.kernel && alt.kernel) {
    return dtmc_relent_rate(*alt.kernel, *base.kernel, *alt.kernel_mu, *base.kernel_mu);
  }
  return ctmc_relent_rate(*alt.generator, *base.generator, *alt.mu, *base.mu);
}

Json model_header(const ResolvedModel& m) {
  Json j;
  j["model"] = m.ref;
  j["kind"] = m.kind;
  if (m.finite()) j["states"] = m.generator->size();
  return j;
}

int cmd_constants(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve_model(c.model);
  Json j = model_header(m);
  if (!m.finite()) {
    const LangevinModel& lm = *m.langevin;
    j["alpha"] = lm.poincare->poincare_alpha;
    j["beta"] = *lm.log_sobolev->log_sobolev_beta;
    j["provenance"] = "analytic";
    emit(c, j, out);
    return kOk;
  }
  const FunctionalConstants fc = poincare_constant(*m.generator, *m.mu);
  j["reversible"] = fc.reversible;
  j["alpha"] = fc.poincare_alpha;
  j["provenance"] = fc.provenance;
  if (c.beta) {
    j["beta"] = *c.beta;
    j["beta_provenance"] = "user";
  } else if (fc.reversible && m.generator->size() <= 64) {
    j["beta"] = log_sobolev_constant_numeric(*m.generator, *m.mu, c.seed).beta;
    j["beta_provenance"] = "numeric";
  } else {
    j["beta"] = nullptr;
    j["beta_provenance"] = nullptr;
  }
  j["analytic"] = m.analytic ? to_json(*m.analytic) : Json(nullptr);
  if (!c.observable.empty() || m.default_observable) {
    const Observable f = centred(m, c.observable);
    const BernsteinParams p = poincare_bernstein_params(*m.generator, f, *m.mu);
    j["mean"] = f.mean;
    j["variance"] = f.variance;
    j["sigma2_poincare"] = p.sigma2;
    j["sigma2_asymptotic"] =
        fc.reversible ? Json(asymptotic_variance(*m.generator, f, *m.mu)) : Json(nullptr);
    j["m_plus"] = p.m_plus;
    j["m_minus"] = p.m_minus;
  }
  emit(c, j, out);
  return kOk;
}

int cmd_bound(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve_model(c.model);
  if (!m.finite()) usage("bound: needs a finite model");
  if (c.eta && !c.alt_model.empty()) usage("--eta and --alt-model are mutually exclusive");
  if (!c.eta && c.alt_model.empty()) usage("bound: give --eta or --alt-model");
  const Observable f = centred(m, c.observable);
  const BoundOptions opts = bound_options(c, m);

  std::optional<EntropyRate> rate;
  UqBoundReport report;
  if (c.eta) {
    report = assemble_bound(*m.generator, *m.mu, f, *c.eta, opts);
  } else {
    rate = finite_rate(m, resolve_alt(c.alt_model, m, c.seed));
    if (c.horizon) {
      report = assemble_bound(*m.generator, *m.mu, f, *rate, *c.horizon, opts);
    } else {
      report = assemble_bound(*m.generator, *m.mu, f, rate->rate, opts);
      report.eta_source = rate->estimator;
      report.entropy = rate;
    }
  }
  Json j = model_header(m);
  j["bound"] = to_json(report);

  if (!c.csv.empty()) {
    const std::string sweep = c.sweep.empty() ? "eta" : c.sweep;
    std::vector<double> grid = c.grid;
    if (grid.empty()) {
      for (int k = 0; k <= 24; ++k) {
        grid.push_back(sweep == "eta" ? std::pow(10.0, -4.0 + k / 6.0)
                                      : std::pow(10.0, k / 6.0));
      }
    }
    std::sort(grid.begin(), grid.end());
    std::ofstream csv = open_csv(c.csv);
    if (sweep == "eta") {
      csv << "eta,xi_plus,xi_minus,method\n";
      for (double e : grid) {
        const UqBoundReport r = with_eta(*m.generator, *m.mu, f, report, e, opts);
        csv << format_double(e) << ',' << format_double(r.xi_plus.value) << ','
            << format_double(r.xi_minus.value) << ',' << r.method << '\n';
      }
    } else {
      if (!rate) usage("--sweep T needs --alt-model so that eta depends on T");
      csv << "T,eta,xi_plus,xi_minus,method\n";
      for (double t : grid) {
        if (!(t > 0.0)) usage("T grid values must be positive");
        const UqBoundReport r = with_eta(*m.generator, *m.mu, f, report, rate->eta(t), opts);
        csv << format_double(t) << ',' << format_double(r.eta) << ','
            << format_double(r.xi_plus.value) << ',' << format_double(r.xi_minus.value) << ','
            << r.method << '\n';
      }
    }
  }
  emit(c, j, out);
  return kOk;
}

int cmd_relent(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve_model(c.model);
  Json j = model_header(m);
  if (m.finite()) {
    if (c.alt_model.empty()) usage("relent: give --alt-model");
    const EntropyRate r = finite_rate(m, resolve_alt(c.alt_model, m, c.seed));
    j["entropy"] = to_json(r);
    j["eta"] = c.horizon ? Json(r.eta(*c.horizon)) : Json(r.rate);
    emit(c, j, out);
    return kOk;
  }
  const SdeModel& sde = m.langevin->sde;
  const double horizon = c.horizon.value_or(10.0);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / c.dt));
  if (steps == 0 || std::abs(steps * c.dt - horizon) > 1e-9 * horizon) {
    usage("relent: T must be a positive multiple of dt");
  }
  const EmScheme scheme{c.dt, steps};
  const McOptions mc{c.paths, c.seed, c.threads};
  const InitialSampler init = gaussian_sampler(sde.dimension, 0.5);
  j["dt"] = c.dt;
  j["T"] = horizon;
  if (!c.alt_model.empty()) {
    auto [name, kv] = split_ref(c.alt_model);
    if (name != "perturb") usage("relent: SDE alternatives are given as perturb:eps=...");
    const double eps = kv.count("eps") ? std::stod(kv.at("eps")) : 0.1;
    SdeModel alt = sde;
    alt.drift = [b = sde.drift, eps](const Vector& x) -> Vector { return b(x) + eps * x; };
    const DriftFn beta = [eps](const Vector& x) -> Vector { return eps * x; };
    j["girsanov"] = to_json(girsanov_rate_mc(beta, alt, init, scheme, mc));
  } else {
    j["em_rate"] = to_json(em_relent_rate(sde.drift, init, scheme, mc));
    j["taylor_bound"] =
        to_json(em_relent_taylor_bound(sde.drift, sde.jacobian, 0.0, 1.0, init, scheme, mc));
  }
  emit(c, j, out);
  return kOk;
}

int cmd_validate(const RunConfig& c, std::ostream& out) {
  const ResolvedModel m = resolve_model(c.model);
  if (!m.finite()) usage("validate: needs a finite model");
  if (c.eta) usage("validate: eta comes from the alternative model; drop --eta");
  const ResolvedModel alt = c.alt_model.empty() ? m : resolve_alt(c.alt_model, m, c.seed);
  const Observable f = centred(m, c.observable);
  const double horizon = c.horizon.value_or(1000.0);
  EntropyRate rate = finite_rate(m, alt);
  const UqBoundReport bound =
      assemble_bound(*m.generator, *m.mu, f, rate, horizon, bound_options(c, m));
  const ValidationReport v = validate_bound(f, *alt.generator, alt.mu->weights(), horizon,
                                            c.paths, c.seed, bound, c.threads, !c.csv.empty());
  Json j = model_header(m);
  j["alt_model"] = c.alt_model.empty() ? m.ref : c.alt_model;
  j["seed"] = c.seed;
  j["bound"] = to_json(bound);
  j["validation"] = to_json(v);
  j["exact_bias"] = alt.mu->expectation(f.values) - f.mean;
  if (!c.csv.empty()) {
    std::ofstream csv = open_csv(c.csv);
    csv << "path,average\n";
    for (std::size_t i = 0; i < v.per_path.size(); ++i) {
      csv << i << ',' << format_double(v.per_path[i]) << '\n';
    }
  }
  emit(c, j, out);
  switch (v.verdict) {
    case Verdict::Pass: return kOk;
    case Verdict::Fail: return kValidationFail;
    case Verdict::Inconclusive: return kValidationInconclusive;
  }
  return kValidationInconclusive;
}

int exit_code_for(const Error& e) {
  if (e.kind() == ErrorKind::NoApplicableMethod) return kNoMethod;
  return is_model_error(e.kind()) ? kModelError : kNumericError;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified bias bounds for ergodic averages of perturbed Markov models"};
  app.name("markov-uq");
  app.require_subcommand(1);
  RunConfig c;
  c.seed = 1;
  std::vector<CLI::App*> subs;
  for (const char* name : {"constants", "bound", "relent", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, c);
    subs.push_back(sub);
  }
  app.add_subcommand("zoo-list", "list built-in models");

  try {
    c.seed = default_seed();
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "markov-uq: " << e.what() << "\n";
    return kModelError;
  } catch (const Error& e) {
    err << "markov-uq: " << e.what() << "\n";
    return exit_code_for(e);
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    c.command = sub->get_name();
    if (c.command == "zoo-list") {
      out << zoo_listing().dump(2) << "\n";
      return kOk;
    }
    apply_config(sub, c);
    if (c.model.empty()) usage(c.command + ": --model is required");
    if (c.command == "constants") return cmd_constants(c, out);
    if (c.command == "bound") return cmd_bound(c, out);
    if (c.command == "relent") return cmd_relent(c, out);
    return cmd_validate(c, out);
  } catch (const Error& e) {
    err << "markov-uq: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "markov-uq: " << e.what() << "\n";
    return kNumericError;
  }
}

}  // namespace markov_uq::cli
