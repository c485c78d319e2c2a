#include "fdh/commands.hpp"

#include "fdh/bounds.hpp"
#include "fdh/conditions.hpp"
#include "fdh/error.hpp"
#include "fdh/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#ifndef FDH_VERSION
#define FDH_VERSION "0.0.0"
#endif

namespace fdh {

namespace {

Json vector_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number_json(v[i]));
  return out;
}

Json estimate_json(const Estimate& e) {
  return Json{{"mean", number_json(e.mean)},   {"stderr", number_json(e.std_error)}, {"n", e.n},
              {"ci95", {number_json(e.ci_lo), number_json(e.ci_hi)}}, {"blowups", e.blowups}};
}

Json log_estimate_json(const LogMeanEstimate& e) {
  return Json{{"log_mean", number_json(e.log_mean)},
              {"log_ci3", {number_json(e.log_lo), number_json(e.log_hi)}},
              {"n", e.n}};
}

Json bound_json(const BoundReport& b) {
  return Json{{"T", number_json(b.horizon)},
              {"p", number_json(b.p)},
              {"norm_x_h", number_json(b.norm_x_h)},
              {"norm_y_h", number_json(b.norm_y_h)},
              {"dist_h", number_json(b.dist_h)},
              {"lambda_T", number_json(b.lambda_T)},
              {"theta_int", number_json(b.theta_int)},
              {"g_int", number_json(b.g_int)},
              {"g_sq_int", number_json(b.g_sq_int)},
              {"term_norms", number_json(b.term_norms)},
              {"term_quadratic", number_json(b.term_quadratic)},
              {"term_sigma", number_json(b.term_sigma)},
              {"log_harnack_rhs", number_json(b.log_harnack_rhs)},
              {"harnack_rhs", number_json(b.harnack_rhs)}};
}

Json condition_json(const ConditionReport& r) {
  Json clauses = Json::array();
  for (const Clause& c : r.clauses) clauses.push_back({{"name", c.name}, {"holds", c.holds}, {"detail", c.detail}});
  Json values = Json::object();
  for (const auto& [k, v] : r.values) values[k] = number_json(v);
  Json out{{"check", r.check},   {"holds", r.holds},     {"xi_estimate", number_json(r.xi_estimate)},
           {"detail", r.detail}, {"clauses", clauses},   {"values", values}};
  if (r.witness) out["witness"] = vector_json(*r.witness);
  return out;
}

Json moment_json(const MomentCheck& c) {
  return Json{{"process", c.process},
              {"holds", c.holds},
              {"straddle", c.straddle},
              {"estimate", log_estimate_json(c.estimate)},
              {"log_bound", number_json(c.log_bound)}};
}

ResultRecord make_record(const ExperimentConfig& cfg, std::string_view command, Json outputs) {
  ResultRecord rec;
  rec.command = std::string(command);
  rec.inputs = inputs_echo(cfg.source);
  rec.outputs = std::move(outputs);
  rec.timestamp = report_timestamp();
  rec.seed = cfg.run.seed;
  rec.version = FDH_VERSION;
  rec.input_hash = git_blob_hash(rec.inputs.dump());
  return rec;
}

const SpectralModel& model_of(const ExperimentConfig& cfg) {
  if (!cfg.model) throw Error(Errc::SchemaError, "config has no model");
  return *cfg.model;
}

CommandResult cmd_bounds(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const BoundReport b = harnack_rhs(cfg.coeffs, model, cfg.run.T, cfg.p, cfg.x, cfg.y);
  Json out{{"bound", bound_json(b)}};
  if (cfg.coeffs.time_homogeneous()) {
    const HomogeneousConstants k = homogeneous_constants(cfg.coeffs, model, cfg.run.T);
    out["homogeneous"] = {{"lambda_T", number_json(k.lambda_T)},
                          {"theta", number_json(k.theta)},
                          {"g_int", number_json(k.g_int)},
                          {"g_sq_int", number_json(k.g_sq_int)}};
  }
  return {make_record(cfg, "bounds", out), 0, {}};
}

CommandResult cmd_conditions(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const ConditionsSpec& spec = cfg.conditions;
  Json reports = Json::array();
  bool all = true;
  for (const std::string& name : spec.checks) {
    ConditionReport r;
    if (name == "hs") {
      r = hs_check(model);
    } else if (name == "hs_asymptotic") {
      r = hs_check(spec.asymptotic);
    } else if (name == "norm_domination") {
      r = check_norm_domination_empirical(model, cfg.coeffs, spec.samples, spec.seed);
    } else if (name == "spectral") {
      r = check_spectral_criterion(spec.asymptotic);
    } else if (name == "dirichlet_example") {
      const DirichletExampleInput in = spec.dirichlet.value_or(DirichletExampleInput{});
      r = check_dirichlet_example(in, spec.dirichlet_model_sandwich ? &model : nullptr);
    } else if (name == "power_noise") {
      r = check_power_noise_example(spec.asymptotic);
    } else if (name == "fractional") {
      r = check_fractional_criterion(spec.asymptotic);
    } else if (name == "embedding") {
      r = check_embedding(model, cfg.coeffs, spec.samples, spec.seed);
    } else {
      throw Error(Errc::InvalidArgument, "unknown condition check " + name);
    }
    all = all && r.holds;
    reports.push_back(condition_json(r));
  }
  Json out{{"holds", all}, {"reports", reports}};
  return {make_record(cfg, "conditions", out), all ? 0 : 2, {}};
}

CommandResult cmd_simulate(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const auto ends = simulate_endpoints(model, cfg.coeffs, cfg.run, cfg.x);
  std::vector<char> ok(ends.size());
  std::vector<double> values(ends.size(), 0.0);
  Table table{"simulate_paths", simulate_columns(), {}};
  const double r1 = cfg.coeffs.r + 1.0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    ok[i] = ends[i].ok ? 1 : 0;
    const double nan = std::nan("");
    if (ends[i].ok) values[i] = cfg.f(model, ends[i].x);
    table.rows.push_back({static_cast<double>(i), ends[i].ok ? 1.0 : 0.0, ends[i].ok ? values[i] : nan,
                          ends[i].ok ? model.norm_h(ends[i].x) : nan,
                          ends[i].ok ? model.moment_lp(ends[i].x, r1) : nan});
  }
  const Estimate e = reduce_paths(cfg.run, ok, values);
  Json out{{"F", std::string(cfg.f.name())},
           {"estimate", estimate_json(e)},
           {"n_steps", step_count(cfg.run.T, cfg.run.dt)}};
  return {make_record(cfg, "simulate", out), 0, {std::move(table)}};
}

CommandResult cmd_couple(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const CoupledEnsemble ens = run_coupled(model, cfg.coeffs, cfg.run, cfg.x, cfg.y);
  Table paths{"couple_paths", couple_columns(), {}};
  std::vector<char> ok(ens.paths.size());
  std::vector<double> weights(ens.paths.size(), 0.0);
  std::int64_t coupled = 0;
  std::int64_t chain_violations = 0;
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    const CoupledOutcome& o = ens.paths[i];
    ok[i] = o.ok ? 1 : 0;
    if (o.ok) {
      weights[i] = std::exp(o.log_r);
      coupled += o.coupled ? 1 : 0;
      const double bound = holder_chain_bound(ens.schedule, o.f_int);
      if (o.zeta_sq_int > bound * (1.0 + 1e-6)) ++chain_violations;
    }
    paths.rows.push_back({static_cast<double>(i), o.coupled ? 1.0 : 0.0, o.tau, o.log_r, o.zeta_sq_int, o.f_int,
                          o.final_dist_h});
  }
  Table trace{"couple_trace", trace_columns(), {}};
  for (std::size_t k = 0; k < ens.traces.size(); ++k) {
    for (const StepTrace& s : ens.traces[k]) {
      trace.rows.push_back({static_cast<double>(k), s.t, s.dist_h, s.beta, s.zeta_sq});
    }
  }
  const std::int64_t kept = static_cast<std::int64_t>(ens.paths.size()) - ens.blowups;
  Json out{{"epsilon", number_json(ens.schedule.epsilon())},
           {"c", number_json(ens.schedule.c())},
           {"initial_dist_h", number_json(ens.schedule.initial_distance())},
           {"couple_tol", number_json(ens.schedule.couple_tol())},
           {"n_steps", ens.n_steps},
           {"coupled", coupled},
           {"coupled_fraction", number_json(kept > 0 ? static_cast<double>(coupled) / static_cast<double>(kept) : 0.0)},
           {"weight", estimate_json(reduce_paths(cfg.run, ok, weights))},
           {"holder_chain_violations", chain_violations},
           {"blowups", ens.blowups}};
  CommandResult res{make_record(cfg, "couple", out), 0, {std::move(paths)}};
  if (!ens.traces.empty()) res.tables.push_back(std::move(trace));
  return res;
}

CommandResult cmd_harnack(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const HarnackVerdict v = verify_harnack(model, cfg.coeffs, cfg.run, cfg.x, cfg.y, cfg.p, cfg.f, cfg.slack);
  Json out{{"holds", v.holds},
           {"p", number_json(v.p)},
           {"slack", number_json(v.slack)},
           {"F", std::string(cfg.f.name())},
           {"ptf_y", estimate_json(v.ptf_y)},
           {"ptf_p_x", estimate_json(v.ptf_p_x)},
           {"bound", bound_json(v.bound)},
           {"log_lhs_upper", number_json(v.log_lhs_upper)},
           {"log_rhs_lower", number_json(v.log_rhs_lower)}};
  return {make_record(cfg, "harnack-check", out), v.holds ? 0 : 2, {}};
}

CommandResult cmd_moments(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  std::optional<StateVector> y;
  if (cfg.source.contains("y")) y = cfg.y;
  const MomentVerdict v = verify_exponential_moments(model, cfg.coeffs, cfg.run, cfg.x, y);
  Json out{{"holds", v.holds},
           {"lambda_T", number_json(v.lambda_T)},
           {"theta_int", number_json(v.theta_int)},
           {"x", moment_json(v.x)}};
  if (v.y) out["y"] = moment_json(*v.y);
  return {make_record(cfg, "moments", out), v.holds ? 0 : 2, {}};
}

CommandResult cmd_invariant(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const InvariantReport rep = estimate_invariant(model, cfg.coeffs, cfg.run, cfg.x, cfg.eps0);
  Json out{{"eps0", number_json(rep.eps0)},
           {"samples", rep.samples.size()},
           {"samples_per_path", rep.samples_per_path},
           {"lp_moment", estimate_json(rep.lp_moment)},
           {"exp_h_r1", estimate_json(rep.exp_h_r1)},
           {"split_half", {{"even", number_json(rep.half_even)},
                           {"odd", number_json(rep.half_odd)},
                           {"rel_diff", number_json(rep.split_rel_diff)}}},
           {"finite", rep.finite},
           {"blowups", rep.blowups}};
  if (rep.exp_h_sq) out["exp_h_sq"] = estimate_json(*rep.exp_h_sq);
  const double horizon = cfg.run.T - cfg.run.burn_in;
  const DensityBound d = density_lp_bound(cfg.coeffs, model, horizon, cfg.p, cfg.x, rep.samples);
  out["density_bound"] = {{"p", number_json(cfg.p)},
                          {"T", number_json(horizon)},
                          {"log_integral", number_json(d.log_integral)},
                          {"log_bound", number_json(d.log_bound)},
                          {"bound", number_json(d.bound)},
                          {"samples", d.samples}};
  return {make_record(cfg, "invariant", out), rep.finite ? 0 : 2, {}};
}

CommandResult cmd_probe(const ExperimentConfig& cfg) {
  const SpectralModel& model = model_of(cfg);
  const FellerProbe probe = strong_feller_probe(model, cfg.coeffs, cfg.run, cfg.x, cfg.radii, cfg.f);
  Json diffs = Json::array();
  for (std::size_t j = 0; j < probe.radii.size(); ++j) {
    diffs.push_back({{"radius", number_json(probe.radii[j])}, {"difference", estimate_json(probe.differences[j])}});
  }
  Json out{{"F", std::string(cfg.f.name())}, {"base", estimate_json(probe.base)}, {"differences", diffs}};
  return {make_record(cfg, "probe-feller", out), 0, {}};
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"bounds",  "conditions", "simulate",  "couple",
                                              "harnack-check", "moments", "invariant", "probe-feller"};
  return names;
}

const std::vector<std::string>& couple_columns() {
  static const std::vector<std::string> cols{"path_index", "coupled", "tau_numeric", "log_R",
                                             "zeta_sq_int", "f_int",  "final_dist_h"};
  return cols;
}

const std::vector<std::string>& trace_columns() {
  static const std::vector<std::string> cols{"path_index", "t", "dist_h", "beta", "zeta_sq"};
  return cols;
}

const std::vector<std::string>& simulate_columns() {
  static const std::vector<std::string> cols{"path_index", "ok", "F", "norm_h", "moment_lp"};
  return cols;
}

Json inputs_echo(const Json& source) {
  Json echo = source;
  if (echo.is_object() && echo.contains("run") && echo["run"].is_object()) {
    echo["run"].erase("workers");
    echo["run"].erase("execution");
  }
  return echo;
}

CommandResult run_command(const ExperimentConfig& cfg, std::string_view command) {
  if (command == "bounds") return cmd_bounds(cfg);
  if (command == "conditions") return cmd_conditions(cfg);
  if (command == "simulate") return cmd_simulate(cfg);
  if (command == "couple") return cmd_couple(cfg);
  if (command == "harnack-check") return cmd_harnack(cfg);
  if (command == "moments") return cmd_moments(cfg);
  if (command == "invariant") return cmd_invariant(cfg);
  if (command == "probe-feller") return cmd_probe(cfg);
  throw Error(Errc::InvalidArgument, "unknown command \"" + std::string(command) + "\"");
}

}  // namespace fdh
