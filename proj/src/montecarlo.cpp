#include "fdh/montecarlo.hpp"

#include "fdh/error.hpp"
#include "fdh/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

namespace fdh {

TestFunction TestFunction::indicator_ball(StateVector center, double radius) {
  if (!(radius >= 0.0)) throw Error(Errc::InvalidArgument, "ball radius must be nonnegative");
  TestFunction f(Kind::IndicatorBall);
  f.center_ = std::move(center);
  f.radius_ = radius;
  return f;
}

double TestFunction::operator()(const SpectralModel& model, const StateVector& x) const {
  switch (kind_) {
    case Kind::One:
      return 1.0;
    case Kind::ExpNegHSq: {
      const double h = model.norm_h(x);
      return std::exp(-h * h);
    }
    case Kind::RationalH: {
      const double h = model.norm_h(x);
      return 1.0 / (1.0 + h * h);
    }
    case Kind::IndicatorBall:
      return model.norm_h(x - center_) <= radius_ ? 1.0 : 0.0;
  }
  return 0.0;
}

std::string_view TestFunction::name() const noexcept {
  switch (kind_) {
    case Kind::One:
      return "one";
    case Kind::ExpNegHSq:
      return "exp_neg_h_sq";
    case Kind::RationalH:
      return "rational_h";
    case Kind::IndicatorBall:
      return "indicator_ball";
  }
  return "";
}

std::optional<TestFunction::Kind> TestFunction::parse_kind(std::string_view name) noexcept {
  if (name == "one") return Kind::One;
  if (name == "exp_neg_h_sq") return Kind::ExpNegHSq;
  if (name == "rational_h") return Kind::RationalH;
  if (name == "indicator_ball") return Kind::IndicatorBall;
  return std::nullopt;
}

void EnsembleConfig::validate() const {
  if (n_paths < 2) throw Error(Errc::InvalidArgument, "n_paths must be at least 2");
  if (!(dt > 0.0)) throw Error(Errc::InvalidArgument, "dt must be positive");
  if (!(T > 0.0)) throw Error(Errc::ZeroHorizon, "time horizon must be positive");
  if (!(burn_in >= 0.0 && burn_in < T)) throw Error(Errc::InvalidArgument, "burn_in must lie in [0, T)");
  if (!(sample_interval >= 0.0)) throw Error(Errc::InvalidArgument, "sample_interval must be nonnegative");
  if (trace_paths < 0) throw Error(Errc::InvalidArgument, "trace_paths must be nonnegative");
  if (workers < 0) throw Error(Errc::InvalidArgument, "workers must be nonnegative");
}

StepConfig EnsembleConfig::step_config(std::uint64_t path_index) const {
  StepConfig s;
  s.dt = dt;
  s.scheme = scheme;
  s.rng_seed = seed;
  s.path_index = path_index;
  s.noise_scale = noise_scale;
  return s;
}

void for_each_path(const EnsembleConfig& cfg, std::int64_t n, const std::function<void(std::int64_t)>& work) {
  if (cfg.execution == Execution::Serial) {
    for (std::int64_t i = 0; i < n; ++i) work(i);
    return;
  }
  const int threads = cfg.workers > 0 ? cfg.workers : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      work(i);
    } catch (...) {
#pragma omp critical(fdh_path_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

bool is_blowup(const Error& e) { return e.code() == Errc::NonFiniteState; }

void enforce_blowup_limit(const EnsembleConfig& cfg, std::int64_t blowups, std::int64_t total) {
  if (static_cast<double>(blowups) > cfg.max_blowup_fraction * static_cast<double>(total)) {
    std::ostringstream os;
    os << blowups << " of " << total << " paths became non-finite; reduce dt";
    throw Error(Errc::BlowupLimitExceeded, os.str());
  }
}

std::int64_t count_failed(const std::vector<char>& ok) {
  return static_cast<std::int64_t>(std::count(ok.begin(), ok.end(), char{0}));
}

StateVector unit_h_direction(const SpectralModel& model) {
  StateVector e = model.eigenfunction(0);
  return e / model.norm_h(e);
}

double path_moment(const SpectralModel& model, const CoefficientSet& coeffs, const StateVector& x) {
  return model.moment_lp(x, coeffs.r + 1.0);
}

}  // namespace

std::vector<PathEnd> simulate_endpoints(const SpectralModel& model, const CoefficientSet& coeffs,
                                        const EnsembleConfig& cfg, const StateVector& x) {
  cfg.validate();
  const std::uint64_t n_steps = step_count(cfg.T, cfg.dt);
  std::vector<PathEnd> out(static_cast<std::size_t>(cfg.n_paths));
  for_each_path(cfg, cfg.n_paths, [&](std::int64_t i) {
    PathSimulator sim(model, coeffs, cfg.step_config(static_cast<std::uint64_t>(i)), x);
    PathEnd& slot = out[static_cast<std::size_t>(i)];
    try {
      for (std::uint64_t k = 0; k < n_steps; ++k) sim.advance();
      slot.ok = true;
      slot.x = sim.state();
    } catch (const Error& e) {
      if (!is_blowup(e)) throw;
      slot.ok = false;
    }
  });
  return out;
}

Estimate reduce_paths(const EnsembleConfig& cfg, const std::vector<char>& ok, const std::vector<double>& values) {
  const std::int64_t failed = count_failed(ok);
  enforce_blowup_limit(cfg, failed, static_cast<std::int64_t>(ok.size()));
  std::vector<double> kept;
  kept.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (ok[i]) kept.push_back(values[i]);
  }
  Estimate e = Estimate::from_samples(kept);
  e.blowups = failed;
  return e;
}

Estimate estimate_ptf(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                      const StateVector& x, const TestFunction& f) {
  const auto ends = simulate_endpoints(model, coeffs, cfg, x);
  std::vector<char> ok(ends.size());
  std::vector<double> values(ends.size(), 0.0);
  for (std::size_t i = 0; i < ends.size(); ++i) {
    ok[i] = ends[i].ok ? 1 : 0;
    if (ends[i].ok) values[i] = f(model, ends[i].x);
  }
  return reduce_paths(cfg, ok, values);
}

CoupledEnsemble run_coupled(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                            const StateVector& x, const StateVector& y, bool drift_enabled) {
  cfg.validate();
  CouplingSchedule schedule = make_schedule(model, coeffs, x, y, cfg.T, cfg.couple_tol_rel);
  if (!drift_enabled) schedule = schedule.without_drift();
  const std::uint64_t n_steps = step_count(cfg.T, cfg.dt);
  const std::int64_t n_traced = std::min(cfg.trace_paths, cfg.n_paths);

  std::vector<CoupledOutcome> paths(static_cast<std::size_t>(cfg.n_paths));
  std::vector<std::vector<StepTrace>> traces(static_cast<std::size_t>(n_traced));

  for_each_path(cfg, cfg.n_paths, [&](std::int64_t i) {
    const StepConfig sc = cfg.step_config(static_cast<std::uint64_t>(i));
    CoupledOutcome& out = paths[static_cast<std::size_t>(i)];
    std::vector<StepTrace>* trace = i < n_traced ? &traces[static_cast<std::size_t>(i)] : nullptr;
    if (trace) trace->reserve(n_steps);
    try {
      CoupledPathState state = CoupledPathState::start(x, y);
      double mx = path_moment(model, coeffs, state.x);
      double my = path_moment(model, coeffs, state.y);
      for (std::uint64_t k = 0; k < n_steps; ++k) {
        StepTrace st;
        state = step_pair(model, coeffs, schedule, sc, state, trace ? &st : nullptr);
        if (trace) trace->push_back(st);
        const double nx = path_moment(model, coeffs, state.x);
        const double ny = path_moment(model, coeffs, state.y);
        out.moment_int_x += 0.5 * cfg.dt * (mx + nx);
        out.moment_int_y += 0.5 * cfg.dt * (my + ny);
        mx = nx;
        my = ny;
      }
      out.ok = true;
      out.coupled = state.coupled;
      out.tau = state.coupled ? state.tau : std::numeric_limits<double>::quiet_NaN();
      out.log_r = log_girsanov_weight(state);
      out.zeta_sq_int = state.zeta_sq_int;
      out.f_int = state.f_int;
      out.final_dist_h = model.norm_h(state.x - state.y);
      out.x_T = std::move(state.x);
      out.y_T = std::move(state.y);
    } catch (const Error& e) {
      if (!is_blowup(e)) throw;
      out = CoupledOutcome{};
    }
  });

  CoupledEnsemble ens{schedule, n_steps, std::move(paths), std::move(traces), 0};
  std::int64_t failed = 0;
  for (const auto& p : ens.paths) failed += p.ok ? 0 : 1;
  ens.blowups = failed;
  enforce_blowup_limit(cfg, failed, cfg.n_paths);
  return ens;
}

Estimate estimate_weighted(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                           const StateVector& x, const StateVector& y, const TestFunction& f, double exponent) {
  const CoupledEnsemble ens = run_coupled(model, coeffs, cfg, x, y);
  std::vector<char> ok(ens.paths.size());
  std::vector<double> values(ens.paths.size(), 0.0);
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    const CoupledOutcome& o = ens.paths[i];
    ok[i] = o.ok ? 1 : 0;
    if (!o.ok) continue;
    const double weight = exponent == 0.0 ? 1.0 : std::exp(exponent * o.log_r);
    values[i] = weight * f(model, o.y_T);
  }
  return reduce_paths(cfg, ok, values);
}

HarnackVerdict verify_harnack(const SpectralModel& model, const CoefficientSet& coeffs, const EnsembleConfig& cfg,
                              const StateVector& x, const StateVector& y, double p, const TestFunction& f,
                              double slack) {
  if (!(p > 1.0)) throw Error(Errc::InvalidP, "p must exceed 1");
  HarnackVerdict v;
  v.p = p;
  v.slack = slack;
  v.bound = harnack_rhs(coeffs, model, cfg.T, p, x, y);

  const CoupledEnsemble ens = run_coupled(model, coeffs, cfg, x, y);
  std::vector<char> ok(ens.paths.size());
  std::vector<double> weighted(ens.paths.size(), 0.0);
  std::vector<double> powered(ens.paths.size(), 0.0);
  for (std::size_t i = 0; i < ens.paths.size(); ++i) {
    const CoupledOutcome& o = ens.paths[i];
    ok[i] = o.ok ? 1 : 0;
    if (!o.ok) continue;
    weighted[i] = std::exp(o.log_r) * f(model, o.y_T);
    powered[i] = std::pow(f(model, o.x_T), p);
  }
  v.ptf_y = reduce_paths(cfg, ok, weighted);
  v.ptf_p_x = reduce_paths(cfg, ok, powered);

  const double upper = std::max(v.ptf_y.ci_hi, 0.0);
  const double lower = v.ptf_p_x.ci_lo;
  v.log_lhs_upper = upper > 0.0 ? p * std::log(upper) : -std::numeric_limits<double>::infinity();
  v.log_rhs_lower = lower > 0.0 ? v.bound.log_harnack_rhs + std::log(lower) : -std::numeric_limits<double>::infinity();
  v.holds = v.log_lhs_upper <= v.log_rhs_lower + std::log1p(slack);
  return v;
}

namespace {

MomentCheck moment_check(std::string process, const std::vector<double>& logs, double log_bound) {
  MomentCheck c;
  c.process = std::move(process);
  c.estimate = LogMeanEstimate::from_log_samples(logs);
  c.log_bound = log_bound;
  c.holds = c.estimate.log_mean <= log_bound;
  const double band_lo = log_bound + std::log(0.95);
  const double band_hi = log_bound + std::log(1.05);
  c.straddle = c.estimate.log_lo <= band_hi && c.estimate.log_hi >= band_lo;
  return c;
}

}  // namespace

MomentVerdict verify_exponential_moments(const SpectralModel& model, const CoefficientSet& coeffs,
                                         const EnsembleConfig& cfg, const StateVector& x,
                                         const std::optional<StateVector>& y) {
  MomentVerdict v;
  v.lambda_T = lambda_T(coeffs, model, cfg.T);
  v.theta_int = theta_integral(coeffs, model, cfg.T);

  const StateVector y0 = y ? *y : x;
  const CoupledEnsemble ens = run_coupled(model, coeffs, cfg, x, y0);
  std::vector<double> lx;
  std::vector<double> ly;
  for (const CoupledOutcome& o : ens.paths) {
    if (!o.ok) continue;
    lx.push_back(v.lambda_T * o.moment_int_x);
    ly.push_back(v.lambda_T * o.moment_int_y);
  }
  const double nx = model.norm_h(x);
  v.x = moment_check("X", lx, v.theta_int + nx * nx);
  if (y) {
    const double ny = model.norm_h(*y);
    const double d = model.norm_h(x - *y);
    const double extra = d > 0.0 ? std::pow(d, 2.0 * (1.0 - ens.schedule.epsilon())) *
                                       ens.schedule.beta_sq_integral()
                                 : 0.0;
    v.y = moment_check("Y", ly, v.theta_int + ny * ny + extra);
  }
  v.holds = v.x.holds && (!v.y || v.y->holds);
  return v;
}

InvariantReport estimate_invariant(const SpectralModel& model, const CoefficientSet& coeffs,
                                   const EnsembleConfig& cfg, const StateVector& x0, double eps0) {
  cfg.validate();
  if (!coeffs.time_homogeneous()) {
    throw Error(Errc::NotTimeHomogeneous, "invariant measure needs time-independent coefficients");
  }
  const double gamma = coeffs.gamma.at(0.0);
  if (gamma > 0.0) throw Error(Errc::PositiveGamma, "invariant measure needs gamma <= 0");

  const std::uint64_t n_steps = step_count(cfg.T, cfg.dt);
  const std::uint64_t first = std::min<std::uint64_t>(step_count(std::max(cfg.burn_in, cfg.dt), cfg.dt), n_steps);
  const std::uint64_t first_kept = cfg.burn_in > 0.0 ? first : 1;
  const std::uint64_t stride =
      cfg.sample_interval > 0.0 ? std::max<std::uint64_t>(1, step_count(cfg.sample_interval, cfg.dt)) : 1;
  const std::uint64_t per_path = first_kept > n_steps ? 0 : (n_steps - first_kept) / stride + 1;
  if (per_path == 0) throw Error(Errc::EmptySample, "no samples left after burn-in");
  const double r1 = coeffs.r + 1.0;

  struct PathAverages {
    bool ok = false;
    double lp = 0.0;
    double er1 = 0.0;
    double esq = 0.0;
    std::vector<StateVector> kept;
  };
  std::vector<PathAverages> per(static_cast<std::size_t>(cfg.n_paths));

  for_each_path(cfg, cfg.n_paths, [&](std::int64_t i) {
    PathAverages& acc = per[static_cast<std::size_t>(i)];
    acc.kept.reserve(per_path);
    try {
      PathSimulator sim(model, coeffs, cfg.step_config(static_cast<std::uint64_t>(i)), x0);
      double lp = 0.0;
      double er1 = 0.0;
      double esq = 0.0;
      for (std::uint64_t k = 1; k <= n_steps; ++k) {
        sim.advance();
        if (k < first_kept || (k - first_kept) % stride != 0) continue;
        const StateVector& s = sim.state();
        const double h = model.norm_h(s);
        lp += model.moment_lp(s, r1);
        er1 += std::exp(eps0 * std::pow(h, r1));
        esq += std::exp(eps0 * h * h);
        acc.kept.push_back(s);
      }
      const double m = static_cast<double>(acc.kept.size());
      acc.lp = lp / m;
      acc.er1 = er1 / m;
      acc.esq = esq / m;
      acc.ok = true;
    } catch (const Error& e) {
      if (!is_blowup(e)) throw;
      acc = PathAverages{};
    }
  });

  std::vector<char> ok(per.size());
  std::vector<double> lp(per.size(), 0.0);
  std::vector<double> er1(per.size(), 0.0);
  std::vector<double> esq(per.size(), 0.0);
  std::vector<double> even;
  std::vector<double> odd;
  InvariantReport rep;
  rep.eps0 = eps0;
  rep.samples_per_path = static_cast<std::int64_t>(per_path);
  for (std::size_t i = 0; i < per.size(); ++i) {
    ok[i] = per[i].ok ? 1 : 0;
    if (!per[i].ok) continue;
    lp[i] = per[i].lp;
    er1[i] = per[i].er1;
    esq[i] = per[i].esq;
    (i % 2 == 0 ? even : odd).push_back(per[i].lp);
    for (auto& s : per[i].kept) rep.samples.push_back(std::move(s));
  }
  rep.lp_moment = reduce_paths(cfg, ok, lp);
  rep.exp_h_r1 = reduce_paths(cfg, ok, er1);
  if (gamma < 0.0) rep.exp_h_sq = reduce_paths(cfg, ok, esq);
  rep.blowups = rep.lp_moment.blowups;
  rep.half_even = even.empty() ? 0.0 : pairwise_sum(even) / static_cast<double>(even.size());
  rep.half_odd = odd.empty() ? 0.0 : pairwise_sum(odd) / static_cast<double>(odd.size());
  const double scale = std::max(std::abs(rep.half_even), std::abs(rep.half_odd));
  rep.split_rel_diff = scale > 0.0 ? std::abs(rep.half_even - rep.half_odd) / scale : 0.0;
  rep.finite = std::isfinite(rep.lp_moment.mean) && std::isfinite(rep.exp_h_r1.mean) &&
               (!rep.exp_h_sq || std::isfinite(rep.exp_h_sq->mean));
  return rep;
}

FellerProbe strong_feller_probe(const SpectralModel& model, const CoefficientSet& coeffs,
                                const EnsembleConfig& cfg, const StateVector& x, const std::vector<double>& radii,
                                const TestFunction& f) {
  cfg.validate();
  const std::uint64_t n_steps = step_count(cfg.T, cfg.dt);
  const StateVector dir = unit_h_direction(model);
  const std::size_t k = radii.size();
  const auto n = static_cast<std::size_t>(cfg.n_paths);
  std::vector<char> ok(n, 0);
  std::vector<double> base(n, 0.0);
  std::vector<std::vector<double>> diffs(k, std::vector<double>(n, 0.0));

  for_each_path(cfg, cfg.n_paths, [&](std::int64_t i) {
    const auto idx = static_cast<std::size_t>(i);
    const StepConfig sc = cfg.step_config(static_cast<std::uint64_t>(i));
    try {
      PathSimulator from_x(model, coeffs, sc, x);
      for (std::uint64_t s = 0; s < n_steps; ++s) from_x.advance();
      const double fx = f(model, from_x.state());
      std::vector<double> row(k, 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        if (radii[j] == 0.0) continue;
        PathSimulator from_y(model, coeffs, sc, x + radii[j] * dir);
        for (std::uint64_t s = 0; s < n_steps; ++s) from_y.advance();
        row[j] = f(model, from_y.state()) - fx;
      }
      base[idx] = fx;
      for (std::size_t j = 0; j < k; ++j) diffs[j][idx] = row[j];
      ok[idx] = 1;
    } catch (const Error& e) {
      if (!is_blowup(e)) throw;
    }
  });

  FellerProbe probe;
  probe.radii = radii;
  probe.base = reduce_paths(cfg, ok, base);
  for (std::size_t j = 0; j < k; ++j) probe.differences.push_back(reduce_paths(cfg, ok, diffs[j]));
  return probe;
}

ContractionCheck check_contraction(const SpectralModel& model, const CoefficientSet& coeffs,
                                   const EnsembleConfig& cfg, const StateVector& x, const StateVector& y) {
  cfg.validate();
  const std::uint64_t n_steps = step_count(cfg.T, cfg.dt);
  const double d0 = model.norm_h(x - y);
  // The contraction check turns the attraction drift off; coupling detection stays on.
  const CouplingSchedule schedule = make_schedule(model, coeffs, x, y, cfg.T, cfg.couple_tol_rel).without_drift();
  const auto n = static_cast<std::size_t>(cfg.n_paths);
  std::vector<char> ok(n, 0);
  std::vector<double> inc(n, -std::numeric_limits<double>::infinity());
  std::vector<double> growth(n, 0.0);

  for_each_path(cfg, cfg.n_paths, [&](std::int64_t i) {
    const auto idx = static_cast<std::size_t>(i);
    const StepConfig sc = cfg.step_config(static_cast<std::uint64_t>(i));
    try {
      CoupledPathState state = CoupledPathState::start(x, y);
      double prev = d0 * d0;
      double worst_inc = -std::numeric_limits<double>::infinity();
      double worst_growth = d0 > 0.0 ? 1.0 : 0.0;
      for (std::uint64_t s = 0; s < n_steps; ++s) {
        state = step_pair(model, coeffs, schedule, sc, state);
        const double g = coeffs.gamma.integral(0.0, state.t);
        const double dist = model.norm_h(state.x - state.y);
        const double cur = std::exp(-2.0 * g) * dist * dist;
        worst_inc = std::max(worst_inc, cur - prev);
        if (d0 > 0.0) worst_growth = std::max(worst_growth, cur / (d0 * d0));
        prev = cur;
      }
      inc[idx] = worst_inc;
      growth[idx] = worst_growth;
      ok[idx] = 1;
    } catch (const Error& e) {
      if (!is_blowup(e)) throw;
    }
  });

  ContractionCheck c;
  c.paths = cfg.n_paths;
  c.blowups = count_failed(ok);
  enforce_blowup_limit(cfg, c.blowups, cfg.n_paths);
  c.max_step_increase = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (!ok[i]) continue;
    c.max_step_increase = std::max(c.max_step_increase, inc[i]);
    c.max_growth_ratio = std::max(c.max_growth_ratio, growth[i]);
  }
  return c;
}

ConvergenceStudy strong_self_convergence(const SpectralModel& model, const CoefficientSet& coeffs,
                                         const EnsembleConfig& cfg, const StateVector& x,
                                         const std::vector<double>& dts, int ref_factor) {
  cfg.validate();
  if (dts.size() < 2) throw Error(Errc::InvalidArgument, "convergence study needs at least two step sizes");
  if (ref_factor < 2) throw Error(Errc::InvalidArgument, "reference refinement must be at least 2");
  const double dt_min = *std::min_element(dts.begin(), dts.end());
  const double ref_dt = dt_min / ref_factor;
  const std::uint64_t n_ref = step_count(cfg.T, ref_dt);
  std::vector<std::uint64_t> ratio;
  for (double dt : dts) {
    const double k = std::round(dt / ref_dt);
    if (std::abs(k * ref_dt - dt) > 1e-9 * dt || n_ref % static_cast<std::uint64_t>(k) != 0) {
      throw Error(Errc::InvalidArgument, "step sizes must be multiples of the reference step dividing T");
    }
    ratio.push_back(static_cast<std::uint64_t>(k));
  }
  const std::size_t levels = dts.size();
  const auto n = static_cast<std::size_t>(cfg.n_paths);
  const auto dim = static_cast<Eigen::Index>(model.size());
  std::vector<char> ok(n, 0);
  std::vector<std::vector<double>> sq_err(levels, std::vector<double>(n, 0.0));

  for_each_path(cfg, cfg.n_paths, [&](std::int64_t i) {
    const auto idx = static_cast<std::size_t>(i);
    const NormalSource source(cfg.seed, static_cast<std::uint64_t>(i), Stream::Dynamics);
    try {
      StateVector ref = x;
      std::vector<StateVector> coarse(levels, x);
      std::vector<SpectralCoeffs> pending(levels, SpectralCoeffs::Zero(dim));
      SpectralCoeffs dw(dim);
      for (std::uint64_t s = 0; s < n_ref; ++s) {
        source.fill(s, dw);
        dw *= std::sqrt(ref_dt);
        const double t = static_cast<double>(s) * ref_dt;
        ref = step(model, coeffs, cfg.scheme, t, ref_dt, ref, apply_noise(model, dw, cfg.noise_scale));
        for (std::size_t l = 0; l < levels; ++l) {
          pending[l] += dw;
          if ((s + 1) % ratio[l] != 0) continue;
          const double dt = static_cast<double>(ratio[l]) * ref_dt;
          const double t0 = static_cast<double>((s + 1) / ratio[l] - 1) * dt;
          coarse[l] = step(model, coeffs, cfg.scheme, t0, dt, coarse[l], apply_noise(model, pending[l], cfg.noise_scale));
          pending[l].setZero();
        }
      }
      for (std::size_t l = 0; l < levels; ++l) {
        const double e = model.norm_h(coarse[l] - ref);
        sq_err[l][idx] = e * e;
      }
      ok[idx] = 1;
    } catch (const Error& e) {
      if (!is_blowup(e)) throw;
    }
  });

  ConvergenceStudy study;
  study.dts = dts;
  study.ref_dt = ref_dt;
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t l = 0; l < levels; ++l) {
    const Estimate e = reduce_paths(cfg, ok, sq_err[l]);
    study.errors.push_back(std::sqrt(e.mean));
    const double lx = std::log(dts[l]);
    const double ly = std::log(study.errors.back());
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double m = static_cast<double>(levels);
  study.order = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return study;
}

}  // namespace fdh
