#include "fdh/config.hpp"

#include "fdh/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace fdh {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

class Checker {
 public:
  void fail(const std::string& path, const std::string& msg) { errors_.push_back(path + ": " + msg); }
  bool ok() const noexcept { return errors_.empty(); }
  const std::vector<std::string>& errors() const noexcept { return errors_; }

  /// Records unknown keys; also fails when `obj` is not an object.
  bool object(const Json& obj, const std::string& path, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) {
      fail(path, "must be an object");
      return false;
    }
    for (const auto& [k, v] : obj.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* want) { return k == want; })) {
        fail(join(path, k), "unknown key");
      }
    }
    return true;
  }

  std::optional<double> number(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_number()) {
      fail(join(path, key), "must be a number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<std::int64_t> integer(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) {
      fail(join(path, key), "must be an integer");
      return std::nullopt;
    }
    return v.get<std::int64_t>();
  }

  std::optional<std::uint64_t> unsigned_integer(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_number_unsigned()) {
      fail(join(path, key), "must be a nonnegative integer");
      return std::nullopt;
    }
    return v.get<std::uint64_t>();
  }

  std::optional<std::string> string(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    if (!v.is_string()) {
      fail(join(path, key), "must be a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const Json& v, const std::string& path) {
    if (!v.is_array()) {
      fail(path, "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const Json& e : v) {
      if (!e.is_number()) {
        fail(path, "must be an array of numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::optional<Schedule> schedule(const Json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) return std::nullopt;
    const Json& v = obj.at(key);
    const std::string where = join(path, key);
    if (v.is_number()) return Schedule(v.get<double>());
    if (!object(v, where, {"breaks", "values"})) return std::nullopt;
    if (!v.contains("breaks") || !v.contains("values")) {
      fail(where, "schedule needs breaks and values");
      return std::nullopt;
    }
    auto breaks = numbers(v.at("breaks"), join(where, "breaks"));
    auto values = numbers(v.at("values"), join(where, "values"));
    if (!breaks || !values) return std::nullopt;
    try {
      return Schedule(std::move(*breaks), std::move(*values));
    } catch (const Error& e) {
      fail(where, e.what());
      return std::nullopt;
    }
  }

 private:
  std::vector<std::string> errors_;
};

std::optional<SpectralModel> parse_model(Checker& ck, const Json& doc) {
  if (!doc.contains("model")) {
    ck.fail("model", "required");
    return std::nullopt;
  }
  const Json& m = doc.at("model");
  if (!ck.object(m, "model", {"n", "measure", "operator", "alpha", "q_diag"})) return std::nullopt;
  const auto n = ck.integer(m, "model", "n");
  if (!m.contains("n")) ck.fail("model.n", "required");
  if (!n) return std::nullopt;
  if (*n < 1) {
    ck.fail("model.n", "must be at least 1");
    return std::nullopt;
  }
  const auto size = static_cast<std::size_t>(*n);
  const auto dim = static_cast<Eigen::Index>(*n);
  bool good = true;

  std::optional<MeasureSpace> space;
  if (!m.contains("measure") || m.at("measure") == "uniform") {
    space = MeasureSpace::uniform(size);
  } else if (auto w = ck.numbers(m.at("measure"), "model.measure")) {
    if (w->size() != size) {
      ck.fail("model.measure", "needs n weights");
      good = false;
    } else {
      try {
        space = MeasureSpace(Eigen::Map<const Vector>(w->data(), dim));
      } catch (const Error& e) {
        ck.fail("model.measure", e.what());
        good = false;
      }
    }
  } else {
    good = false;
  }

  Matrix op;
  if (!m.contains("operator") || m.at("operator") == "dirichlet1d") {
    op = SpectralModel::dirichlet_laplacian_1d(size);
  } else if (m.at("operator").is_object()) {
    const Json& o = m.at("operator");
    if (ck.object(o, "model.operator", {"matrix"}) && o.contains("matrix") && o.at("matrix").is_array() &&
        o.at("matrix").size() == size) {
      op.resize(dim, dim);
      for (std::size_t i = 0; i < size && good; ++i) {
        const auto row = ck.numbers(o.at("matrix").at(i), "model.operator.matrix");
        if (!row || row->size() != size) {
          ck.fail("model.operator.matrix", "must be an n by n array");
          good = false;
          break;
        }
        for (std::size_t j = 0; j < size; ++j) {
          op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*row)[j];
        }
      }
    } else {
      ck.fail("model.operator.matrix", "must be an n by n array");
      good = false;
    }
  } else {
    ck.fail("model.operator", "must be \"dirichlet1d\" or {\"matrix\": ...}");
    good = false;
  }

  Vector q = SpectralModel::power_noise(size, 0.0);
  if (m.contains("q_diag")) {
    const Json& nz = m.at("q_diag");
    if (nz.is_object()) {
      if (ck.object(nz, "model.q_diag", {"power"})) {
        if (auto th = ck.number(nz, "model.q_diag", "power")) q = SpectralModel::power_noise(size, *th);
      } else {
        good = false;
      }
    } else if (auto list = ck.numbers(nz, "model.q_diag")) {
      if (list->size() != size) {
        ck.fail("model.q_diag", "needs n entries");
        good = false;
      } else {
        q = Eigen::Map<const Vector>(list->data(), dim);
      }
    } else {
      good = false;
    }
  }
  const double alpha = ck.number(m, "model", "alpha").value_or(1.0);
  if (!(alpha > 0.0)) {
    ck.fail("model.alpha", "must be positive");
    good = false;
  }
  if (!good || !space) return std::nullopt;
  try {
    SpectralModel built = SpectralModel::build(*space, op, q);
    if (alpha != 1.0) built = built.with_fractional_power(alpha);
    return built;
  } catch (const Error& e) {
    ck.fail("model", e.what());
    return std::nullopt;
  }
}

CoefficientSet parse_coeffs(Checker& ck, const Json& doc, const SpectralModel* model) {
  CoefficientSet c;
  const Json empty = Json::object();
  const Json& j = doc.contains("coeffs") ? doc.at("coeffs") : empty;
  if (!ck.object(j, "coeffs", {"r", "delta", "eta", "gamma", "sigma", "xi", "nonlinearity"})) return c;
  c.r = ck.number(j, "coeffs", "r").value_or(0.5);
  bool r_ok = c.r > 0.0 && c.r < 1.0;
  if (!r_ok) ck.fail("coeffs.r", "r must be in (0,1)");
  if (auto s = ck.schedule(j, "coeffs", "delta")) c.delta = *s;
  if (auto s = ck.schedule(j, "coeffs", "gamma")) c.gamma = *s;
  if (auto s = ck.schedule(j, "coeffs", "eta")) {
    c.eta = *s;
  } else if (r_ok) {
    std::vector<double> vals = c.delta.values();
    for (double& v : vals) v /= 2.0 * c.r;
    c.eta = c.delta.is_constant() ? Schedule(c.delta.at(0.0) / (2.0 * c.r)) : Schedule(c.delta.breaks(), vals);
  }
  const double floor = r_ok ? 4.0 / (1.0 + c.r) : 0.0;
  c.sigma = ck.number(j, "coeffs", "sigma").value_or(r_ok ? floor : 8.0 / 3.0);
  if (r_ok && !(c.sigma >= floor * (1.0 - 1e-12))) {
    std::ostringstream os;
    os.precision(17);
    os << "sigma must be >= 4/(1+r) = " << floor;
    ck.fail("coeffs.sigma", os.str());
  }

  if (j.contains("xi") && j.at("xi").is_string()) {
    if (j.at("xi") != "certified") ck.fail("coeffs.xi", "must be a number, a schedule, or \"certified\"");
    if (model) c.xi = norm_domination_lower_bound(*model, c.sigma);
  } else if (auto s = ck.schedule(j, "coeffs", "xi")) {
    c.xi = *s;
  } else if (model) {
    c.xi = norm_domination_lower_bound(*model, c.sigma);
  }

  if (auto nl = ck.string(j, "coeffs", "nonlinearity")) {
    if (*nl == "fast_diffusion") {
      c.nonlinearity = Nonlinearity::FastDiffusion;
    } else if (*nl == "linear") {
      c.nonlinearity = Nonlinearity::Linear;
    } else {
      ck.fail("coeffs.nonlinearity", "must be \"fast_diffusion\" or \"linear\"");
    }
  }

  auto positive = [&](const Schedule& s, const char* key) {
    for (double v : s.values().empty() ? std::vector<double>{s.at(0.0)} : s.values()) {
      if (!(v > 0.0)) {
        ck.fail(join("coeffs", key), std::string(key) + " must be positive");
        return false;
      }
    }
    return true;
  };
  const bool delta_ok = positive(c.delta, "delta");
  const bool eta_ok = positive(c.eta, "eta");
  positive(c.xi, "xi");
  if (r_ok && delta_ok && eta_ok) {
    std::vector<double> at{0.0};
    for (double b : c.delta.breaks()) at.push_back(b);
    for (double b : c.eta.breaks()) at.push_back(b);
    for (double t : at) {
      if (c.eta.at(t) < c.delta.at(t) / (2.0 * c.r) * (1.0 - 1e-12)) {
        ck.fail("coeffs.eta", "eta must be >= delta/(2r)");
        break;
      }
    }
  }
  return c;
}

EnsembleConfig parse_run(Checker& ck, const Json& doc) {
  EnsembleConfig run;
  const Json empty = Json::object();
  const Json& j = doc.contains("run") ? doc.at("run") : empty;
  if (!ck.object(j, "run",
                 {"paths", "dt", "T", "seed", "scheme", "burn_in", "sample_interval", "trace_paths",
                  "couple_tol_rel", "workers", "noise_scale", "execution"})) {
    return run;
  }
  run.n_paths = ck.integer(j, "run", "paths").value_or(run.n_paths);
  run.dt = ck.number(j, "run", "dt").value_or(run.dt);
  run.T = ck.number(j, "run", "T").value_or(run.T);
  run.seed = ck.unsigned_integer(j, "run", "seed").value_or(run.seed);
  run.burn_in = ck.number(j, "run", "burn_in").value_or(run.burn_in);
  run.sample_interval = ck.number(j, "run", "sample_interval").value_or(run.sample_interval);
  run.trace_paths = ck.integer(j, "run", "trace_paths").value_or(run.trace_paths);
  run.couple_tol_rel = ck.number(j, "run", "couple_tol_rel").value_or(run.couple_tol_rel);
  run.workers = static_cast<int>(ck.integer(j, "run", "workers").value_or(run.workers));
  run.noise_scale = ck.number(j, "run", "noise_scale").value_or(run.noise_scale);
  if (auto s = ck.string(j, "run", "scheme")) {
    if (auto sc = parse_scheme(*s)) {
      run.scheme = *sc;
    } else {
      ck.fail("run.scheme", "must be \"tamed_euler\" or \"explicit_euler\"");
    }
  }
  if (auto s = ck.string(j, "run", "execution")) {
    if (*s == "serial") {
      run.execution = Execution::Serial;
    } else if (*s == "openmp") {
      run.execution = Execution::OpenMP;
    } else {
      ck.fail("run.execution", "must be \"serial\" or \"openmp\"");
    }
  }
  if (run.n_paths < 2) ck.fail("run.paths", "must be at least 2");
  if (!(run.dt > 0.0)) ck.fail("run.dt", "must be positive");
  if (!(run.T > 0.0)) ck.fail("run.T", "must be positive");
  if (!(run.burn_in >= 0.0 && run.burn_in < run.T)) ck.fail("run.burn_in", "must lie in [0, T)");
  if (!(run.sample_interval >= 0.0)) ck.fail("run.sample_interval", "must be nonnegative");
  if (run.trace_paths < 0) ck.fail("run.trace_paths", "must be nonnegative");
  if (!(run.couple_tol_rel > 0.0)) ck.fail("run.couple_tol_rel", "must be positive");
  if (run.workers < 0) ck.fail("run.workers", "must be nonnegative");
  if (!(run.noise_scale >= 0.0)) ck.fail("run.noise_scale", "must be nonnegative");
  return run;
}

std::optional<StateVector> parse_state(Checker& ck, const Json& v, const std::string& path,
                                       const SpectralModel& model) {
  const auto dim = static_cast<Eigen::Index>(model.size());
  if (v == "zero") return StateVector::Zero(dim);
  if (v.is_array()) {
    auto vals = ck.numbers(v, path);
    if (!vals) return std::nullopt;
    if (vals->size() != model.size()) {
      ck.fail(path, "needs n entries");
      return std::nullopt;
    }
    return StateVector(Eigen::Map<const Vector>(vals->data(), dim));
  }
  if (v.is_object() && v.contains("spectral")) {
    if (!ck.object(v, path, {"spectral"})) return std::nullopt;
    auto vals = ck.numbers(v.at("spectral"), join(path, "spectral"));
    if (!vals) return std::nullopt;
    if (vals->size() != model.size()) {
      ck.fail(join(path, "spectral"), "needs n entries");
      return std::nullopt;
    }
    return model.from_spectral(Eigen::Map<const Vector>(vals->data(), dim));
  }
  ck.fail(path, "must be \"zero\", an array, or {\"spectral\": [...]}");
  return std::nullopt;
}

}  // namespace

const std::vector<std::string>& known_checks() {
  static const std::vector<std::string> names{"hs",       "hs_asymptotic", "norm_domination", "spectral",
                                              "dirichlet_example", "power_noise", "fractional", "embedding"};
  return names;
}

ExperimentConfig parse_config_json(const Json& doc) {
  Checker ck;
  ExperimentConfig cfg;
  cfg.source = doc;
  if (!ck.object(doc, "",
                 {"description", "model", "coeffs", "run", "x", "y", "p", "F", "slack", "eps0", "conditions",
                  "probe"})) {
    throw Error(Errc::SchemaError, "config must be a JSON object");
  }
  cfg.model = parse_model(ck, doc);
  const SpectralModel* model = cfg.model ? &*cfg.model : nullptr;
  cfg.coeffs = parse_coeffs(ck, doc, model);
  cfg.run = parse_run(ck, doc);

  if (model) {
    cfg.x = StateVector::Zero(static_cast<Eigen::Index>(model->size()));
    if (doc.contains("x")) {
      if (auto s = parse_state(ck, doc.at("x"), "x", *model)) cfg.x = *s;
    }
    cfg.y = cfg.x;
    if (doc.contains("y")) {
      const Json& y = doc.at("y");
      if (y.is_object() && y.contains("offset_h")) {
        if (ck.object(y, "y", {"offset_h", "mode"})) {
          const double d = ck.number(y, "y", "offset_h").value_or(0.0);
          const std::int64_t mode = ck.integer(y, "y", "mode").value_or(1);
          if (mode < 1 || mode > static_cast<std::int64_t>(model->size())) {
            ck.fail("y.mode", "must lie in [1, n]");
          } else {
            const StateVector e = model->eigenfunction(static_cast<std::size_t>(mode - 1));
            cfg.y = cfg.x + d * e / model->norm_h(e);
          }
        }
      } else if (auto s = parse_state(ck, y, "y", *model)) {
        cfg.y = *s;
      }
    }
  }

  cfg.p = ck.number(doc, "", "p").value_or(cfg.p);
  if (!(cfg.p > 1.0)) ck.fail("p", "p must exceed 1");
  cfg.slack = ck.number(doc, "", "slack").value_or(cfg.slack);
  if (!(cfg.slack >= 0.0)) ck.fail("slack", "must be nonnegative");
  cfg.eps0 = ck.number(doc, "", "eps0").value_or(cfg.eps0);
  if (!(cfg.eps0 > 0.0)) ck.fail("eps0", "must be positive");

  if (doc.contains("F")) {
    const Json& f = doc.at("F");
    std::optional<std::string> kind;
    if (f.is_string()) {
      kind = f.get<std::string>();
    } else if (ck.object(f, "F", {"kind", "center", "radius"})) {
      kind = ck.string(f, "F", "kind");
      if (!kind) ck.fail("F.kind", "required");
    }
    if (kind) {
      const auto k = TestFunction::parse_kind(*kind);
      if (!k) {
        ck.fail("F", "unknown test function \"" + *kind + "\"");
      } else if (*k == TestFunction::Kind::IndicatorBall) {
        const double radius = f.is_object() ? ck.number(f, "F", "radius").value_or(1.0) : 1.0;
        StateVector center = cfg.x;
        if (model && f.is_object() && f.contains("center")) {
          if (auto s = parse_state(ck, f.at("center"), "F.center", *model)) center = *s;
        }
        if (!(radius >= 0.0)) {
          ck.fail("F.radius", "must be nonnegative");
        } else {
          cfg.f = TestFunction::indicator_ball(center, radius);
        }
      } else if (*k == TestFunction::Kind::One) {
        cfg.f = TestFunction::one();
      } else if (*k == TestFunction::Kind::ExpNegHSq) {
        cfg.f = TestFunction::exp_neg_h_sq();
      } else {
        cfg.f = TestFunction::rational_h();
      }
    }
  }

  cfg.conditions.asymptotic.r = cfg.coeffs.r;
  cfg.conditions.asymptotic.sigma = cfg.coeffs.sigma;
  cfg.conditions.checks = {"hs", "norm_domination"};
  if (doc.contains("conditions")) {
    const Json& c = doc.at("conditions");
    if (ck.object(c, "conditions", {"asymptotic", "checks", "dirichlet", "samples", "seed"})) {
      if (c.contains("asymptotic")) {
        const Json& a = c.at("asymptotic");
        if (ck.object(a, "conditions.asymptotic", {"theta", "c", "rho", "alpha", "d", "eps", "r", "sigma"})) {
          AsymptoticSpec& s = cfg.conditions.asymptotic;
          const std::string p = "conditions.asymptotic";
          s.theta = ck.number(a, p, "theta").value_or(s.theta);
          s.c = ck.number(a, p, "c").value_or(s.c);
          s.rho = ck.number(a, p, "rho").value_or(s.rho);
          s.alpha = ck.number(a, p, "alpha").value_or(s.alpha);
          s.d = ck.number(a, p, "d").value_or(s.d);
          s.eps = ck.number(a, p, "eps").value_or(s.eps);
          s.r = ck.number(a, p, "r").value_or(s.r);
          s.sigma = ck.number(a, p, "sigma").value_or(s.sigma);
          if (!(s.c > 0.0)) ck.fail(join(p, "c"), "must be positive");
          if (!(s.rho > 0.0)) ck.fail(join(p, "rho"), "must be positive");
          if (!(s.r > 0.0 && s.r < 1.0)) ck.fail(join(p, "r"), "r must be in (0,1)");
        }
      }
      if (c.contains("checks")) {
        const Json& list = c.at("checks");
        if (!list.is_array()) {
          ck.fail("conditions.checks", "must be an array of check names");
        } else {
          cfg.conditions.checks.clear();
          for (const Json& name : list) {
            const auto& known = known_checks();
            if (!name.is_string() || std::find(known.begin(), known.end(), name.get<std::string>()) == known.end()) {
              ck.fail("conditions.checks", "unknown check " + name.dump());
            } else {
              cfg.conditions.checks.push_back(name.get<std::string>());
            }
          }
        }
      }
      if (c.contains("dirichlet")) {
        const Json& d = c.at("dirichlet");
        const std::string p = "conditions.dirichlet";
        if (ck.object(d, p, {"r", "eps", "alpha", "theta", "c1", "c2"})) {
          DirichletExampleInput in;
          in.r = ck.number(d, p, "r").value_or(cfg.coeffs.r);
          in.eps = ck.number(d, p, "eps").value_or(in.eps);
          in.alpha = ck.number(d, p, "alpha").value_or(in.alpha);
          in.theta = ck.number(d, p, "theta");
          in.c1 = ck.number(d, p, "c1").value_or(in.c1);
          in.c2 = ck.number(d, p, "c2").value_or(in.c2);
          cfg.conditions.dirichlet = in;
          cfg.conditions.dirichlet_model_sandwich = d.contains("c1") || d.contains("c2");
        }
      }
      cfg.conditions.samples = ck.integer(c, "conditions", "samples").value_or(cfg.conditions.samples);
      if (cfg.conditions.samples < 1) ck.fail("conditions.samples", "must be positive");
      cfg.conditions.seed = ck.unsigned_integer(c, "conditions", "seed").value_or(cfg.run.seed);
    }
  } else {
    cfg.conditions.seed = cfg.run.seed;
  }

  if (doc.contains("probe")) {
    const Json& pr = doc.at("probe");
    if (ck.object(pr, "probe", {"radii"}) && pr.contains("radii")) {
      if (auto radii = ck.numbers(pr.at("radii"), "probe.radii")) {
        if (std::any_of(radii->begin(), radii->end(), [](double r) { return !(r >= 0.0); })) {
          ck.fail("probe.radii", "radii must be nonnegative");
        } else {
          cfg.radii = *radii;
        }
      }
    }
  }

  if (!ck.ok()) {
    std::string msg;
    for (const auto& e : ck.errors()) msg += (msg.empty() ? "" : "\n") + e;
    throw Error(Errc::SchemaError, msg);
  }
  return cfg;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IOError, "cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw Error(Errc::SchemaError, path + ": " + e.what());
  }
}

ExperimentConfig parse_config(const std::string& path) { return parse_config_json(load_json_file(path)); }

}  // namespace fdh
