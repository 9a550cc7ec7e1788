#include "photonbits/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "photonbits/error.hpp"
#include "photonbits/rng.hpp"
#include "photonbits/units.hpp"
#include "parallel.hpp"

namespace photonbits {

namespace {

constexpr double kSweepTau = 500e-9;  // only x = T / tau matters; any scale works

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string num17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

double a1_of(const AnalysisReport& r) {
  return r.autocorr.empty() ? std::nan("") : r.autocorr.front().a;
}

Check band(std::string name, double measured, double sigma, double expected, double tolerance,
           std::string note = {}) {
  const bool pass = std::abs(measured - expected) <= tolerance;
  return {std::move(name), measured, sigma, expected, tolerance, pass, std::move(note)};
}

PipelineConfig clocked(Method m, double tau, double period, double dead, double skew, std::uint64_t seed) {
  PipelineConfig c;
  c.method = m;
  c.tau = tau;
  c.period = period;
  c.dead_time = dead;
  c.skew = skew;
  c.seed = seed;
  return c;
}

}  // namespace

std::vector<double> parse_x_grid(const std::string& text) {
  std::vector<double> grid;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    const auto colon2 = text.find(':', colon + 1);
    if (colon2 == std::string::npos) throw ConfigError("--x: expected a:b:logN or a:b:linN, got '" + text + "'");
    const double a = units::parse_number(text.substr(0, colon), "--x");
    const double b = units::parse_number(text.substr(colon + 1, colon2 - colon - 1), "--x");
    const std::string spec = text.substr(colon2 + 1);
    const bool log = spec.rfind("log", 0) == 0;
    if (!log && spec.rfind("lin", 0) != 0) throw ConfigError("--x: spacing must be logN or linN, got '" + spec + "'");
    const std::uint64_t n = units::parse_count(spec.substr(3), "--x");
    if (n < 1) throw ConfigError("--x: at least one grid point is required");
    if (!(a > 0.0) || !(b >= a)) throw ConfigError("--x: need 0 < a <= b");
    for (std::uint64_t i = 0; i < n; ++i) {
      const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      grid.push_back(log ? a * std::pow(b / a, f) : a + (b - a) * f);
    }
    if (n > 1) grid.back() = b;
  } else {
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto comma = text.find(',', pos);
      const auto end = comma == std::string::npos ? text.size() : comma;
      grid.push_back(units::parse_number(text.substr(pos, end - pos), "--x"));
      pos = end + 1;
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > 0.0)) throw ConfigError("--x: grid values must be positive");
    if (i > 0 && !(grid[i] > grid[i - 1])) throw ConfigError("--x: grid must be strictly ascending");
  }
  return grid;
}

void SweepSpec::validate() const {
  if (x_grid.empty()) throw ConfigError("sweep grid is empty");
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] > 0.0) || !std::isfinite(x_grid[i])) throw ConfigError("sweep grid values must be positive");
    if (i > 0 && !(x_grid[i] > x_grid[i - 1])) throw ConfigError("sweep grid must be strictly ascending");
  }
  if (events_per_point < 100'000) throw ConfigError("events per point must be at least 1e5");
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (!(dead_time >= 0.0) || !(skew >= 0.0)) throw ConfigError("dead time and skew must be >= 0");
}

SweepResult sweep(const SweepSpec& spec, unsigned jobs) {
  spec.validate();
  const std::size_t reps = spec.replicates;
  SweepResult out;
  out.rows.resize(spec.x_grid.size() * reps);
  detail::parallel_for(out.rows.size(), jobs, [&](std::size_t i) {
    const std::size_t xi = i / reps;
    const unsigned rep = static_cast<unsigned>(i % reps);
    const double x = spec.x_grid[xi];
    PipelineConfig cfg = clocked(spec.method, kSweepTau, x * kSweepTau, spec.dead_time * kSweepTau,
                                 spec.skew * kSweepTau, derive_seed(derive_seed(spec.seed, xi), rep));
    cfg.events = spec.events_per_point;
    cfg.max_lag = 1;
    PipelineResult res;
    try {
      res = run_pipeline(cfg);
    } catch (const Error& e) {
      throw Error("sweep point x=" + num(x) + " replicate " + std::to_string(rep) + ": " + e.what());
    }
    SweepRow& row = out.rows[i];
    row.x = x;
    row.replicate = rep;
    row.n_bits = res.acc.n();
    if (row.n_bits == 0) {
      row.a1 = row.bias = std::nan("");
      row.pass = false;
      return;
    }
    const AnalysisReport rep_stats = res.acc.finalize();
    const double n = static_cast<double>(row.n_bits);
    row.a1 = a1_of(rep_stats);
    row.a1_sigma = 1.0 / std::sqrt(n);
    row.bias = rep_stats.bias.b;
    row.bias_sigma = rep_stats.bias.std_err;
    row.eta = res.stats.bits_per_event();
    const double events = static_cast<double>(res.stats.events_consumed);
    const double pairs = static_cast<double>(res.stats.pairs_formed);
    switch (spec.method) {
      case Method::restartable: {
        const auto ex = restartable_exact(x, spec.dead_time / x, spec.skew / x);
        row.ref_a = 0.0;
        row.ref_eta = ex.eta;
        row.eta_sigma = std::sqrt(ex.p_tie * (1.0 - ex.p_tie) * pairs) / events;
        row.pass = std::abs(row.a1) <= 3.0 * row.a1_sigma && std::abs(row.eta - row.ref_eta) <= 3.0 * row.eta_sigma;
        break;
      }
      case Method::basic:
        row.ref_a = 0.0;
        row.ref_eta = pairs / events;
        row.pass = std::abs(row.a1) <= 3.0 * row.a1_sigma && std::abs(row.bias) <= 3.0 * row.bias_sigma;
        break;
      case Method::continuous:
        row.ref_a = a_asymptotic(x);
        row.ref_eta = eta_asymptotic(x);
        if (x <= 0.2 && spec.dead_time == 0.0) {
          row.pass = std::abs(row.a1 - row.ref_a) <= std::max(0.1 * row.ref_a, 3.0 * row.a1_sigma);
        } else {
          row.pass = row.a1 >= -3.0 * row.a1_sigma;
        }
        break;
    }
  });
  if (spec.method != Method::continuous && reps >= 20) {
    for (std::size_t xi = 0; xi < spec.x_grid.size(); ++xi) {
      std::size_t fails = 0;
      for (std::size_t r = 0; r < reps; ++r) fails += !out.rows[xi * reps + r].pass;
      if (fails > std::max<std::size_t>(1, reps / 20)) out.flagged_x.push_back(spec.x_grid[xi]);
    }
  }
  return out;
}

std::string sweep_csv(const SweepResult& r) {
  std::string s = "x,replicate,a1,a1_sigma,bias,bias_sigma,eta,ref_a,ref_eta,pass\n";
  for (const auto& row : r.rows) {
    s += num17(row.x) + "," + std::to_string(row.replicate) + "," + num17(row.a1) + "," + num17(row.a1_sigma) + "," +
         num17(row.bias) + "," + num17(row.bias_sigma) + "," + num17(row.eta) + "," + num17(row.ref_a) + "," +
         num17(row.ref_eta) + "," + (row.pass ? "true" : "false") + "\n";
  }
  return s;
}

bool ValidationReport::pass() const noexcept {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check& ValidationReport::check(const std::string& n) const {
  for (const auto& c : checks) {
    if (c.name == n) return c;
  }
  throw ConfigError("no check named '" + n + "' in " + name);
}

Json to_json(const ValidationReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["validation"] = r.name;
  j["params"] = r.params;
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    Json cj{{"name", c.name},           {"measured", c.measured}, {"sigma", c.sigma},
            {"expected", c.expected},   {"tolerance", c.tolerance}, {"pass", c.pass}};
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(std::move(cj));
  }
  j["checks"] = checks;
  j["pass"] = r.pass();
  return j;
}

std::uint64_t required_bits_for_bias(double b) {
  if (!(b > 0.0)) throw DomainError("predicted bias must be positive");
  // 3 / (2 sqrt N) < b / 3  <=>  N > (9 / (2 b))^2
  const double n = std::pow(9.0 / (2.0 * b), 2.0);
  return static_cast<std::uint64_t>(std::floor(n)) + 1;
}

ValidationReport validate_dead_time_cancellation(double x, const std::vector<double>& dead_times,
                                                 std::uint64_t n_bits, std::uint64_t seed, unsigned jobs) {
  if (!(x > 0.0)) throw ConfigError("x must be positive");
  if (std::find(dead_times.begin(), dead_times.end(), 0.0) == dead_times.end()) {
    throw ConfigError("dead times must include 0");
  }
  for (double d : dead_times) {
    if (!(d >= 0.0)) throw ConfigError("dead times must be >= 0");
  }
  if (n_bits < 1000) throw ConfigError("at least 1000 bits per run are required");

  const Method methods[] = {Method::restartable, Method::basic, Method::continuous};
  const std::size_t nm = std::size(methods);
  std::vector<AnalysisReport> reports(dead_times.size() * nm);
  detail::parallel_for(reports.size(), jobs, [&](std::size_t i) {
    const std::size_t di = i / nm;
    PipelineConfig cfg = clocked(methods[i % nm], kSweepTau, x * kSweepTau, dead_times[di] * kSweepTau, 0.0,
                                 derive_seed(seed, i));
    cfg.target_bits = n_bits;
    cfg.max_lag = 8;
    reports[i] = run_pipeline(cfg).acc.finalize();
  });

  ValidationReport v;
  v.name = "dead-time";
  v.params = {{"x", x}, {"dead_times_tau", dead_times}, {"n_bits", n_bits}, {"seed", seed}};
  const std::size_t zero = static_cast<std::size_t>(std::find(dead_times.begin(), dead_times.end(), 0.0) -
                                                    dead_times.begin());
  for (std::size_t di = 0; di < dead_times.size(); ++di) {
    const std::string d = "d=" + num(dead_times[di]) + "tau";
    for (std::size_t m = 0; m < 2; ++m) {
      const auto& r = reports[di * nm + m];
      const std::string prefix = to_string(methods[m]) + " " + d + " ";
      v.checks.push_back(band(prefix + "bias", r.bias.b, r.bias.std_err, 0.0, 3.0 * r.bias.std_err));
      for (const auto& e : r.autocorr) {
        v.checks.push_back(band(prefix + "a" + std::to_string(e.lag), e.a, e.std_err, 0.0, 3.0 * e.std_err));
      }
      if (r.autocorr_error) v.checks.push_back({prefix + "a1", std::nan(""), 0.0, 0.0, 0.0, false, *r.autocorr_error});
    }
    if (di == zero) continue;
    const auto& r0 = reports[zero * nm + 2];
    const auto& rd = reports[di * nm + 2];
    const double diff = a1_of(rd) - a1_of(r0);
    const double sigma = std::hypot(1.0 / std::sqrt(static_cast<double>(rd.n_bits)),
                                    1.0 / std::sqrt(static_cast<double>(r0.n_bits)));
    Check c{"continuous " + d + " a1 contrast", diff, sigma, 0.0, 3.0 * sigma, std::abs(diff) >= 3.0 * sigma,
            "a1(d)=" + num17(a1_of(rd)) + " a1(0)=" + num17(a1_of(r0)) + "; passes when |difference| >= 3 sigma"};
    v.checks.push_back(std::move(c));
  }
  return v;
}

ValidationReport validate_bias_model(const std::vector<double>& x_grid, const std::vector<double>& dt_grid,
                                     std::uint64_t n_bits, std::uint64_t seed, unsigned jobs) {
  if (x_grid.empty() || dt_grid.empty()) throw ConfigError("bias model grids must not be empty");
  double smallest = INFINITY;
  for (double x : x_grid) {
    if (!(x > 0.0)) throw ConfigError("x grid values must be positive");
    for (double dt : dt_grid) {
      if (!(dt > 0.0)) throw ConfigError("dt/tau grid values must be positive");
      smallest = std::min(smallest, bias_model(x, dt));
    }
  }
  const std::uint64_t need = required_bits_for_bias(smallest);
  if (n_bits < need) {
    throw InsufficientDataError("bias model check is under-powered: predicted bias " + num(smallest) +
                                " requires N >= " + std::to_string(need) + " bits, got " + std::to_string(n_bits));
  }

  struct Point {
    double x, dt;
  };
  std::vector<Point> points;
  for (double x : x_grid) {
    for (double dt : dt_grid) points.push_back({x, dt});
  }
  // Per point: nominal run and the tau-halved run (same T and dt); plus one zero-skew null.
  const std::size_t runs = 2 * points.size() + 1;
  std::vector<AnalysisReport> reports(runs);
  detail::parallel_for(runs, jobs, [&](std::size_t i) {
    PipelineConfig cfg;
    if (i == runs - 1) {
      cfg = clocked(Method::restartable, kSweepTau, x_grid.front() * kSweepTau, 0.0, 0.0, derive_seed(seed, i));
    } else {
      const Point& p = points[i / 2];
      const double tau = i % 2 == 0 ? kSweepTau : kSweepTau / 2.0;
      cfg = clocked(Method::restartable, tau, p.x * kSweepTau, 0.0, p.dt * kSweepTau, derive_seed(seed, i));
    }
    cfg.target_bits = n_bits;
    cfg.max_lag = 1;
    reports[i] = run_pipeline(cfg).acc.finalize();
  });

  ValidationReport v;
  v.name = "bias-model";
  v.params = {{"x_grid", x_grid}, {"dt_over_tau_grid", dt_grid}, {"n_bits", n_bits}, {"seed", seed}};
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Point& p = points[k];
    const auto& r1 = reports[2 * k];
    const auto& r2 = reports[2 * k + 1];
    const std::string tag = "x=" + num(p.x) + " dt/tau=" + num(p.dt);
    const double predicted = bias_model(p.x, p.dt);
    const double exact1 = restartable_exact(p.x, 0.0, p.dt / p.x).bias;
    const double exact2 = restartable_exact(2.0 * p.x, 0.0, p.dt / p.x).bias;
    v.checks.push_back(band("bias " + tag, r1.bias.b, r1.bias.std_err, predicted,
                            std::max(0.25 * predicted, 3.0 * r1.bias.std_err),
                            "exact skew-model prediction " + num17(exact1)));
    const double ratio = r2.bias.b / r1.bias.b;
    const double ratio_sigma =
        std::abs(ratio) * std::hypot(r1.bias.std_err / r1.bias.b, r2.bias.std_err / r2.bias.b);
    v.checks.push_back(band("tau-halving ratio " + tag, ratio, ratio_sigma, 4.0, 1.0,
                            "exact skew-model ratio " + num17(exact2 / exact1)));
  }
  const auto& r0 = reports.back();
  v.checks.push_back(band("zero-skew bias x=" + num(x_grid.front()), r0.bias.b, r0.bias.std_err, 0.0,
                          3.0 * r0.bias.std_err));
  return v;
}

PrototypeResult reproduce_prototype(std::uint64_t n_events, std::uint64_t seed) {
  if (n_events < 10'000'000) throw ConfigError("the prototype run needs at least 1e7 events");
  const double tau = 500e-9, period = 1.0 / 48e6, dead = 25e-9;
  const double x = period / tau;
  const double target_bias = 1e-4;
  const double skew = 2.0 * target_bias * tau / x;  // bias_model(x, skew / tau) == target_bias

  PipelineConfig cfg = clocked(Method::restartable, tau, period, dead, skew, seed);
  cfg.events = n_events;
  cfg.max_lag = 32;
  PipelineResult res = run_pipeline(cfg);

  PrototypeResult out;
  out.stats = res.stats;
  out.report = res.acc.finalize();
  out.report.efficiency = res.stats.bits_per_event();

  const auto ex = restartable_exact(x, dead / period, skew / period);
  const double events = static_cast<double>(res.stats.events_consumed);
  const double eta_sigma = std::sqrt(ex.p_tie * (1.0 - ex.p_tie) * static_cast<double>(res.stats.pairs_formed)) / events;
  const double eta = *out.report.efficiency;

  ValidationReport& v = out.validation;
  v.name = "prototype";
  v.params = {{"tau_s", tau}, {"period_s", period}, {"dead_time_s", dead}, {"skew_s", skew},
              {"events", n_events}, {"seed", seed}};
  v.checks.push_back(band("efficiency", eta, eta_sigma, 0.4895, 0.0045, "accepted band [0.485, 0.494]"));
  v.checks.push_back(band("efficiency vs exact oracle", eta, eta_sigma, ex.eta, 3.0 * eta_sigma,
                          "eta_asymptotic " + num17(eta_asymptotic(x))));
  const bool full_scale = out.report.n_bits >= 100'000'000;
  for (const auto& e : out.report.autocorr) {
    if (e.lag > 8) break;
    const double tol = full_scale ? 3e-4 : 3.0 * e.std_err;
    v.checks.push_back(band("a" + std::to_string(e.lag), e.a, e.std_err, 0.0, tol,
                            full_scale ? "" : "fewer than 1e8 bits: judged at 3 sigma"));
  }
  v.checks.push_back(band("bias", out.report.bias.b, out.report.bias.std_err, target_bias,
                          3.0 * out.report.bias.std_err, "exact skew-model prediction " + num17(ex.bias)));
  return out;
}

ValidationReport afterpulse_study(double tau, double period, double prob, double tau_ap, std::uint64_t n_events,
                                  std::uint64_t seed) {
  SourceConfig src;
  src.tau = tau;
  src.n_events = n_events;
  src.seed = seed;
  src.afterpulse_prob = prob;
  src.afterpulse_tau = tau_ap;
  src.validate();
  const EventStream s = simulate_source(src);
  const Extraction ext = extract_clocked(s, ClockConfig{period, ClockMode::restartable});
  BitStatsAccumulator acc(8);
  acc.append(ext.bits);
  const AnalysisReport r = acc.finalize();

  ValidationReport v;
  v.name = "afterpulse";
  v.params = {{"tau_s", tau}, {"period_s", period}, {"afterpulse_prob", prob}, {"afterpulse_tau_s", tau_ap},
              {"events", n_events}, {"seed", seed}};
  const double a1 = a1_of(r);
  const double sigma = 1.0 / std::sqrt(static_cast<double>(r.n_bits));
  v.checks.push_back({"a1 positive", a1, sigma, 0.0, 3.0 * sigma, a1 > 3.0 * sigma,
                      "passes when a1 > 3 sigma; bits " + std::to_string(r.n_bits)});
  return v;
}

}  // namespace photonbits
