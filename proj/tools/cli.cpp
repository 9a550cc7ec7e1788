#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <thread>

#include "photonbits/analysis.hpp"
#include "photonbits/error.hpp"
#include "photonbits/event_source.hpp"
#include "photonbits/experiments.hpp"
#include "photonbits/extractor.hpp"
#include "photonbits/file_io.hpp"
#include "photonbits/report_io.hpp"
#include "photonbits/units.hpp"

#ifndef PHOTONBITS_VERSION
#define PHOTONBITS_VERSION "unknown"
#endif

namespace photonbits::cli {

namespace fs = std::filesystem;

namespace {

std::string digest_hex(const fs::path& p) {
  const auto bytes = read_file(p);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Json file_entry(const fs::path& p) {
  return {{"path", p.string()}, {"bytes", fs::file_size(p)}, {"fnv1a64", digest_hex(p)}};
}

// Everything needed to replay a run.
struct Manifest {
  std::string command;
  Json config = Json::object();
  std::optional<std::uint64_t> seed;
  std::vector<fs::path> inputs;
  std::vector<fs::path> outputs;
};

fs::path manifest_for(const std::string& explicit_path, const fs::path& primary_output) {
  if (!explicit_path.empty()) return explicit_path;
  if (primary_output.empty()) return {};
  return fs::path(primary_output.string() + ".manifest.json");
}

void write_manifest(const fs::path& path, const Manifest& m, const std::vector<std::string>& args,
                    double seconds) {
  if (path.empty()) return;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["tool"] = "photonbits";
  j["version"] = PHOTONBITS_VERSION;
  j["command"] = m.command;
  j["argv"] = args;
  j["cwd"] = fs::current_path().string();
  j["config"] = m.config;
  j["seed"] = m.seed ? Json(*m.seed) : Json(nullptr);
  Json in = Json::array(), out = Json::array();
  for (const auto& p : m.inputs) in.push_back(file_entry(p));
  for (const auto& p : m.outputs) out.push_back(file_entry(p));
  j["inputs"] = in;
  j["outputs"] = out;
  j["wall_clock_s"] = seconds;
  write_json(path, j);
}

double parse_phase(const std::string& text, double period) {
  if (text.empty()) return 0.0;
  const bool has_unit = std::isalpha(static_cast<unsigned char>(text.back())) != 0;
  const double phase = has_unit ? units::parse_duration(text, "--phase")
                                : units::parse_number(text, "--phase") * period;
  if (!(phase >= 0.0 && phase < period)) {
    throw ConfigError("--phase must lie in [0, 1) periods, got '" + text + "'");
  }
  return phase;
}

TimestampFormat parse_format(const std::string& text, const char* flag) {
  try {
    return parse_timestamp_format(text);
  } catch (const ConfigError&) {
    throw ConfigError(std::string(flag) + ": unknown format '" + text + "' (expected binary or csv)");
  }
}

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> v;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto end = comma == std::string::npos ? text.size() : comma;
    v.push_back(units::parse_number(text.substr(pos, end - pos), flag));
    pos = end + 1;
  }
  return v;
}

// ---- simulate ----

struct SimulateOpts {
  std::string rate, tau, events, dead_time = "0", ap_prob = "0", ap_tau = "1000ns", seed = "1";
  std::string out, format = "binary", histogram, manifest;
};

int cmd_simulate(const SimulateOpts& o, Manifest& m, fs::path& manifest_path, std::ostream& out) {
  SourceConfig cfg;
  if (!o.rate.empty() && !o.tau.empty()) throw ConfigError("--rate and --tau are mutually exclusive");
  if (!o.rate.empty()) {
    const double rate = units::parse_frequency(o.rate, "--rate");
    if (!(rate > 0.0)) throw ConfigError("--rate must be positive, got '" + o.rate + "'");
    cfg.tau = 1.0 / rate;
  } else if (!o.tau.empty()) {
    cfg.tau = units::parse_duration(o.tau, "--tau");
    if (!(cfg.tau > 0.0)) throw ConfigError("--tau must be positive, got '" + o.tau + "'");
  } else {
    throw ConfigError("one of --rate or --tau is required");
  }
  cfg.n_events = units::parse_count(o.events, "--events");
  cfg.dead_time = units::parse_duration(o.dead_time, "--dead-time");
  if (cfg.dead_time < 0.0) throw ConfigError("--dead-time must be >= 0");
  cfg.afterpulse_prob = units::parse_number(o.ap_prob, "--afterpulse-prob");
  if (!(cfg.afterpulse_prob >= 0.0 && cfg.afterpulse_prob < 1.0)) {
    throw ConfigError("--afterpulse-prob must lie in [0, 1)");
  }
  cfg.afterpulse_tau = units::parse_duration(o.ap_tau, "--afterpulse-tau");
  if (cfg.afterpulse_prob > 0.0 && !(cfg.afterpulse_tau > 0.0)) throw ConfigError("--afterpulse-tau must be positive");
  cfg.seed = units::parse_count(o.seed, "--seed");
  const TimestampFormat fmt = parse_format(o.format, "--format");

  const EventStream s = simulate_detected(cfg);
  const ExportSummary sum = export_timestamps(s, o.out, fmt);

  m.config = {{"tau_s", cfg.tau},
              {"rate_hz", 1.0 / cfg.tau},
              {"events", cfg.n_events},
              {"dead_time_s", cfg.dead_time},
              {"afterpulse_prob", cfg.afterpulse_prob},
              {"afterpulse_tau_s", cfg.afterpulse_tau},
              {"format", o.format},
              {"records", sum.records},
              {"adjusted_records", sum.adjusted}};
  m.seed = cfg.seed;
  m.outputs.push_back(o.out);
  if (!o.histogram.empty()) {
    if (s.size() < 2) throw InsufficientDataError("--histogram needs at least 2 events");
    write_text_file(o.histogram, histogram_csv(interval_histogram(s)));
    m.outputs.push_back(o.histogram);
  }
  manifest_path = manifest_for(o.manifest, o.out);
  out << "wrote " << sum.records << " events to " << o.out;
  if (sum.adjusted > 0) out << " (" << sum.adjusted << " moved by 1 ns to stay strictly increasing)";
  out << "\n";
  return kOk;
}

// ---- extract ----

struct ExtractOpts {
  std::string input, out, method = "restart", clock, period, clock_mode = "restartable", phase, skew = "0";
  std::string format = "binary", manifest;
  bool counter = false;
};

int cmd_extract(const ExtractOpts& o, Manifest& m, fs::path& manifest_path, std::ostream& out) {
  const EventStream s = ingest_timestamps(o.input, parse_format(o.format, "--format"));
  std::string method = o.method;
  std::optional<ClockConfig> clock;
  if (method != "exact" && method != "basic") {
    ClockConfig c;
    if (method == "restart" || method == "restartable") {
      c.mode = ClockMode::restartable;
    } else if (method == "continuous") {
      c.mode = ClockMode::continuous;
    } else if (method == "clock") {
      try {
        c.mode = parse_clock_mode(o.clock_mode);
      } catch (const ConfigError& e) {
        throw ConfigError(std::string("--clock-mode: ") + e.what());
      }
    } else {
      throw ConfigError("--method: unknown method '" + method + "' (expected exact, restart, continuous or clock)");
    }
    if (!o.clock.empty() && !o.period.empty()) throw ConfigError("--clock and --period are mutually exclusive");
    if (!o.clock.empty()) {
      const double f = units::parse_frequency(o.clock, "--clock");
      if (!(f > 0.0)) throw ConfigError("--clock must be positive");
      c.period = 1.0 / f;
    } else if (!o.period.empty()) {
      c.period = units::parse_duration(o.period, "--period");
      if (!(c.period > 0.0)) throw ConfigError("--period must be positive");
    } else {
      throw ConfigError("--clock or --period is required for clocked extraction");
    }
    c.phase = parse_phase(o.phase, c.period);
    if (c.mode == ClockMode::restartable && c.phase != 0.0) {
      throw ConfigError("--phase applies to the continuous clock only");
    }
    c.skew = units::parse_duration(o.skew, "--skew");
    c.validate();
    clock = c;
  } else if (o.counter) {
    throw ConfigError("--counter requires a restartable clock");
  }

  Extraction ext;
  if (!clock) {
    ext = extract_basic(s);
  } else if (o.counter) {
    ext = extract_updown_counter(s, *clock);
  } else {
    ext = extract_clocked(s, *clock);
  }

  Json side;
  side["method"] = clock ? (clock->mode == ClockMode::continuous ? "continuous" : "restartable") : "exact";
  side["counter"] = o.counter;
  side["clock"] = clock ? to_json(*clock) : Json(nullptr);
  side["stats"] = to_json(ext.stats);
  side["efficiency"] = ext.stats.bits_per_event();
  side["source"] = to_json(s.meta());
  write_bit_file(o.out, ext.bits, side);

  m.config = {{"method", side["method"]}, {"counter", o.counter}, {"clock", side["clock"]}, {"format", o.format}};
  if (clock && o.phase.size()) m.config["phase_fraction"] = clock->phase / clock->period;
  m.inputs.push_back(o.input);
  m.outputs = {o.out, sidecar_path(o.out)};
  manifest_path = manifest_for(o.manifest, o.out);
  for (const auto& w : clock ? clock->warnings() : std::vector<std::string>{}) out << "warning: " << w << "\n";
  out << "events " << ext.stats.events_consumed << ", pairs " << ext.stats.pairs_formed << ", ties "
      << ext.stats.ties_discarded << ", bits " << ext.stats.bits_emitted << ", efficiency "
      << ext.stats.bits_per_event() << "\n";
  return kOk;
}

// ---- analyze ----

struct AnalyzeOpts {
  std::string input, json, text, manifest;
  int lags = 32;
  bool quiet = false;
};

int cmd_analyze(const AnalyzeOpts& o, unsigned jobs, Manifest& m, fs::path& manifest_path, std::ostream& out,
                std::ostream& err) {
  if (o.lags < 1 || o.lags > 63) throw ConfigError("--lags must lie in [1, 63]");
  const BitBuffer bits = read_bit_file(o.input);
  AnalysisReport r = ent_battery_sharded(bits, o.lags, std::max(1U, jobs) * 4, jobs);
  if (const auto side = sidecar_path(o.input); fs::exists(side)) {
    const Json j = read_json(side);
    if (j.contains("efficiency") && j["efficiency"].is_number()) r.efficiency = j["efficiency"].get<double>();
    m.inputs.push_back(side);
  }
  if (r.autocorr_error) err << "autocorrelation: " << *r.autocorr_error << "\n";
  m.config = {{"lags", o.lags}};
  m.inputs.insert(m.inputs.begin(), o.input);
  if (!o.json.empty()) {
    write_json(o.json, to_json(r));
    m.outputs.push_back(o.json);
  }
  const std::string text = render_report_text(r);
  if (!o.text.empty()) {
    write_text_file(o.text, text);
    m.outputs.push_back(o.text);
  }
  if (!o.quiet) out << text;
  manifest_path = manifest_for(o.manifest, !o.json.empty() ? fs::path(o.json) : fs::path(o.text));
  return kOk;
}

// ---- sweep ----

struct SweepOpts {
  std::string method = "continuous", x = "0.02:20:log20", events = "1e7", dead_time = "0", skew = "0", seed = "1";
  std::string replicates = "1", out, manifest;
};

int cmd_sweep(const SweepOpts& o, unsigned jobs, Manifest& m, fs::path& manifest_path, std::ostream& out) {
  SweepSpec spec;
  try {
    spec.method = parse_method(o.method);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("--method: ") + e.what());
  }
  spec.x_grid = parse_x_grid(o.x);
  spec.events_per_point = units::parse_count(o.events, "--events");
  spec.dead_time = units::parse_number(o.dead_time, "--dead-time");
  spec.skew = units::parse_number(o.skew, "--skew");
  spec.seed = units::parse_count(o.seed, "--seed");
  spec.replicates = static_cast<unsigned>(units::parse_count(o.replicates, "--replicates"));
  const SweepResult r = sweep(spec, jobs);
  const std::string csv = sweep_csv(r);
  if (o.out.empty()) {
    out << csv;
  } else {
    write_text_file(o.out, csv);
    m.outputs.push_back(o.out);
  }
  m.config = {{"method", to_string(spec.method)},   {"x_grid", spec.x_grid},
              {"events_per_point", spec.events_per_point}, {"dead_time_tau", spec.dead_time},
              {"skew_tau", spec.skew},               {"replicates", spec.replicates}};
  m.seed = spec.seed;
  manifest_path = manifest_for(o.manifest, o.out);
  for (double x : r.flagged_x) out << "flagged: null check at x=" << x << " failed too often\n";
  return kOk;
}

// ---- validate ----

struct ValidateOpts {
  std::string check, x, dead_times = "0,0.5", dt = "0.02", bits, events, seed = "1", out, manifest;
  std::string prob = "0.5", ap_tau = "1000ns", rate = "2MHz", clock = "48MHz";
};

int cmd_validate(const ValidateOpts& o, unsigned jobs, Manifest& m, fs::path& manifest_path, std::ostream& out) {
  const std::uint64_t seed = units::parse_count(o.seed, "--seed");
  ValidationReport v;
  if (o.check == "dead-time") {
    const double x = o.x.empty() ? 0.3 : units::parse_number(o.x, "--x");
    const auto dts = parse_list(o.dead_times, "--dead-times");
    const std::uint64_t bits = o.bits.empty() ? 40'000'000 : units::parse_count(o.bits, "--bits");
    v = validate_dead_time_cancellation(x, dts, bits, seed, jobs);
  } else if (o.check == "bias-model") {
    const auto xs = o.x.empty() ? std::vector<double>{0.1} : parse_list(o.x, "--x");
    const auto dts = parse_list(o.dt, "--dt");
    std::uint64_t bits = 0;
    if (o.bits.empty()) {
      double smallest = INFINITY;
      for (double x : xs) {
        for (double d : dts) smallest = std::min(smallest, bias_model(x, d));
      }
      bits = std::max<std::uint64_t>(10'000'000, required_bits_for_bias(smallest));
    } else {
      bits = units::parse_count(o.bits, "--bits");
    }
    try {
      v = validate_bias_model(xs, dts, bits, seed, jobs);
    } catch (const InsufficientDataError& e) {
      throw ConfigError(std::string("--bits: ") + e.what());
    }
  } else if (o.check == "prototype") {
    const std::uint64_t events = o.events.empty() ? 100'000'000 : units::parse_count(o.events, "--events");
    v = reproduce_prototype(events, seed).validation;
  } else if (o.check == "afterpulse") {
    const double rate = units::parse_frequency(o.rate, "--rate");
    const double clock = units::parse_frequency(o.clock, "--clock");
    if (!(rate > 0.0)) throw ConfigError("--rate must be positive");
    if (!(clock > 0.0)) throw ConfigError("--clock must be positive");
    const std::uint64_t events = o.events.empty() ? 1'000'000 : units::parse_count(o.events, "--events");
    v = afterpulse_study(1.0 / rate, 1.0 / clock, units::parse_number(o.prob, "--afterpulse-prob"),
                         units::parse_duration(o.ap_tau, "--afterpulse-tau"), events, seed);
  } else {
    throw ConfigError("--check: unknown check '" + o.check +
                      "' (expected dead-time, bias-model, prototype or afterpulse)");
  }
  const Json j = to_json(v);
  if (o.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_json(o.out, j);
    m.outputs.push_back(o.out);
    for (const auto& c : v.checks) {
      out << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.measured << " (sigma " << c.sigma << ")\n";
    }
  }
  m.config = {{"check", o.check}, {"params", v.params}};
  m.seed = seed;
  manifest_path = manifest_for(o.manifest, o.out);
  return v.pass() ? kOk : kCheckFailed;
}

// ---- ingest ----

struct IngestOpts {
  std::string input, format = "binary", export_path, export_format = "binary", histogram, json, manifest;
};

int cmd_ingest(const IngestOpts& o, Manifest& m, fs::path& manifest_path, std::ostream& out) {
  const EventStream s = ingest_timestamps(o.input, parse_format(o.format, "--format"));
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["source"] = o.input;
  j["events"] = s.size();
  if (s.size() >= 2) {
    const double span = s[s.size() - 1] - s[0];
    j["duration_s"] = span;
    j["mean_interval_s"] = span / static_cast<double>(s.size() - 1);
    const IntervalHistogram h = interval_histogram(s);
    j["fitted_tau_s"] = h.fitted_tau;
    j["cutoff_estimate_s"] = h.cutoff_estimate;
    j["fit_samples"] = h.fit_samples;
    j["goodness"] = h.goodness;
    if (!o.histogram.empty()) {
      write_text_file(o.histogram, histogram_csv(h));
      m.outputs.push_back(o.histogram);
    }
  } else if (!o.histogram.empty()) {
    throw InsufficientDataError("--histogram needs at least 2 events");
  }
  if (!o.export_path.empty()) {
    const ExportSummary sum = export_timestamps(s, o.export_path, parse_format(o.export_format, "--export-format"));
    j["exported_records"] = sum.records;
    j["adjusted_records"] = sum.adjusted;
    m.outputs.push_back(o.export_path);
  }
  if (!o.json.empty()) {
    write_json(o.json, j);
    m.outputs.push_back(o.json);
  }
  out << j.dump(2) << "\n";
  m.inputs.push_back(o.input);
  m.config = {{"format", o.format}, {"export_format", o.export_format}};
  manifest_path = manifest_for(o.manifest, !o.export_path.empty() ? fs::path(o.export_path) : fs::path(o.json));
  return kOk;
}

// ---- oracle ----

struct OracleOpts {
  std::string x, dead_time = "0", skew = "0", out, manifest;
};

int cmd_oracle(const OracleOpts& o, Manifest& m, fs::path& manifest_path, std::ostream& out) {
  const auto grid = parse_x_grid(o.x);
  const double dead = units::parse_number(o.dead_time, "--dead-time");
  const double skew = units::parse_number(o.skew, "--skew");
  if (!(dead >= 0.0)) throw ConfigError("--dead-time must be >= 0");
  if (!(skew >= 0.0)) throw ConfigError("--skew must be >= 0");
  Json rows = Json::array();
  for (double x : grid) {
    const OracleResult r = oracle_restartable(x);
    const RestartableExact ex = restartable_exact(x, dead / x, skew / x);
    rows.push_back({{"x", x},
                    {"q", r.q},
                    {"p_tie", r.p_tie},
                    {"p_bit", r.p_bit},
                    {"eta_exact", r.eta_exact},
                    {"eta_paper", r.eta_paper},
                    {"a_asymptotic", a_asymptotic(x)},
                    {"with_dead_time_and_skew", {{"p_tie", ex.p_tie}, {"eta", ex.eta}, {"bias", ex.bias}}}});
  }
  Json j{{"schema_version", kSchemaVersion}, {"dead_time_tau", dead}, {"skew_tau", skew}, {"points", rows}};
  if (o.out.empty()) {
    out << j.dump(2) << "\n";
  } else {
    write_json(o.out, j);
    m.outputs.push_back(o.out);
  }
  m.config = {{"x_grid", grid}, {"dead_time_tau", dead}, {"skew_tau", skew}};
  manifest_path = manifest_for(o.manifest, o.out);
  return kOk;
}

// ---- replay ----

int cmd_replay(const std::string& manifest, std::ostream& out, std::ostream& err) {
  const Json m = read_json(manifest);
  if (!m.contains("argv") || !m["argv"].is_array()) throw DataError(manifest + ": missing argv");
  const auto args = m["argv"].get<std::vector<std::string>>();
  const fs::path saved = fs::current_path();
  if (m.contains("cwd")) fs::current_path(m["cwd"].get<std::string>());
  int code = kOk;
  try {
    code = run(args, out, err);
  } catch (...) {
    fs::current_path(saved);
    throw;
  }
  bool same = true;
  for (const auto& f : m["outputs"]) {
    const fs::path p = f["path"].get<std::string>();
    const std::string now = fs::exists(p) ? digest_hex(p) : "missing";
    if (now != f["fnv1a64"].get<std::string>()) {
      same = false;
      err << "replay: " << p.string() << " differs from the recorded output\n";
    }
  }
  fs::current_path(saved);
  if (code != kOk && code != kCheckFailed) return code;
  out << (same ? "replay: outputs identical\n" : "replay: outputs differ\n");
  return same ? kOk : kCheckFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Timing-based random bit generation: simulate, extract, analyze, validate", "photonbits"};
  app.set_version_flag("--version", PHOTONBITS_VERSION);
  app.require_subcommand(1);
  std::string jobs_text;
  app.add_option("--jobs,-j", jobs_text, "worker thread cap (default: hardware threads)");

  SimulateOpts sim;
  auto* c_sim = app.add_subcommand("simulate", "generate a Poisson detection stream");
  c_sim->add_option("--rate", sim.rate, "mean event rate, e.g. 2MHz");
  c_sim->add_option("--tau", sim.tau, "mean interval, e.g. 500ns (alternative to --rate)");
  c_sim->add_option("--events", sim.events, "detected events to write")->required();
  c_sim->add_option("--dead-time", sim.dead_time, "non-paralyzable dead time, e.g. 25ns");
  c_sim->add_option("--afterpulse-prob", sim.ap_prob, "afterpulse probability per event");
  c_sim->add_option("--afterpulse-tau", sim.ap_tau, "afterpulse delay constant");
  c_sim->add_option("--seed", sim.seed, "random seed");
  c_sim->add_option("--out,-o", sim.out, "timestamp file")->required();
  c_sim->add_option("--format", sim.format, "binary (u64 ns) or csv (seconds)");
  c_sim->add_option("--histogram", sim.histogram, "also write the interval histogram CSV");
  c_sim->add_option("--manifest", sim.manifest, "manifest path (default <out>.manifest.json)");

  ExtractOpts ex;
  auto* c_ex = app.add_subcommand("extract", "turn a timestamp file into bits");
  c_ex->add_option("input", ex.input, "timestamp file")->required();
  c_ex->add_option("--out,-o", ex.out, "packed bit file")->required();
  c_ex->add_option("--method", ex.method, "exact, restart, continuous or clock");
  c_ex->add_option("--clock", ex.clock, "clock frequency, e.g. 48MHz");
  c_ex->add_option("--period", ex.period, "clock period (alternative to --clock)");
  c_ex->add_option("--clock-mode", ex.clock_mode, "restartable or continuous (with --method clock)");
  c_ex->add_option("--phase", ex.phase, "continuous clock phase: fraction of a period or a duration");
  c_ex->add_option("--skew", ex.skew, "extra length of the up-counting window, e.g. 2ns");
  c_ex->add_flag("--counter", ex.counter, "use the up/down counter realization");
  c_ex->add_option("--format", ex.format, "input format: binary or csv");
  c_ex->add_option("--manifest", ex.manifest, "manifest path (default <out>.manifest.json)");

  AnalyzeOpts an;
  auto* c_an = app.add_subcommand("analyze", "statistical report of a bit file");
  c_an->add_option("input", an.input, "packed bit file")->required();
  c_an->add_option("--lags", an.lags, "highest autocorrelation lag (1..63)");
  c_an->add_option("--json", an.json, "write the JSON report here");
  c_an->add_option("--text", an.text, "write the text report here");
  c_an->add_flag("--quiet,-q", an.quiet, "do not print the text report");
  c_an->add_option("--manifest", an.manifest, "manifest path (default <json>.manifest.json)");

  SweepOpts sw;
  auto* c_sw = app.add_subcommand("sweep", "a1 and efficiency over a grid of x = T/tau");
  c_sw->add_option("--method", sw.method, "continuous, restart or exact");
  c_sw->add_option("--x", sw.x, "grid: a:b:logN, a:b:linN or a,b,c");
  c_sw->add_option("--events", sw.events, "events per point");
  c_sw->add_option("--dead-time", sw.dead_time, "dead time in units of tau");
  c_sw->add_option("--skew", sw.skew, "skew in units of tau");
  c_sw->add_option("--seed", sw.seed, "master seed");
  c_sw->add_option("--replicates", sw.replicates, "replicates per point");
  c_sw->add_option("--out,-o", sw.out, "CSV output (default stdout)");
  c_sw->add_option("--manifest", sw.manifest, "manifest path (default <out>.manifest.json)");

  ValidateOpts va;
  auto* c_va = app.add_subcommand("validate", "run a named end-to-end check");
  c_va->add_option("--check", va.check, "dead-time, bias-model, prototype or afterpulse")->required();
  c_va->add_option("--x", va.x, "x = T/tau (comma list for bias-model)");
  c_va->add_option("--dead-times", va.dead_times, "dead times in units of tau, must include 0");
  c_va->add_option("--dt", va.dt, "skew grid in units of tau (bias-model)");
  c_va->add_option("--bits", va.bits, "bits per run");
  c_va->add_option("--events", va.events, "events (prototype, afterpulse)");
  c_va->add_option("--afterpulse-prob", va.prob, "afterpulse probability (afterpulse)");
  c_va->add_option("--afterpulse-tau", va.ap_tau, "afterpulse delay constant (afterpulse)");
  c_va->add_option("--rate", va.rate, "event rate (afterpulse)");
  c_va->add_option("--clock", va.clock, "clock frequency (afterpulse)");
  c_va->add_option("--seed", va.seed, "master seed");
  c_va->add_option("--out,-o", va.out, "JSON report (default stdout)");
  c_va->add_option("--manifest", va.manifest, "manifest path (default <out>.manifest.json)");

  IngestOpts in;
  auto* c_in = app.add_subcommand("ingest", "read, characterize and convert a timestamp file");
  c_in->add_option("input", in.input, "timestamp file")->required();
  c_in->add_option("--format", in.format, "binary or csv");
  c_in->add_option("--export", in.export_path, "write the stream in --export-format");
  c_in->add_option("--export-format", in.export_format, "binary or csv");
  c_in->add_option("--histogram", in.histogram, "interval histogram CSV");
  c_in->add_option("--json", in.json, "summary JSON");
  c_in->add_option("--manifest", in.manifest, "manifest path");

  OracleOpts orc;
  auto* c_or = app.add_subcommand("oracle", "exact restartable-clock tie rate, efficiency and bias");
  c_or->add_option("--x", orc.x, "x grid: a:b:logN, a:b:linN or a,b,c")->required();
  c_or->add_option("--dead-time", orc.dead_time, "dead time in units of tau");
  c_or->add_option("--skew", orc.skew, "skew in units of tau");
  c_or->add_option("--out,-o", orc.out, "JSON output (default stdout)");
  c_or->add_option("--manifest", orc.manifest, "manifest path");

  std::string replay_path;
  auto* c_re = app.add_subcommand("replay", "re-run a manifest and compare outputs byte for byte");
  c_re->add_option("manifest", replay_path, "manifest JSON")->required();

  std::vector<std::string> argv_store{"photonbits"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    unsigned jobs = std::max(1U, std::thread::hardware_concurrency());
    if (!jobs_text.empty()) {
      jobs = static_cast<unsigned>(units::parse_count(jobs_text, "--jobs"));
      if (jobs == 0) throw ConfigError("--jobs must be at least 1");
    }
    if (c_re->parsed()) return cmd_replay(replay_path, out, err);

    Manifest m;
    fs::path manifest_path;
    const auto start = std::chrono::steady_clock::now();
    int code = kOk;
    if (c_sim->parsed()) {
      m.command = "simulate";
      code = cmd_simulate(sim, m, manifest_path, out);
    } else if (c_ex->parsed()) {
      m.command = "extract";
      code = cmd_extract(ex, m, manifest_path, out);
    } else if (c_an->parsed()) {
      m.command = "analyze";
      code = cmd_analyze(an, jobs, m, manifest_path, out, err);
    } else if (c_sw->parsed()) {
      m.command = "sweep";
      code = cmd_sweep(sw, jobs, m, manifest_path, out);
    } else if (c_va->parsed()) {
      m.command = "validate";
      code = cmd_validate(va, jobs, m, manifest_path, out);
    } else if (c_in->parsed()) {
      m.command = "ingest";
      code = cmd_ingest(in, m, manifest_path, out);
    } else if (c_or->parsed()) {
      m.command = "oracle";
      code = cmd_oracle(orc, m, manifest_path, out);
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(manifest_path, m, args, seconds);
    return code;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what();
    if (e.record() != 0) err << " (record " << e.record() << ")";
    err << "\n";
    return kDataError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
}

}  // namespace photonbits::cli
