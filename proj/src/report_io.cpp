#include "photonbits/report_io.hpp"

#include <cmath>
#include <cstdio>

#include "photonbits/error.hpp"
#include "photonbits/file_io.hpp"

namespace photonbits {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

}  // namespace

Json to_json(const AnalysisReport& r) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["n_bits"] = r.n_bits;
  j["mean"] = r.mean;
  j["bias"] = r.bias.b;
  j["bias_stderr"] = r.bias.std_err;
  Json ac = Json::array();
  for (const auto& e : r.autocorr) ac.push_back({{"lag", e.lag}, {"a", e.a}, {"stderr", e.std_err}});
  j["autocorr"] = ac;
  if (r.autocorr_error) j["autocorr_error"] = *r.autocorr_error;
  if (r.pair_probs) {
    j["pair_probs"] = {{"p00", r.pair_probs->p00}, {"p01", r.pair_probs->p01}, {"p10", r.pair_probs->p10},
                       {"p11", r.pair_probs->p11}};
  } else {
    j["pair_probs"] = nullptr;
  }
  j["entropy"] = r.entropy;
  j["chi_square"] = r.chi_square;
  j["chi_square_p"] = r.chi_square_p;
  j["pi_points"] = r.pi_points;
  j["pi_estimate"] = r.pi_estimate ? Json(*r.pi_estimate) : Json(nullptr);
  j["pi_error"] = r.pi_error ? Json(*r.pi_error) : Json(nullptr);
  j["efficiency"] = r.efficiency ? Json(*r.efficiency) : Json(nullptr);
  return j;
}

Json to_json(const ExtractionStats& s) {
  return {{"events_consumed", s.events_consumed}, {"intervals_formed", s.intervals_formed},
          {"pairs_formed", s.pairs_formed},       {"ties_discarded", s.ties_discarded},
          {"bits_emitted", s.bits_emitted},       {"bits_per_event", s.bits_per_event()},
          {"bits_per_pair", s.bits_per_pair()}};
}

Json to_json(const ClockConfig& c) {
  return {{"period_s", c.period}, {"mode", to_string(c.mode)}, {"phase_s", c.phase}, {"skew_s", c.skew}};
}

Json to_json(const StreamMeta& m) {
  return {{"origin", m.origin},
          {"tau_s", m.tau},
          {"seed", m.seed},
          {"dead_time_s", m.dead_time},
          {"afterpulse_prob", m.afterpulse_prob},
          {"afterpulse_tau_s", m.afterpulse_tau},
          {"filters", m.filters}};
}

std::string render_report_text(const AnalysisReport& r) {
  std::string s;
  s += "Entropy = " + fmt("%.6f", r.entropy) + " bits per bit.\n\n";
  s += "Optimum compression would reduce the size of this " + std::to_string(r.n_bits) + " bit file by " +
       fmt("%.0f", std::floor(100.0 * (1.0 - r.entropy))) + " percent.\n\n";
  s += "Chi square distribution for " + std::to_string(r.n_bits) + " samples is " + fmt("%.2f", r.chi_square) +
       ", and randomly\nwould exceed this value " + fmt("%.2f", 100.0 * r.chi_square_p) +
       " percent of the times.\n\n";
  s += "Arithmetic mean value of data bits is " + fmt("%.6f", r.mean) + " (0.5 = random).\n";
  if (r.pi_estimate) {
    s += "Monte Carlo value for Pi is " + fmt("%.9f", *r.pi_estimate) + " (error " + fmt("%.2f", *r.pi_error) +
         " percent).\n";
  } else {
    s += "Monte Carlo value for Pi is unavailable (fewer than 48 bits).\n";
  }
  s += "Serial correlation coefficients:\n";
  if (r.autocorr_error) {
    s += "  " + *r.autocorr_error + "\n";
  } else {
    for (const auto& e : r.autocorr) {
      s += "  a" + std::to_string(e.lag) + " = " + fmt("%+.6f", e.a) + " +/- " + fmt("%.6f", e.std_err) + "\n";
    }
  }
  if (r.pair_probs) {
    const auto& p = *r.pair_probs;
    s += "Pair probabilities: p00 = " + fmt("%.6f", p.p00) + ", p01 = " + fmt("%.6f", p.p01) +
         ", p10 = " + fmt("%.6f", p.p10) + ", p11 = " + fmt("%.6f", p.p11) + "\n";
  }
  if (r.efficiency) s += "Bit efficiency = " + fmt("%.6f", *r.efficiency) + " bits per event.\n";
  return s;
}

std::filesystem::path sidecar_path(const std::filesystem::path& bit_file) {
  return std::filesystem::path(bit_file.string() + ".json");
}

void write_bit_file(const std::filesystem::path& path, const BitBuffer& bits, Json sidecar) {
  const auto bytes = bits.to_bytes();
  write_file(path, bytes.data(), bytes.size());
  sidecar["schema_version"] = kSchemaVersion;
  sidecar["n_bits"] = bits.size();
  write_json(sidecar_path(path), sidecar);
}

BitBuffer read_bit_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  std::size_t n_bits = bytes.size() * 8;
  if (const auto side = sidecar_path(path); std::filesystem::exists(side)) {
    const Json j = read_json(side);
    if (!j.contains("n_bits") || !j["n_bits"].is_number_unsigned()) {
      throw DataError(side.string() + ": missing n_bits");
    }
    n_bits = j["n_bits"].get<std::size_t>();
  }
  return BitBuffer::from_bytes(bytes, n_bits);
}

void write_json(const std::filesystem::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

Json read_json(const std::filesystem::path& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

}  // namespace photonbits
