#include "passat/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace passat {

double Scenario::total_power() const {
  double p = 0.0;
  for (const auto& s : sources) p += s.power;
  return p;
}

double Scenario::sigma2() const {
  if (sources.empty()) return 1.0;
  return total_power() * std::pow(10.0, -snr_db / 10.0);
}

bool ValidationReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

std::string ValidationReport::to_text() const {
  std::ostringstream os;
  for (const auto& e : entries)
    os << e.assumption << ": " << (e.pass ? "pass" : "FAIL") << " (" << e.detail << ")\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

ValidationReport validate_scenario(const Scenario& sc) {
  ValidationReport rep;
  const int N = sc.array.num_antennas;
  const std::size_t K = sc.sources.size();

  // A1: well-posed source set (uncorrelated WSS bandlimited sources exist
  // with positive power/bandwidth, fewer sources than antennas).
  {
    bool ok = K >= 1 && static_cast<int>(K) < N;
    std::string detail = ok ? "K=" + std::to_string(K) + " sources, N=" + std::to_string(N)
                            : "need 1 <= K < N (K=" + std::to_string(K) +
                                  ", N=" + std::to_string(N) + ")";
    for (std::size_t k = 0; k < K; ++k) {
      const auto& s = sc.sources[k];
      if (!(s.power > 0.0) || !std::isfinite(s.power)) {
        ok = false;
        detail = "source " + std::to_string(k) + " power = " + std::to_string(s.power);
      }
      if (!(s.bandwidth_hz > 0.0) || !std::isfinite(s.bandwidth_hz)) {
        ok = false;
        detail = "source " + std::to_string(k) + " bandwidth = " + std::to_string(s.bandwidth_hz);
      }
    }
    rep.entries.push_back({"A1", ok, detail});
  }

  // A2: distinct (theta, omega) pairs.
  {
    bool ok = true;
    std::string detail = "all (theta, omega) pairs distinct";
    for (std::size_t i = 0; i < K && ok; ++i)
      for (std::size_t j = i + 1; j < K && ok; ++j) {
        if (sc.sources[i].carrier_hz == sc.sources[j].carrier_hz &&
            sc.sources[i].doa_rad == sc.sources[j].doa_rad) {
          ok = false;
          detail = "sources " + std::to_string(i) + " and " + std::to_string(j) +
                   " share carrier and DoA";
        }
      }
    rep.entries.push_back({"A2", ok, detail});
  }

  // A3: every occupied band inside (0, f_nyq].
  {
    bool ok = sc.array.f_nyq_hz > 0.0;
    std::string detail = ok ? "all bands inside (0, f_nyq]" : "f_nyq must be positive";
    for (std::size_t k = 0; k < K && ok; ++k) {
      const auto& s = sc.sources[k];
      const double lo = s.carrier_hz - 0.5 * s.bandwidth_hz;
      const double hi = s.carrier_hz + 0.5 * s.bandwidth_hz;
      if (!(lo > 0.0) || hi > sc.array.f_nyq_hz) {
        ok = false;
        char buf[160];
        std::snprintf(buf, sizeof buf, "source %zu band [%.6g, %.6g] Hz outside (0, %.6g]", k,
                      lo, hi, sc.array.f_nyq_hz);
        detail = buf;
      }
    }
    rep.entries.push_back({"A3", ok, detail});
  }

  // A4: a usable delay second difference exists.
  {
    bool structural_ok = N >= 3 && static_cast<int>(sc.array.delays_s.size()) == N;
    std::string detail;
    bool ok = false;
    if (!structural_ok) {
      detail = "need N >= 3 delays matching num_antennas";
    } else {
      auto idx = delay_condition_indices(sc.array);
      ok = !idx.empty();
      if (ok) {
        std::ostringstream os;
        os << "usable second-difference indices:";
        for (const auto& di : idx) {
          os << " n=" << di.n << (di.positive() ? "(+)" : "(-)");
          if (di.boundary) {
            os << "[boundary]";
            rep.warnings.push_back("delay second difference at index n=" + std::to_string(di.n) +
                                   " sits exactly on |D2|*f_nyq = 1");
          }
        }
        detail = os.str();
      } else {
        detail = "no index with 0 < |D2|*f_nyq <= 1";
      }
    }
    rep.entries.push_back({"A4", ok, detail});
  }

  // A5: fs >= max_k B_k.
  {
    double bmax = 0.0;
    for (const auto& s : sc.sources) bmax = std::max(bmax, s.bandwidth_hz);
    const bool ok = sc.sampling.fs_hz > 0.0 && sc.sampling.fs_hz >= bmax;
    char buf[120];
    std::snprintf(buf, sizeof buf, "fs = %.6g Hz, max bandwidth = %.6g Hz", sc.sampling.fs_hz,
                  bmax);
    rep.entries.push_back({"A5", ok, buf});
  }

  // A6: 0 < d < C/f_nyq.
  {
    const double limit = sc.array.f_nyq_hz > 0.0
                             ? sc.array.speed_of_light / sc.array.f_nyq_hz
                             : 0.0;
    const bool ok = sc.array.spacing_m > 0.0 && sc.array.spacing_m < limit;
    char buf[120];
    std::snprintf(buf, sizeof buf, "d = %.6g m, C/f_nyq = %.6g m", sc.array.spacing_m, limit);
    rep.entries.push_back({"A6", ok, buf});
  }

  return rep;
}

double tau_of_theta(double theta_rad, const ArrayConfig& array) {
  if (!(theta_rad >= 0.0) || theta_rad >= kPi)
    throw ValidationError("theta outside [0, pi): " + std::to_string(theta_rad));
  return array.spacing_m * std::cos(theta_rad) / array.speed_of_light;
}

Vec steering_vector(const ArrayConfig& array, double theta_rad, double omega) {
  const int N = array.num_antennas;
  if (static_cast<int>(array.delays_s.size()) != N)
    throw ValidationError("delay count does not match num_antennas");
  const double tau = tau_of_theta(theta_rad, array);
  Vec a(N);
  for (int n = 0; n < N; ++n) {
    const double phase = mod_2pi(static_cast<double>(n) * tau * omega + array.delays_s[n] * omega);
    a(n) = cx(std::cos(phase), -std::sin(phase));
  }
  return a;
}

std::vector<DelayIndex> delay_condition_indices(const ArrayConfig& array) {
  std::vector<DelayIndex> out;
  const auto& d = array.delays_s;
  if (d.size() < 3) return out;
  for (std::size_t n = 0; n + 2 < d.size(); ++n) {
    const double d2 = d[n + 2] - 2.0 * d[n + 1] + d[n];
    const double q = std::abs(d2) * array.f_nyq_hz;
    // q below 1e-12 is rounding residue of an affinely spaced design, not a
    // usable second difference.
    if (q > 1e-12 && q <= 1.0 + 1e-9) {
      DelayIndex di;
      di.n = static_cast<int>(n);
      di.d2_s = d2;
      di.boundary = std::abs(q - 1.0) <= 1e-9;
      out.push_back(di);
    }
  }
  return out;
}

namespace {

std::string fmt_g17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string scenario_to_config(const Scenario& sc) {
  std::ostringstream os;
  os << "fnyq_hz = " << fmt_g17(sc.array.f_nyq_hz) << "\n";
  os << "spacing_m = " << fmt_g17(sc.array.spacing_m) << "\n";
  os << "num_antennas = " << sc.array.num_antennas << "\n";
  os << "delays_ns = ";
  for (std::size_t i = 0; i < sc.array.delays_s.size(); ++i) {
    if (i) os << ", ";
    os << fmt_g17(sc.array.delays_s[i] * 1e9);
  }
  os << "\n";
  os << "fs_hz = " << fmt_g17(sc.sampling.fs_hz) << "\n";
  os << "num_samples = " << sc.sampling.num_samples << "\n";
  if (sc.sampling.max_lag > 0) os << "max_lag = " << sc.sampling.max_lag << "\n";
  os << "snr_db = " << fmt_g17(sc.snr_db) << "\n";
  os << "seed = " << sc.seed << "\n";
  for (const auto& s : sc.sources) {
    os << "[source]\n";
    os << "carrier_hz = " << fmt_g17(s.carrier_hz) << "\n";
    os << "bandwidth_hz = " << fmt_g17(s.bandwidth_hz) << "\n";
    os << "doa_rad = " << fmt_g17(s.doa_rad) << "\n";
    os << "power = " << fmt_g17(s.power) << "\n";
  }
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_real(const std::string& v, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (trim(v.substr(pos)).empty()) return x;
  } catch (...) {
  }
  throw ValidationError("config: bad numeric value for '" + key + "': " + v);
}

std::vector<double> parse_list(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(v);
  while (std::getline(is, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_real(item, key));
  }
  return out;
}

}  // namespace

Scenario parse_scenario_config(const std::string& text) {
  Scenario sc;
  bool in_source = false;
  bool have_seed = false;
  std::vector<std::string> seen_global;
  std::istringstream is(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line == "[source]") {
      sc.sources.emplace_back();
      in_source = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (in_source) {
      auto& src = sc.sources.back();
      if (key == "carrier_hz")
        src.carrier_hz = parse_real(val, key);
      else if (key == "bandwidth_hz")
        src.bandwidth_hz = parse_real(val, key);
      else if (key == "doa_rad")
        src.doa_rad = parse_real(val, key);
      else if (key == "power")
        src.power = parse_real(val, key);
      else
        throw ValidationError("config: unknown source key '" + key + "'");
    } else {
      seen_global.push_back(key);
      if (key == "fnyq_hz")
        sc.array.f_nyq_hz = parse_real(val, key);
      else if (key == "spacing_m")
        sc.array.spacing_m = parse_real(val, key);
      else if (key == "num_antennas")
        sc.array.num_antennas = static_cast<int>(parse_real(val, key));
      else if (key == "delays_ns") {
        sc.array.delays_s = parse_list(val, key);
        for (auto& d : sc.array.delays_s) d *= 1e-9;
      } else if (key == "fs_hz")
        sc.sampling.fs_hz = parse_real(val, key);
      else if (key == "num_samples")
        sc.sampling.num_samples = static_cast<std::int64_t>(parse_real(val, key));
      else if (key == "max_lag")
        sc.sampling.max_lag = static_cast<int>(parse_real(val, key));
      else if (key == "snr_db")
        sc.snr_db = parse_real(val, key);
      else if (key == "seed") {
        sc.seed = static_cast<std::uint64_t>(parse_real(val, key));
        have_seed = true;
      } else
        throw ValidationError("config: unknown key '" + key + "'");
    }
  }
  for (const char* req : {"fnyq_hz", "spacing_m", "num_antennas", "delays_ns", "fs_hz",
                          "num_samples", "snr_db"}) {
    if (std::find(seen_global.begin(), seen_global.end(), req) == seen_global.end())
      throw ValidationError(std::string("config: missing required key '") + req + "'");
  }
  if (!have_seed) sc.seed = 1;
  if (static_cast<int>(sc.array.delays_s.size()) != sc.array.num_antennas)
    throw ValidationError("config: delays_ns length must equal num_antennas");
  if (sc.array.num_antennas < 2) throw ValidationError("config: num_antennas must be >= 2");
  if (sc.sampling.num_samples < 1) throw ValidationError("config: num_samples must be >= 1");
  if (sc.sampling.max_lag < 0) throw ValidationError("config: max_lag must be >= 0");
  if (sc.sampling.max_lag > 0 && sc.sampling.num_samples <= 2 * sc.sampling.max_lag)
    throw ValidationError("config: need num_samples > 2*max_lag");
  return sc;
}

std::uint64_t scenario_digest(const Scenario& sc) {
  const std::string doc = scenario_to_config(sc);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : doc) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace passat
