#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "passat/common.hpp"

namespace passat {

struct SourceSpec {
  double carrier_hz = 0.0;    // f_k; omega_k = 2*pi*f_k
  double bandwidth_hz = 0.0;  // B_k
  double doa_rad = 0.0;       // theta_k in [0, pi)
  double power = 1.0;         // E|s_k|^2

  double omega() const { return kTwoPi * carrier_hz; }
};

struct ArrayConfig {
  int num_antennas = 0;          // N
  double spacing_m = 0.0;        // d
  std::vector<double> delays_s;  // Delta_n, length N
  double speed_of_light = kSpeedOfLight;
  double f_nyq_hz = 0.0;
};

struct SamplingConfig {
  double fs_hz = 0.0;     // sampling rate per ADC
  std::int64_t num_samples = 0;
  int max_lag = 0;        // L; 0 = pick the default rule at pipeline entry

  double ts() const { return 1.0 / fs_hz; }
};

struct Scenario {
  std::vector<SourceSpec> sources;
  ArrayConfig array;
  SamplingConfig sampling;
  double snr_db = 0.0;
  std::uint64_t seed = 1;

  // sigma^2 = (sum_k p_k) * 10^(-SNR/10); unit noise floor with no sources.
  double sigma2() const;
  double total_power() const;
};

struct ValidationEntry {
  std::string assumption;  // "A1".."A6"
  bool pass = false;
  std::string detail;      // violated quantity when failing, note otherwise
};

struct ValidationReport {
  std::vector<ValidationEntry> entries;  // exactly six, A1..A6
  std::vector<std::string> warnings;     // e.g. delay second-difference on the boundary

  bool all_pass() const;
  std::string to_text() const;
};

// Six pass/fail entries, one per model assumption. Never throws; failures
// are entries. Structural problems (wrong delay count, Ns <= 2L, ...) are
// reported inside the relevant entry as well.
ValidationReport validate_scenario(const Scenario& scenario);

// tau = d*cos(theta)/C. Throws ValidationError for theta outside [0, pi).
double tau_of_theta(double theta_rad, const ArrayConfig& array);

// a_n = exp(-j((n-1)*tau*omega + Delta_n*omega)), n = 1..N. Phases are
// reduced mod 2pi per element before exponentiation so large omega*Delta
// products do not lose precision.
Vec steering_vector(const ArrayConfig& array, double theta_rad, double omega);

struct DelayIndex {
  int n = 0;        // 0-based position of the second difference
  double d2_s = 0;  // Delta_{n+2} - 2*Delta_{n+1} + Delta_n, seconds
  bool boundary = false;  // |d2| * f_nyq == 1 within tolerance

  bool positive() const { return d2_s > 0.0; }
};

// Indices with 0 < |D2_n| * f_nyq <= 1. The boundary case (== 1) is kept
// and flagged: carrier recovery stays unambiguous on the open interval
// (0, 2*pi*f_nyq). Returns an empty set when no index qualifies; consumers
// that need a nonempty set raise the error.
std::vector<DelayIndex> delay_condition_indices(const ArrayConfig& array);

// Canonical flat key-value document (same format parse_scenario_config reads).
std::string scenario_to_config(const Scenario& scenario);
Scenario parse_scenario_config(const std::string& text);

// FNV-1a over the canonical config document.
std::uint64_t scenario_digest(const Scenario& scenario);

}  // namespace passat
