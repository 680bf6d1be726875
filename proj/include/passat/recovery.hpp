#pragma once

#include <set>
#include <string>
#include <vector>

#include "passat/cpd.hpp"
#include "passat/scenario.hpp"

namespace passat {

// Rescales A and B columns to norm sqrt(N) (N = antenna count), folding the
// scale change into the matching R column so the reconstruction is unchanged
// and R columns carry physical correlation values. Zero columns are left
// untouched.
void normalize_factors(Mat& R, Mat& A, Mat& B);

struct CarrierEstimate {
  double omega_rad_s = 0.0;
  std::vector<double> per_index;  // one estimate per usable delay index
  double spread = 0.0;            // max relative deviation of per_index from omega
  std::set<std::string> flags;
};

// Carrier recovery from the phase profile of one steering column, using the
// second differences of the element delays. Throws ValidationError when the
// array has no usable delay index and NumericalError when every usable index
// is excluded by the sign rules.
CarrierEstimate recover_carrier(const Vec& a_col, const ArrayConfig& array);
CarrierEstimate recover_carrier(const Vec& a_col, const ArrayConfig& array,
                                const std::vector<DelayIndex>& indices);

struct DoaEstimate {
  double theta_rad = 0.0;
  double tau_s = 0.0;
  std::set<std::string> flags;
};

DoaEstimate recover_doa(const Vec& a_col, const ArrayConfig& array, double omega_hat);

struct SpectrumEstimate {
  std::vector<double> omega_grid;  // rad/s, centered on the carrier estimate
  std::vector<double> power;       // nonnegative density; integral convention below
  double domega = 0.0;             // grid step, 2*pi*fs / grid_size
  // sum(power) * domega / (2*pi) equals the lag-0 correlation (source power).
  double integral_power() const;
};

// Power spectral density from one correlation column r(-L..L): the column is
// gauge-rotated so r(0) is real positive, Hermitian-symmetrized in lag, and
// evaluated over one alias period centered on omega_hat; negative values are
// clipped to zero.
SpectrumEstimate recover_spectrum(const Vec& r_col, double omega_hat, double fs_hz,
                                  int grid_size = 1024);

// Two-pass power centroid of the recovered spectrum, re-centered between
// passes. Returns omega0 unchanged when the spectrum has no mass. The result
// is clamped to (0, 2*pi*f_nyq).
double refine_carrier_centroid(const Vec& r_col, double omega0, double fs_hz, double f_nyq_hz,
                               int passes = 2, int grid_size = 1024);

struct RecoveryOptions {
  // The centroid pass trades a deterministic shift of a few ppm for noise
  // robustness, so it stays off unless asked for; phase recovery alone is
  // exact on clean factors.
  bool refine_carrier = false;
  int refine_passes = 2;
  int grid_size = 1024;
};

struct SourceRecord {
  int source_id = 0;
  bool ok = false;
  double omega_hat_rad_s = 0.0;
  double f_hat_hz = 0.0;
  double theta_hat_rad = 0.0;
  double tau_hat_s = 0.0;
  double power = 0.0;
  double carrier_spread = 0.0;
  SpectrumEstimate spectrum;
  std::set<std::string> flags;
  std::string error;  // set when ok is false
};

struct EstimateReport {
  std::vector<SourceRecord> sources;
};

// Per-source parameter recovery from a factor set. Failures are isolated per
// column: a column whose recovery throws yields a record with ok == false and
// the error message, and the remaining columns are still processed. Records
// are ordered by recovered carrier (failed columns last).
EstimateReport recover_all(const FactorSet& factors, const ArrayConfig& array, double fs_hz,
                           const RecoveryOptions& opts = {});

}  // namespace passat
