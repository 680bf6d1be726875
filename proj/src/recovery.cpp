#include "passat/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace passat {

namespace {

std::vector<double> phase_profile(const Vec& a_col) {
  std::vector<double> eta(static_cast<std::size_t>(a_col.size()));
  for (Eigen::Index n = 0; n < a_col.size(); ++n) {
    eta[static_cast<std::size_t>(n)] = mod_2pi(-std::arg(a_col(n)));
  }
  return eta;
}

std::vector<double> wrapped_diff(const std::vector<double>& v) {
  std::vector<double> d(v.size() - 1);
  for (std::size_t n = 0; n + 1 < v.size(); ++n) d[n] = mod_2pi(v[n + 1] - v[n]);
  return d;
}

}  // namespace

void normalize_factors(Mat& R, Mat& A, Mat& B) {
  if (R.cols() != A.cols() || A.cols() != B.cols()) {
    throw ValidationError("normalize_factors: factor column counts differ");
  }
  const double root_n = std::sqrt(static_cast<double>(A.rows()));
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    const double na = A.col(k).norm();
    const double nb = B.col(k).norm();
    if (na <= 0.0 || nb <= 0.0) continue;
    A.col(k) *= root_n / na;
    B.col(k) *= root_n / nb;
    R.col(k) *= na * nb / static_cast<double>(A.rows());
  }
}

CarrierEstimate recover_carrier(const Vec& a_col, const ArrayConfig& array) {
  return recover_carrier(a_col, array, delay_condition_indices(array));
}

CarrierEstimate recover_carrier(const Vec& a_col, const ArrayConfig& array,
                                const std::vector<DelayIndex>& indices) {
  if (a_col.size() != array.num_antennas) {
    throw ValidationError("recover_carrier: column length does not match antenna count");
  }
  if (indices.empty()) {
    throw ValidationError("recover_carrier: array has no usable delay index");
  }

  const std::vector<double> eta = phase_profile(a_col);
  const std::vector<double> beta1 = wrapped_diff(eta);
  const std::vector<double> beta2 = wrapped_diff(beta1);

  CarrierEstimate est;
  for (const DelayIndex& di : indices) {
    const double b2 = beta2[static_cast<std::size_t>(di.n)];
    double omega;
    if (di.d2_s > 0.0) {
      omega = b2 / di.d2_s;
    } else {
      if (b2 == 0.0) continue;  // aliases with omega == 0 on this branch
      omega = (kTwoPi - b2) / (-di.d2_s);
    }
    est.per_index.push_back(omega);
    if (di.boundary) est.flags.insert("delay_boundary");
  }
  if (est.per_index.empty()) {
    throw NumericalError("recover_carrier: every usable delay index was excluded");
  }

  // Average on the circle of circumference 2*pi/s, then unwrap to the branch
  // nearest the first estimate.
  double s = 0.0;
  for (const DelayIndex& di : indices) s = std::max(s, std::abs(di.d2_s));
  cx z = 0.0;
  for (double w : est.per_index) z += std::exp(cx(0.0, w * s));
  z /= static_cast<double>(est.per_index.size());
  const double phi = mod_2pi(std::arg(z));
  const double k = std::round((est.per_index.front() * s - phi) / kTwoPi);
  est.omega_rad_s = (phi + kTwoPi * k) / s;

  double dev = 0.0;
  for (double w : est.per_index) dev = std::max(dev, std::abs(w - est.omega_rad_s));
  if (est.omega_rad_s > 0.0) {
    est.spread = dev / est.omega_rad_s;
  } else {
    est.spread = dev > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  if (est.spread > 0.01) est.flags.insert("carrier_spread");
  return est;
}

DoaEstimate recover_doa(const Vec& a_col, const ArrayConfig& array, double omega_hat) {
  if (a_col.size() != array.num_antennas) {
    throw ValidationError("recover_doa: column length does not match antenna count");
  }
  if (!(omega_hat > 0.0)) {
    throw NumericalError("recover_doa: carrier estimate must be positive");
  }

  const std::vector<double> eta = phase_profile(a_col);
  const std::vector<double> beta1 = wrapped_diff(eta);
  const double tau_max = array.spacing_m / array.speed_of_light;
  const double bound = tau_max * (1.0 + 1e-6);

  DoaEstimate est;
  double acc = 0.0;
  int used = 0;
  for (std::size_t n = 0; n + 1 < eta.size(); ++n) {
    const double dstep = array.delays_s[n + 1] - array.delays_s[n];
    const double m = mod_2pi(beta1[n] - dstep * omega_hat);
    const double cand_pos = m / omega_hat;
    const double cand_neg = (m - kTwoPi) / omega_hat;
    const bool keep_pos = std::abs(cand_pos) <= bound;
    const bool keep_neg = std::abs(cand_neg) <= bound;
    double tau;
    if (keep_pos && keep_neg) {
      est.flags.insert("doa_ambiguity");
      tau = std::abs(cand_pos) <= std::abs(cand_neg) ? cand_pos : cand_neg;
    } else if (keep_pos) {
      tau = cand_pos;
    } else if (keep_neg) {
      tau = cand_neg;
    } else {
      continue;
    }
    acc += tau;
    ++used;
  }
  if (used == 0) throw NumericalError("recover_doa: no admissible delay candidate");

  est.tau_s = acc / static_cast<double>(used);
  const double c = est.tau_s * array.speed_of_light / array.spacing_m;
  est.theta_rad = std::acos(std::clamp(c, -1.0, 1.0));
  return est;
}

double SpectrumEstimate::integral_power() const {
  double acc = 0.0;
  for (double p : power) acc += p;
  return acc * domega / kTwoPi;
}

SpectrumEstimate recover_spectrum(const Vec& r_col, double omega_hat, double fs_hz,
                                  int grid_size) {
  const Eigen::Index len = r_col.size();
  if (len < 1 || len % 2 == 0) {
    throw ValidationError("recover_spectrum: correlation column must have odd length");
  }
  if (grid_size < 2) throw ValidationError("recover_spectrum: grid_size must be at least 2");
  if (fs_hz <= 0.0) throw ValidationError("recover_spectrum: fs must be positive");
  const int L = static_cast<int>((len - 1) / 2);

  // Gauge: rotate so the lag-0 value is real nonnegative, then enforce
  // Hermitian lag symmetry by averaging r(l) with conj(r(-l)).
  Vec r = r_col;
  const cx r0 = r(L);
  if (std::abs(r0) > 0.0) r *= std::exp(cx(0.0, -std::arg(r0)));
  Vec rs = Vec::Zero(len);
  rs(L) = r(L).real();
  for (int l = 1; l <= L; ++l) {
    const cx pos = 0.5 * (r(L + l) + std::conj(r(L - l)));
    rs(L + l) = pos;
    rs(L - l) = std::conj(pos);
  }

  const double ts = 1.0 / fs_hz;
  SpectrumEstimate out;
  out.domega = kTwoPi * fs_hz / static_cast<double>(grid_size);
  out.omega_grid.resize(static_cast<std::size_t>(grid_size));
  out.power.resize(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double w =
        omega_hat + kTwoPi * fs_hz * (static_cast<double>(i) / grid_size - 0.5);
    cx acc = 0.0;
    for (int l = -L; l <= L; ++l) {
      const double ph = mod_2pi(w * l * ts);
      acc += rs(L + l) * cx(std::cos(ph), -std::sin(ph));
    }
    out.omega_grid[static_cast<std::size_t>(i)] = w;
    out.power[static_cast<std::size_t>(i)] = ts * std::max(acc.real(), 0.0);
  }
  return out;
}

double refine_carrier_centroid(const Vec& r_col, double omega0, double fs_hz, double f_nyq_hz,
                               int passes, int grid_size) {
  double omega = omega0;
  for (int p = 0; p < passes; ++p) {
    const SpectrumEstimate spec = recover_spectrum(r_col, omega, fs_hz, grid_size);
    double mass = 0.0, moment = 0.0;
    for (std::size_t i = 0; i < spec.power.size(); ++i) {
      mass += spec.power[i];
      moment += spec.power[i] * spec.omega_grid[i];
    }
    if (mass <= 0.0) break;
    omega = moment / mass;
    const double hi = kTwoPi * f_nyq_hz;
    omega = std::clamp(omega, std::numeric_limits<double>::min(), hi);
  }
  return omega;
}

EstimateReport recover_all(const FactorSet& factors, const ArrayConfig& array, double fs_hz,
                           const RecoveryOptions& opts) {
  Mat R = factors.R;
  Mat A = factors.A;
  Mat B = factors.B;
  normalize_factors(R, A, B);

  EstimateReport report;
  for (Eigen::Index k = 0; k < A.cols(); ++k) {
    SourceRecord rec;
    try {
      const CarrierEstimate carrier = recover_carrier(A.col(k), array);
      rec.flags.insert(carrier.flags.begin(), carrier.flags.end());
      rec.carrier_spread = carrier.spread;
      double omega = carrier.omega_rad_s;
      if (opts.refine_carrier) {
        omega = refine_carrier_centroid(R.col(k), omega, fs_hz, array.f_nyq_hz,
                                        opts.refine_passes, opts.grid_size);
      }
      const DoaEstimate doa = recover_doa(A.col(k), array, omega);
      rec.flags.insert(doa.flags.begin(), doa.flags.end());
      rec.spectrum = recover_spectrum(R.col(k), omega, fs_hz, opts.grid_size);
      rec.omega_hat_rad_s = omega;
      rec.f_hat_hz = omega / kTwoPi;
      rec.theta_hat_rad = doa.theta_rad;
      rec.tau_hat_s = doa.tau_s;
      rec.power = std::abs(R(R.rows() / 2, k));
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
      rec.flags.insert("failed");
    }
    report.sources.push_back(std::move(rec));
  }

  std::stable_sort(report.sources.begin(), report.sources.end(),
                   [](const SourceRecord& a, const SourceRecord& b) {
                     if (a.ok != b.ok) return a.ok;
                     return a.omega_hat_rad_s < b.omega_hat_rad_s;
                   });
  for (std::size_t i = 0; i < report.sources.size(); ++i) {
    report.sources[i].source_id = static_cast<int>(i);
  }
  return report;
}

}  // namespace passat
