#include "passat/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "passat/io.hpp"
#include "passat/rng.hpp"

namespace passat {

namespace {

// Sub-stream ids for the solver seeds, disjoint from the synthesis streams
// (noise 0, basebands 1 + k).
constexpr std::uint64_t kDetectStream = 998;
constexpr std::uint64_t kAlsStream = 999;

int resolve_max_lag(const Scenario& sc, const PipelineOptions& opts) {
  if (opts.max_lag > 0) return opts.max_lag;
  if (sc.sampling.max_lag > 0) return sc.sampling.max_lag;
  return default_max_lag(sc);
}

}  // namespace

PipelineResult run_estimate_pipeline_on_tensor(const Scenario& sc, const CorrelationTensor& t,
                                               const PipelineOptions& opts) {
  const auto report = validate_scenario(sc);
  if (!report.all_pass()) {
    throw ValidationError("scenario validation failed:\n" + report.to_text());
  }
  if (t.N != sc.array.num_antennas) {
    throw ValidationError("estimate: tensor antenna count does not match the scenario");
  }

  PipelineResult res;
  res.max_lag = t.L;
  res.tensor = t;
  res.warnings.insert(res.warnings.end(), report.warnings.begin(), report.warnings.end());

  const std::uint64_t base_seed = opts.seed != 0 ? opts.seed : sc.seed;
  const int N = t.N;

  if (opts.rank > 0) {
    res.rank = opts.rank;
    res.auto_rank = false;
  } else {
    res.auto_rank = true;
    const int k_over = opts.k_over > 0 ? opts.k_over : N;
    const double mu_rel = opts.mu_rel > 0.0 ? opts.mu_rel : 3e-2;
    const double mu_abs = mu_rel * t.frobenius_norm();
    auto [detected, k_hat] =
        cp_als_regularized(t, k_over, mu_abs, opts.detect_tol, opts.detect_max_iter,
                           substream_seed(base_seed, kDetectStream));
    (void)detected;
    res.rank = k_hat;
  }

  if (res.rank < N) {
    res.sigma2_hat = estimate_noise_power(t.slice(0), res.rank);
  } else {
    res.sigma2_hat = 0.0;
    res.warnings.push_back("detected rank is not below the antenna count; noise floor not estimated");
  }

  const CorrelationTensor working =
      opts.denoise ? denoise_zero_lag(t, res.sigma2_hat) : t;

  CpOptions cp;
  cp.init = CpInit::random;
  cp.tol = opts.tol;
  cp.max_iter = opts.max_iter;
  cp.restarts = opts.restarts;
  cp.mu = 0.0;
  cp.seed = substream_seed(base_seed, kAlsStream);
  res.factors = cp_als(working, res.rank, cp);
  res.fit = fit_residual(working, res.factors.R, res.factors.A, res.factors.B);
  if (!res.factors.converged) {
    res.warnings.push_back("decomposition stopped at the iteration cap");
  }

  res.report = recover_all(res.factors, sc.array, sc.sampling.fs_hz, opts.recovery);
  return res;
}

PipelineResult run_estimate_pipeline(const Scenario& sc, const SampleMatrix& x,
                                     const PipelineOptions& opts) {
  if (x.data.rows() != sc.array.num_antennas) {
    throw ValidationError("estimate: sample row count does not match the antenna count");
  }
  if (x.sample_rate_hz > 0.0 &&
      std::abs(x.sample_rate_hz - sc.sampling.fs_hz) > 1e-6 * sc.sampling.fs_hz) {
    throw ValidationError("estimate: sample file rate does not match the scenario fs");
  }
  const int L = resolve_max_lag(sc, opts);
  return run_estimate_pipeline_on_tensor(sc, estimate_correlation_tensor(x, L), opts);
}

PipelineResult run_estimate_pipeline(const Scenario& sc, const PipelineOptions& opts) {
  const int L = resolve_max_lag(sc, opts);
  return run_estimate_pipeline_on_tensor(sc, exact_correlation_tensor(sc, L), opts);
}

std::string estimates_to_csv(const EstimateReport& report) {
  std::ostringstream out;
  out << "source_id,f_hat_hz,theta_hat_rad,tau_hat_s,flags\n";
  for (const auto& s : report.sources) {
    out << s.source_id << ',' << format_g17(s.f_hat_hz) << ',' << format_g17(s.theta_hat_rad)
        << ',' << format_g17(s.tau_hat_s) << ',';
    bool first = true;
    for (const auto& f : s.flags) {
      if (!first) out << ';';
      out << f;
      first = false;
    }
    out << '\n';
  }
  return out.str();
}

std::string spectrum_to_csv(const SpectrumEstimate& spectrum) {
  std::ostringstream out;
  out << "omega_rad_s,power\n";
  for (std::size_t i = 0; i < spectrum.omega_grid.size(); ++i) {
    out << format_g17(spectrum.omega_grid[i]) << ',' << format_g17(spectrum.power[i]) << '\n';
  }
  return out.str();
}

std::string crb_to_csv(const CrbReport& report) {
  std::ostringstream out;
  out << "param_name,crb_value\n";
  for (std::size_t i = 0; i < report.param_names.size(); ++i) {
    out << report.param_names[i] << ','
        << format_g17(report.crb_diag(static_cast<Eigen::Index>(i))) << '\n';
  }
  return out.str();
}

}  // namespace passat
