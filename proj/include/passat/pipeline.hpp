#pragma once

#include <string>
#include <vector>

#include "passat/correlation.hpp"
#include "passat/cpd.hpp"
#include "passat/crb.hpp"
#include "passat/recovery.hpp"
#include "passat/simulate.hpp"

namespace passat {

struct PipelineOptions {
  int rank = 0;      // 0 = detect by regularized over-factoring
  int k_over = 0;    // over-factoring width; 0 = antenna count
  int max_lag = 0;   // 0 = scenario value, then the default lag rule
  double mu_rel = -1.0;  // detection weight relative to ||T||_F; < 0 = 3e-2
  double tol = 1e-10;
  int max_iter = 500;
  int restarts = 5;
  double detect_tol = 1e-12;
  int detect_max_iter = 1500;
  bool denoise = true;
  std::uint64_t seed = 0;  // 0 = scenario seed
  RecoveryOptions recovery;
};

struct PipelineResult {
  int max_lag = 0;
  int rank = 0;
  bool auto_rank = false;
  double sigma2_hat = 0.0;
  double fit = 0.0;  // relative residual of the final factors
  CorrelationTensor tensor;  // as estimated, before denoising
  FactorSet factors;
  EstimateReport report;
  std::vector<std::string> warnings;
};

// Full receiver chain: correlation tensor (when starting from samples), rank
// detection on the raw tensor, noise floor from the lag-0 eigenvalues at the
// detected rank, diagonal denoising, fixed-rank decomposition, and per-source
// recovery. The scenario supplies the array geometry, sampling grid, and the
// default lag rule; it is validated on entry.
PipelineResult run_estimate_pipeline(const Scenario& scenario, const SampleMatrix& samples,
                                     const PipelineOptions& opts = {});

// Same chain starting from the ideal model tensor (oracle input).
PipelineResult run_estimate_pipeline(const Scenario& scenario, const PipelineOptions& opts = {});

PipelineResult run_estimate_pipeline_on_tensor(const Scenario& scenario,
                                               const CorrelationTensor& tensor,
                                               const PipelineOptions& opts = {});

// CSV renderings. Columns:
//   estimates: source_id, f_hat_hz, theta_hat_rad, tau_hat_s, flags
//   spectrum:  omega_rad_s, power
//   crb:       param_name, crb_value
// Doubles are %.17g; flags are ';'-joined.
std::string estimates_to_csv(const EstimateReport& report);
std::string spectrum_to_csv(const SpectrumEstimate& spectrum);
std::string crb_to_csv(const CrbReport& report);

}  // namespace passat
