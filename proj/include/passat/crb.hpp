#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "passat/scenario.hpp"

namespace passat {

// Estimation-theoretic model for the vectorized sample block (antenna-major,
// time inner). Parameters, in order:
//   xi_k  = omega_k * tau_k                    (electrical spacing phase)
//   psi_k = omega_k / c_scale                  (scaled carrier)
//   per source k: p_0 (real), Re p_1..Re p_L, Im p_1..Im p_L
//   sigma2
// giving 2K + K(2L+1) + 1 real parameters (just sigma2 when K == 0).
struct CrbModel {
  int N = 0;
  std::int64_t Ns = 0;
  int K = 0;
  int L = 0;  // modeled correlation depth
  double c_scale = 1e9;
  std::vector<double> xi;
  std::vector<double> psi;
  std::vector<Vec> p;  // per source, entries l = 0..L
  std::vector<double> delays_s;
  double sigma2 = 1.0;

  int param_count() const { return K == 0 ? 1 : 2 * K + K * (2 * L + 1) + 1; }
  std::vector<std::string> param_names() const;
};

// First lag where the source envelope falls below 1e-3 of its peak, maximized
// over sources and capped at min(Ns - 1, 512); 0 when there are no sources.
int default_crb_lag(const Scenario& scenario, std::int64_t num_samples);

// ns_override > 0 replaces the scenario sample count; lag_override >= 0
// replaces the default lag rule.
CrbModel crb_model_from_scenario(const Scenario& scenario, std::int64_t ns_override = 0,
                                 int lag_override = -1);

// a_k(n) = exp(-j(n xi_k + c_scale * Delta_n * psi_k)), n = 0..N-1.
Vec crb_steering(const CrbModel& model, int k);

// Banded Hermitian Toeplitz from p(0..L): entry (t, t') = p(t-t') on the
// lower band, conjugate on the upper, zero beyond the band.
Mat toeplitz_band(const Vec& p, std::int64_t ns);

// Dense covariance sum_k (a_k a_k^H) kron P_k + sigma2 I. Throws
// ValidationError when N * Ns exceeds 4096 (dense size cap).
Mat assemble_Rx(const CrbModel& model);

// Dense derivative of Rx for every parameter, in parameter order.
std::vector<Mat> partial_derivatives(const CrbModel& model);

// Fisher information Omega_ij = tr(Rx^-1 D_i Rx^-1 D_j). fim() evaluates the
// entries through block/trace identities and an FFT correlation table and is
// the production path; fim_dense() forms every D_i explicitly and is meant
// for cross-checks at small sizes. Both verify that the accumulated entries
// are real to within 1e-10 relative residue.
RealMat fim(const CrbModel& model);
RealMat fim_dense(const CrbModel& model);

struct CrbReport {
  RealMat fim;
  RealVec crb_diag;  // diagonal of the FIM inverse, parameter order
  std::vector<std::string> param_names;
  double condition_number = 0.0;
  bool used_pinv = false;  // eigenvalue cutoff fallback beyond cond 1e12
};

CrbReport crb(const CrbModel& model);

}  // namespace passat
