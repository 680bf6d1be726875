#pragma once

#include "passat/scenario.hpp"
#include "passat/simulate.hpp"
#include "passat/tensor.hpp"

namespace passat {

// Biased estimator r_{m,n}(l) = (1/Ns) sum_t x_m(t+l) x_n*(t) over valid t,
// l = -L..L. The negative-lag slices are set to the Hermitian transpose of
// the positive ones (exact for this estimator; enforced regardless).
CorrelationTensor estimate_correlation_tensor(const SampleMatrix& x, int L);

// Mean of the N-K smallest eigenvalues of the (Hermitian) lag-0 slice.
double estimate_noise_power(const Mat& lag0_slice, int K);

// Subtracts sigma2 from the lag-0 diagonal only. Negative diagonal entries
// are permitted (estimator noise); Hermitianness is preserved.
CorrelationTensor denoise_zero_lag(const CorrelationTensor& tensor, double sigma2);

// Default lag count: L*Ts spans >= 4/B_min, capped at Ns/100, at least 1.
int default_max_lag(double fs_hz, double min_bandwidth_hz, std::int64_t num_samples);
int default_max_lag(const Scenario& scenario);

}  // namespace passat
