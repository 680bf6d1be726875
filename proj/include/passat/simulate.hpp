#pragma once

#include <cstdint>

#include "passat/scenario.hpp"
#include "passat/tensor.hpp"

namespace passat {

struct SampleMatrix {
  Mat data;  // N x Ns, row n = antenna n
  double sample_rate_hz = 0.0;
  std::uint64_t scenario_digest = 0;
};

// Seed for the baseband sub-stream of source k under a scenario master seed
// (noise uses stream 0, source k uses stream 1+k). Exposed so reference
// harnesses can regenerate a single source's waveform.
std::uint64_t baseband_stream_seed(std::uint64_t master_seed, int source_index);

// Complex WSS baseband, bandlimited to [-B/2, B/2], exact empirical power.
// White Gaussian driving noise shaped by a 257-tap Hamming windowed-sinc
// low-pass (cutoff B/2); the filter warm-up is discarded and the result is
// rescaled to the target power.
Vec generate_baseband(const SourceSpec& source, std::int64_t n_samples, double fs_hz,
                      std::uint64_t seed);

// x_n(l Ts) = sum_k a_nk s_k(l Ts) e^{j omega_k l Ts} + w_n(l Ts).
// Carrier phases are accumulated mod 2pi; noise is circular complex
// Gaussian with variance scenario.sigma2().
SampleMatrix synthesize_array_samples(const Scenario& scenario);

// Ideal-model tensor: slice(l) = sum_k p_k sinc(B_k l Ts) e^{j omega_k l Ts}
// a_k a_k^H, plus sigma^2 I on the lag-0 slice.
CorrelationTensor exact_correlation_tensor(const Scenario& scenario, int L);

// N x K matrix of steering vectors, one column per source.
Mat steering_matrix(const Scenario& scenario);

// (2L+1) x K matrix of model correlation values r_k(l), rows l = -L..L.
Mat exact_correlation_columns(const Scenario& scenario, int L);

}  // namespace passat
