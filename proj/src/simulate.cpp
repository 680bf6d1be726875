#include "passat/simulate.hpp"

#include <cmath>

#include "passat/rng.hpp"

namespace passat {

std::uint64_t baseband_stream_seed(std::uint64_t master_seed, int source_index) {
  return substream_seed(master_seed, static_cast<std::uint64_t>(1 + source_index));
}

Vec generate_baseband(const SourceSpec& source, std::int64_t n_samples, double fs_hz,
                      std::uint64_t seed) {
  const double B = source.bandwidth_hz;
  if (B > fs_hz) throw ValidationError("generate_baseband: bandwidth exceeds sample rate");
  if (n_samples < 1) throw ValidationError("generate_baseband: need n_samples >= 1");

  constexpr int M = 257;  // filter length; M-1 warm-up samples discarded
  double h[M];
  for (int i = 0; i < M; ++i) {
    const double n = i - (M - 1) / 2.0;
    const double w = 0.54 - 0.46 * std::cos(kTwoPi * i / (M - 1));
    h[i] = (B / fs_hz) * sinc(B * n / fs_hz) * w;
  }

  Rng rng(seed);
  const std::int64_t total = n_samples + M - 1;
  Vec white(total);
  for (std::int64_t t = 0; t < total; ++t) white(t) = rng.cnormal();

  Vec y = Vec::Zero(n_samples);
  for (std::int64_t t = 0; t < n_samples; ++t) {
    cx acc = 0.0;
    // valid-mode convolution: y[t] = sum_i h[i] * white[t + M - 1 - i]
    for (int i = 0; i < M; ++i) acc += h[i] * white(t + M - 1 - i);
    y(t) = acc;
  }

  const double p = y.squaredNorm() / static_cast<double>(n_samples);
  if (p <= 0.0) throw NumericalError("generate_baseband: degenerate output power");
  y *= std::sqrt(source.power / p);
  return y;
}

SampleMatrix synthesize_array_samples(const Scenario& sc) {
  // The sampled model is defined for any structurally sound scenario (noise
  // only, repeated sources, affine delays, ...); the recoverability
  // assumptions are enforced by the estimation pipeline, not here.
  const int N = sc.array.num_antennas;
  if (N < 1) throw ValidationError("synthesize_array_samples: need at least one antenna");
  if (sc.array.delays_s.size() != static_cast<std::size_t>(N))
    throw ValidationError("synthesize_array_samples: delay list length must match antennas");
  if (sc.sampling.num_samples < 1)
    throw ValidationError("synthesize_array_samples: need num_samples >= 1");
  if (!(sc.sampling.fs_hz > 0.0))
    throw ValidationError("synthesize_array_samples: sample rate must be positive");
  const std::int64_t Ns = sc.sampling.num_samples;
  const double Ts = sc.sampling.ts();

  SampleMatrix out;
  out.data = Mat::Zero(N, Ns);
  out.sample_rate_hz = sc.sampling.fs_hz;
  out.scenario_digest = scenario_digest(sc);

  for (std::size_t k = 0; k < sc.sources.size(); ++k) {
    const auto& src = sc.sources[k];
    const Vec s = generate_baseband(src, Ns, sc.sampling.fs_hz,
                                    baseband_stream_seed(sc.seed, static_cast<int>(k)));
    const Vec a = steering_vector(sc.array, src.doa_rad, src.omega());
    const double dphi = std::fmod(src.omega() * Ts, kTwoPi);
    double phi = 0.0;
    Vec mod(Ns);
    for (std::int64_t t = 0; t < Ns; ++t) {
      mod(t) = s(t) * cx(std::cos(phi), std::sin(phi));
      phi += dphi;
      if (phi >= kTwoPi) phi -= kTwoPi;
    }
    out.data.noalias() += a * mod.transpose();
  }

  const double sigma = std::sqrt(sc.sigma2());
  Rng noise(sc.seed, 0);
  for (int n = 0; n < N; ++n)
    for (std::int64_t t = 0; t < Ns; ++t) out.data(n, t) += sigma * noise.cnormal();

  return out;
}

CorrelationTensor exact_correlation_tensor(const Scenario& sc, int L) {
  const int N = sc.array.num_antennas;
  if (L < 0) throw ValidationError("exact_correlation_tensor: L must be >= 0");
  const double Ts = sc.sampling.ts();

  CorrelationTensor T(L, N);
  T.estimator = CorrelationTensor::Estimator::analytic;
  for (const auto& src : sc.sources) {
    const Vec a = steering_vector(sc.array, src.doa_rad, src.omega());
    const Mat outer = a * a.adjoint();
    for (int l = 0; l <= L; ++l) {
      const double mag = src.power * sinc(src.bandwidth_hz * l * Ts);
      const double ph = mod_2pi(src.omega() * l * Ts);
      const cx r = mag * cx(std::cos(ph), std::sin(ph));
      T.slice(l) += r * outer;
      if (l > 0) T.slice(-l) += std::conj(r) * outer;
    }
  }
  T.slice(0) += sc.sigma2() * Mat::Identity(N, N);
  return T;
}

Mat steering_matrix(const Scenario& sc) {
  const int N = sc.array.num_antennas;
  const int K = static_cast<int>(sc.sources.size());
  Mat a(N, K);
  for (int k = 0; k < K; ++k) {
    a.col(k) = steering_vector(sc.array, sc.sources[k].doa_rad, sc.sources[k].omega());
  }
  return a;
}

Mat exact_correlation_columns(const Scenario& sc, int L) {
  if (L < 0) throw ValidationError("exact_correlation_columns: L must be >= 0");
  const double Ts = sc.sampling.ts();
  const int K = static_cast<int>(sc.sources.size());
  Mat r(2 * L + 1, K);
  for (int k = 0; k < K; ++k) {
    const auto& src = sc.sources[k];
    for (int l = -L; l <= L; ++l) {
      const double mag = src.power * sinc(src.bandwidth_hz * l * Ts);
      const double ph = mod_2pi(src.omega() * l * Ts);
      r(l + L, k) = mag * cx(std::cos(ph), std::sin(ph));
    }
  }
  return r;
}

}  // namespace passat
