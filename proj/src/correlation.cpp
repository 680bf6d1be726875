#include "passat/correlation.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace passat {

CorrelationTensor estimate_correlation_tensor(const SampleMatrix& x, int L) {
  const int N = static_cast<int>(x.data.rows());
  const std::int64_t Ns = x.data.cols();
  if (N < 1 || Ns < 1) throw ValidationError("estimate_correlation_tensor: empty sample matrix");
  if (L < 0) throw ValidationError("estimate_correlation_tensor: negative max lag");
  if (Ns <= 2 * static_cast<std::int64_t>(L))
    throw ValidationError("estimate_correlation_tensor: num_samples must exceed twice the max lag");

  CorrelationTensor t;
  t.L = L;
  t.N = N;
  t.estimator = CorrelationTensor::Estimator::biased;
  t.num_samples_used = Ns;
  t.slices.assign(2 * L + 1, Mat::Zero(N, N));

  const double inv_ns = 1.0 / static_cast<double>(Ns);
  for (int l = 0; l <= L; ++l) {
    // r(l) = (1/Ns) * X[:, l:] * X[:, :Ns-l]^H
    Mat r = x.data.rightCols(Ns - l) * x.data.leftCols(Ns - l).adjoint();
    r *= inv_ns;
    t.slices[L + l] = r;
    t.slices[L - l] = r.adjoint();
  }
  return t;
}

double estimate_noise_power(const Mat& lag0_slice, int K) {
  const int N = static_cast<int>(lag0_slice.rows());
  if (lag0_slice.cols() != N) throw ValidationError("estimate_noise_power: slice must be square");
  if (K < 0 || K >= N) throw ValidationError("estimate_noise_power: need 0 <= K < N");

  Mat herm = 0.5 * (lag0_slice + lag0_slice.adjoint());
  Eigen::SelfAdjointEigenSolver<Mat> es(herm, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("estimate_noise_power: eigensolver failed");
  const RealVec ev = es.eigenvalues();  // ascending
  double acc = 0.0;
  const int count = N - K;
  for (int i = 0; i < count; ++i) acc += ev(i);
  return acc / static_cast<double>(count);
}

CorrelationTensor denoise_zero_lag(const CorrelationTensor& tensor, double sigma2) {
  CorrelationTensor out = tensor;
  Mat& lag0 = out.slices[out.L];
  for (int n = 0; n < out.N; ++n) lag0(n, n) -= sigma2;
  return out;
}

int default_max_lag(double fs_hz, double min_bandwidth_hz, std::int64_t num_samples) {
  if (fs_hz <= 0.0 || min_bandwidth_hz <= 0.0) {
    throw ValidationError("default_max_lag: fs and bandwidth must be positive");
  }
  const double span = 4.0 * fs_hz / min_bandwidth_hz;
  std::int64_t L = static_cast<std::int64_t>(std::ceil(span));
  const std::int64_t cap = num_samples / 100;
  L = std::min(L, cap);
  L = std::max<std::int64_t>(L, 1);
  return static_cast<int>(L);
}

int default_max_lag(const Scenario& scenario) {
  double bmin = 0.0;
  for (const auto& s : scenario.sources) {
    if (bmin == 0.0 || s.bandwidth_hz < bmin) bmin = s.bandwidth_hz;
  }
  if (bmin <= 0.0) throw ValidationError("default_max_lag: scenario has no positive-bandwidth source");
  return default_max_lag(scenario.sampling.fs_hz, bmin, scenario.sampling.num_samples);
}

}  // namespace passat
