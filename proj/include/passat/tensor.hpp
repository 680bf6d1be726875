#pragma once

#include <cstdint>
#include <vector>

#include "passat/common.hpp"

namespace passat {

// Lagged correlation tensor, slice index l = -L..L (2L+1 slices of N x N).
// Holds both analytic (exact model) and sample-estimated tensors; the
// estimator tag records which.
struct CorrelationTensor {
  enum class Estimator { analytic, biased };

  int L = 0;
  int N = 0;
  std::vector<Mat> slices;  // slices[l + L], each N x N
  std::int64_t num_samples_used = 0;
  Estimator estimator = Estimator::analytic;

  CorrelationTensor() = default;
  CorrelationTensor(int L_, int N_)
      : L(L_), N(N_), slices(2 * L_ + 1, Mat::Zero(N_, N_)) {}

  Mat& slice(int l) { return slices[l + L]; }
  const Mat& slice(int l) const { return slices[l + L]; }
  int num_slices() const { return 2 * L + 1; }

  double frobenius_norm() const {
    double s = 0.0;
    for (const auto& m : slices) s += m.squaredNorm();
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for (const auto& m : slices) s = std::max(s, m.cwiseAbs().maxCoeff());
    return s;
  }
};

}  // namespace passat
