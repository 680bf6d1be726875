#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "passat/tensor.hpp"

namespace passat {

// Mode-m unfolding of the (2L+1) x N x N tensor T[s, i, j] = slice(s - L)(i, j):
//   mode 1: X1[s, i + j*N]        (2L+1) x N^2
//   mode 2: X2[i, s + j*(2L+1)]   N x (2L+1)N
//   mode 3: X3[j, s + i*(2L+1)]   N x (2L+1)N
Mat unfold(const CorrelationTensor& t, int mode);

// Columnwise Kronecker product: out[i*J + j, k] = m1(i, k) * m2(j, k).
Mat khatri_rao(const Mat& m1, const Mat& m2);

// Slices of the rank-K model T[s, i, j] = sum_k R(s,k) A(i,k) B(j,k).
std::vector<Mat> reconstruct_slices(const Mat& R, const Mat& A, const Mat& B);

// ||T - [[R, A, B]]||_F / ||T||_F; absolute residual when ||T||_F == 0.
double fit_residual(const CorrelationTensor& t, const Mat& R, const Mat& A, const Mat& B);

enum class CpInit { random, hosvd };

struct CpOptions {
  CpInit init = CpInit::random;
  double tol = 1e-10;
  int max_iter = 500;
  int restarts = 5;
  double mu = 0.0;  // Tikhonov weight added to every factor solve (absolute)
  std::uint64_t seed = 0;
};

struct FactorSet {
  Mat R;  // (2L+1) x K
  Mat A;  // N x K
  Mat B;  // N x K
  // mu == 0: relative fit per sweep. mu > 0: penalized objective
  // (||T - X||^2 + mu * sum of squared factor column norms) / ||T||^2.
  // Entry 0 is the initial value; non-increasing within 1e-12.
  std::vector<double> fit_history;
  bool converged = false;
  int rank() const { return static_cast<int>(A.cols()); }
};

// Alternating least squares with exact per-block solves and geometric column
// balancing after every sweep. Deterministic for a fixed seed. With multiple
// restarts the factor set with the lowest final objective is returned; when
// init is hosvd the first start uses it and the rest are random.
FactorSet cp_als(const CorrelationTensor& t, int K, const CpOptions& opts = {});

// Overfactored regularized decomposition for rank detection. Runs ALS at rank
// K_over with weight mu on all three solves (mu < 0 selects 1e-3 * ||T||_F),
// then drops components whose factor-norm product falls below 5% of the
// largest. Returns the surviving factors and the detected rank. Throws
// NumericalError when every component vanishes.
std::pair<FactorSet, int> cp_als_regularized(const CorrelationTensor& t, int K_over,
                                             double mu = -1.0, double tol = 1e-12,
                                             int max_iter = 1500, std::uint64_t seed = 0);

// Minimum over greedily matched column pairs of |x^H y| / (||x|| ||y||).
double matrix_congruence(const Mat& x, const Mat& y);

// Minimum over matched columns of the product of the per-factor congruences.
double factor_congruence(const FactorSet& est, const Mat& R, const Mat& A, const Mat& B);

}  // namespace passat
