#include "passat/cpd.hpp"

#include <Eigen/Cholesky>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "passat/rng.hpp"

namespace passat {

namespace {

void check_tensor(const CorrelationTensor& t) {
  if (t.N < 1 || t.L < 0 || t.slices.size() != static_cast<std::size_t>(2 * t.L + 1)) {
    throw ValidationError("cpd: malformed correlation tensor");
  }
}

Mat random_factor(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Mat m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.cnormal();
  return m;
}

// Leading K left singular vectors of x, padded with unit-norm random columns
// when x has fewer than K of them.
Mat leading_left_singular(const Mat& x, int K, Rng& rng) {
  Eigen::JacobiSVD<Mat> svd(x, Eigen::ComputeThinU);
  const Mat& u = svd.matrixU();
  const int have = std::min<int>(static_cast<int>(u.cols()), K);
  Mat out(x.rows(), K);
  out.leftCols(have) = u.leftCols(have);
  for (int j = have; j < K; ++j) {
    Vec col(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) col(i) = rng.cnormal();
    double n = col.norm();
    out.col(j) = n > 0.0 ? Vec(col / n) : col;
  }
  return out;
}

// Least-squares factor update: minimizes ||X - F Z^T||_F plus mu||F||_F^2,
// via the normal equations G F^T = (X conj(Z))^T with G = Z^H Z + ridge I.
Mat solve_factor(const Mat& x, const Mat& z, double mu) {
  Mat g = z.adjoint() * z;
  const double ridge = mu + 1e-12 * g.trace().real();
  g.diagonal().array() += ridge;
  Mat rhs = (x * z.conjugate()).transpose();
  Mat ft = g.ldlt().solve(rhs);
  return ft.transpose();
}

// Rescales matched columns to the geometric mean of their norms; fit-neutral,
// and optimal for the squared-norm penalty at fixed column products.
void balance_columns(Mat& r, Mat& a, Mat& b) {
  for (Eigen::Index k = 0; k < a.cols(); ++k) {
    const double nr = r.col(k).norm();
    const double na = a.col(k).norm();
    const double nb = b.col(k).norm();
    if (nr <= 0.0 || na <= 0.0 || nb <= 0.0) continue;
    const double g = std::cbrt(nr * na * nb);
    r.col(k) *= g / nr;
    a.col(k) *= g / na;
    b.col(k) *= g / nb;
  }
}

struct AlsRun {
  Mat R, A, B;
  std::vector<double> hist;
  bool converged = false;
};

AlsRun run_als(const Mat& x1, const Mat& x2, const Mat& x3, double norm_t, Mat R, Mat A, Mat B,
               double mu, double tol, int max_iter) {
  const double denom = norm_t > 0.0 ? norm_t : 1.0;
  const double denom2 = denom * denom;

  auto objective = [&](const Mat& r, const Mat& a, const Mat& b) {
    const double res = (x1 - r * khatri_rao(b, a).transpose()).norm();
    if (mu == 0.0) return res / denom;
    const double pen = r.squaredNorm() + a.squaredNorm() + b.squaredNorm();
    return (res * res + mu * pen) / denom2;
  };

  AlsRun run;
  run.hist.push_back(objective(R, A, B));
  for (int it = 0; it < max_iter; ++it) {
    R = solve_factor(x1, khatri_rao(B, A), mu);
    A = solve_factor(x2, khatri_rao(B, R), mu);
    B = solve_factor(x3, khatri_rao(A, R), mu);
    balance_columns(R, A, B);
    run.hist.push_back(objective(R, A, B));
    const std::size_t h = run.hist.size();
    if (std::abs(run.hist[h - 2] - run.hist[h - 1]) < tol * std::max(1.0, run.hist[h - 2])) {
      run.converged = true;
      break;
    }
  }
  run.R = std::move(R);
  run.A = std::move(A);
  run.B = std::move(B);
  return run;
}

AlsRun als_multistart(const CorrelationTensor& t, int K, CpInit init, double mu, double tol,
                      int max_iter, int restarts, std::uint64_t seed) {
  check_tensor(t);
  if (K < 1) throw ValidationError("cp_als: rank must be at least 1");
  if (max_iter < 1) throw ValidationError("cp_als: max_iter must be at least 1");
  if (restarts < 1) throw ValidationError("cp_als: need at least one start");

  const Mat x1 = unfold(t, 1);
  const Mat x2 = unfold(t, 2);
  const Mat x3 = unfold(t, 3);
  const double norm_t = t.frobenius_norm();
  const int S = 2 * t.L + 1;
  const int N = t.N;

  AlsRun best;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int s = 0; s < restarts; ++s) {
    Rng rng(seed, 1 + static_cast<std::uint64_t>(s));
    Mat R0, A0, B0;
    if (s == 0 && init == CpInit::hosvd) {
      R0 = leading_left_singular(x1, K, rng);
      A0 = leading_left_singular(x2, K, rng);
      B0 = leading_left_singular(x3, K, rng);
    } else {
      R0 = random_factor(S, K, rng);
      A0 = random_factor(N, K, rng);
      B0 = random_factor(N, K, rng);
    }
    AlsRun run = run_als(x1, x2, x3, norm_t, std::move(R0), std::move(A0), std::move(B0), mu, tol,
                         max_iter);
    if (run.hist.back() < best_obj) {
      best_obj = run.hist.back();
      best = std::move(run);
    }
  }
  return best;
}

}  // namespace

Mat unfold(const CorrelationTensor& t, int mode) {
  check_tensor(t);
  const int S = 2 * t.L + 1;
  const int N = t.N;
  Mat out;
  switch (mode) {
    case 1:
      out.resize(S, static_cast<Eigen::Index>(N) * N);
      for (int s = 0; s < S; ++s)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) out(s, i + j * N) = t.slices[s](i, j);
      return out;
    case 2:
      out.resize(N, static_cast<Eigen::Index>(S) * N);
      for (int s = 0; s < S; ++s)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) out(i, s + j * S) = t.slices[s](i, j);
      return out;
    case 3:
      out.resize(N, static_cast<Eigen::Index>(S) * N);
      for (int s = 0; s < S; ++s)
        for (int i = 0; i < N; ++i)
          for (int j = 0; j < N; ++j) out(j, s + i * S) = t.slices[s](i, j);
      return out;
    default:
      throw ValidationError("unfold: mode must be 1, 2, or 3");
  }
}

Mat khatri_rao(const Mat& m1, const Mat& m2) {
  if (m1.cols() != m2.cols()) throw ValidationError("khatri_rao: column counts differ");
  const Eigen::Index I = m1.rows(), J = m2.rows(), K = m1.cols();
  Mat out(I * J, K);
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index i = 0; i < I; ++i) out.col(k).segment(i * J, J) = m1(i, k) * m2.col(k);
  return out;
}

std::vector<Mat> reconstruct_slices(const Mat& R, const Mat& A, const Mat& B) {
  if (R.cols() != A.cols() || A.cols() != B.cols()) {
    throw ValidationError("reconstruct_slices: factor column counts differ");
  }
  std::vector<Mat> slices(static_cast<std::size_t>(R.rows()));
  for (Eigen::Index s = 0; s < R.rows(); ++s) {
    slices[static_cast<std::size_t>(s)] =
        A * R.row(s).asDiagonal() * B.transpose();
  }
  return slices;
}

double fit_residual(const CorrelationTensor& t, const Mat& R, const Mat& A, const Mat& B) {
  check_tensor(t);
  if (R.rows() != 2 * t.L + 1 || A.rows() != t.N || B.rows() != t.N) {
    throw ValidationError("fit_residual: factor shapes do not match tensor");
  }
  const std::vector<Mat> model = reconstruct_slices(R, A, B);
  double acc = 0.0;
  for (std::size_t s = 0; s < model.size(); ++s) acc += (t.slices[s] - model[s]).squaredNorm();
  const double res = std::sqrt(acc);
  const double norm_t = t.frobenius_norm();
  return norm_t > 0.0 ? res / norm_t : res;
}

FactorSet cp_als(const CorrelationTensor& t, int K, const CpOptions& opts) {
  if (opts.mu < 0.0) throw ValidationError("cp_als: mu must be nonnegative");
  AlsRun run =
      als_multistart(t, K, opts.init, opts.mu, opts.tol, opts.max_iter, opts.restarts, opts.seed);
  FactorSet f;
  f.R = std::move(run.R);
  f.A = std::move(run.A);
  f.B = std::move(run.B);
  f.fit_history = std::move(run.hist);
  f.converged = run.converged;
  return f;
}

std::pair<FactorSet, int> cp_als_regularized(const CorrelationTensor& t, int K_over, double mu,
                                             double tol, int max_iter, std::uint64_t seed) {
  check_tensor(t);
  if (mu < 0.0 && !(t.frobenius_norm() > 0.0)) {
    // A zero tensor has no components to keep; surface it as the all-pruned
    // outcome rather than as a bad auto-selected weight.
    throw NumericalError("cp_als_regularized: zero tensor, every component vanishes");
  }
  const double mu_abs = mu < 0.0 ? 1e-3 * t.frobenius_norm() : mu;
  if (mu_abs <= 0.0) throw ValidationError("cp_als_regularized: mu must be positive");
  AlsRun run = als_multistart(t, K_over, CpInit::hosvd, mu_abs, tol, max_iter, 4, seed);

  std::vector<double> products(static_cast<std::size_t>(K_over));
  double max_p = 0.0;
  for (int k = 0; k < K_over; ++k) {
    products[static_cast<std::size_t>(k)] =
        run.R.col(k).norm() * run.A.col(k).norm() * run.B.col(k).norm();
    max_p = std::max(max_p, products[static_cast<std::size_t>(k)]);
  }
  if (max_p <= 0.0) throw NumericalError("cp_als_regularized: all components vanished");

  std::vector<int> keep;
  for (int k = 0; k < K_over; ++k) {
    if (products[static_cast<std::size_t>(k)] >= 0.05 * max_p) keep.push_back(k);
  }
  if (keep.empty()) throw NumericalError("cp_als_regularized: all components pruned");

  FactorSet f;
  const int Kd = static_cast<int>(keep.size());
  f.R.resize(run.R.rows(), Kd);
  f.A.resize(run.A.rows(), Kd);
  f.B.resize(run.B.rows(), Kd);
  for (int j = 0; j < Kd; ++j) {
    f.R.col(j) = run.R.col(keep[static_cast<std::size_t>(j)]);
    f.A.col(j) = run.A.col(keep[static_cast<std::size_t>(j)]);
    f.B.col(j) = run.B.col(keep[static_cast<std::size_t>(j)]);
  }
  f.fit_history = std::move(run.hist);
  f.converged = run.converged;
  return {std::move(f), Kd};
}

namespace {

double column_congruence(const Vec& x, const Vec& y) {
  const double nx = x.norm(), ny = y.norm();
  if (nx <= 0.0 || ny <= 0.0) return 0.0;
  return std::abs(x.dot(y)) / (nx * ny);
}

// Greedy assignment maximizing the per-pair score; returns the minimum score
// over the chosen pairs.
double greedy_min_match(const RealMat& score) {
  const Eigen::Index n = std::min(score.rows(), score.cols());
  std::vector<bool> row_used(static_cast<std::size_t>(score.rows()), false);
  std::vector<bool> col_used(static_cast<std::size_t>(score.cols()), false);
  double worst = 1.0;
  for (Eigen::Index pick = 0; pick < n; ++pick) {
    double best = -1.0;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < score.rows(); ++i) {
      if (row_used[static_cast<std::size_t>(i)]) continue;
      for (Eigen::Index j = 0; j < score.cols(); ++j) {
        if (col_used[static_cast<std::size_t>(j)]) continue;
        if (score(i, j) > best) {
          best = score(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    row_used[static_cast<std::size_t>(bi)] = true;
    col_used[static_cast<std::size_t>(bj)] = true;
    worst = std::min(worst, best);
  }
  return worst;
}

}  // namespace

double matrix_congruence(const Mat& x, const Mat& y) {
  if (x.rows() != y.rows()) throw ValidationError("matrix_congruence: row counts differ");
  RealMat score(x.cols(), y.cols());
  for (Eigen::Index i = 0; i < x.cols(); ++i)
    for (Eigen::Index j = 0; j < y.cols(); ++j)
      score(i, j) = column_congruence(x.col(i), y.col(j));
  return greedy_min_match(score);
}

double factor_congruence(const FactorSet& est, const Mat& R, const Mat& A, const Mat& B) {
  if (est.R.rows() != R.rows() || est.A.rows() != A.rows() || est.B.rows() != B.rows()) {
    throw ValidationError("factor_congruence: shapes do not match");
  }
  RealMat score(est.A.cols(), A.cols());
  for (Eigen::Index i = 0; i < est.A.cols(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j) {
      score(i, j) = column_congruence(est.R.col(i), R.col(j)) *
                    column_congruence(est.A.col(i), A.col(j)) *
                    column_congruence(est.B.col(i), B.col(j));
    }
  }
  return greedy_min_match(score);
}

}  // namespace passat
