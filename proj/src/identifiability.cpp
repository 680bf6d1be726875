#include "passat/identifiability.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "passat/simulate.hpp"

namespace passat {

namespace {

bool subset_independent(const Mat& m, const std::vector<int>& cols) {
  Mat sub(m.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = m.col(cols[j]);
  Eigen::JacobiSVD<Mat> svd(sub);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  if (!(smax > 0.0)) return false;
  return sv(sv.size() - 1) > 1e-8 * smax;
}

// All size-k column subsets independent?
bool all_subsets_independent(const Mat& m, int k) {
  const int c = static_cast<int>(m.cols());
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    if (!subset_independent(m, idx)) return false;
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == c - k + pos) --pos;
    if (pos < 0) return true;
    ++idx[static_cast<std::size_t>(pos)];
    for (int i = pos + 1; i < k; ++i)
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
  }
}

}  // namespace

int k_rank(const Mat& m) {
  const int c = static_cast<int>(m.cols());
  if (c == 0) return 0;
  if (c > 8) throw ValidationError("k_rank: exhaustive check limited to 8 columns");
  if (m.rows() == 0) return 0;
  int k = 0;
  for (int size = 1; size <= std::min<int>(c, static_cast<int>(m.rows())); ++size) {
    if (!all_subsets_independent(m, size)) break;
    k = size;
  }
  return k;
}

IdentifiabilityReport kruskal_check(const Mat& a, const Mat& r) {
  if (a.cols() != r.cols()) throw ValidationError("kruskal_check: factor column counts differ");
  const int K = static_cast<int>(a.cols());
  if (K < 1) throw ValidationError("kruskal_check: need at least one source");

  IdentifiabilityReport rep;
  rep.krank_a = k_rank(a);
  rep.krank_r = k_rank(r);
  rep.lhs = 2 * rep.krank_a + rep.krank_r;
  rep.rhs = 2 * K + 2;
  if (K == 1) {
    rep.k1_rule = true;
    rep.satisfied = a.col(0).norm() > 0.0 && r.col(0).norm() > 0.0;
  } else {
    rep.satisfied = rep.lhs >= rep.rhs;
  }
  return rep;
}

std::vector<std::pair<int, int>> omega_condition_check(const Scenario& sc) {
  std::vector<std::pair<int, int>> out;
  const double fs = sc.sampling.fs_hz;
  if (fs <= 0.0) throw ValidationError("omega_condition_check: fs must be positive");
  const int K = static_cast<int>(sc.sources.size());
  for (int i = 0; i < K; ++i) {
    for (int j = i + 1; j < K; ++j) {
      const double bi = sc.sources[i].bandwidth_hz;
      const double bj = sc.sources[j].bandwidth_hz;
      if (std::abs(bi - bj) > 1e-9 * std::max({bi, bj, 1.0})) continue;
      // Aliased carrier spacing: distance of (f_i - f_j) to the nearest
      // multiple of fs, relative to fs.
      const double df = std::abs(sc.sources[i].carrier_hz - sc.sources[j].carrier_hz);
      const double frac = df / fs - std::floor(df / fs);
      const double dist = std::min(frac, 1.0 - frac);
      if (dist <= 1e-9) out.emplace_back(i, j);
    }
  }
  return out;
}

IdentifiabilityReport kruskal_check(const Scenario& sc, int L) {
  if (sc.sources.empty()) throw ValidationError("kruskal_check: scenario has no sources");
  IdentifiabilityReport rep = kruskal_check(steering_matrix(sc), exact_correlation_columns(sc, L));
  rep.omega_violations = omega_condition_check(sc);
  if (!rep.omega_violations.empty()) rep.satisfied = false;
  return rep;
}

}  // namespace passat
