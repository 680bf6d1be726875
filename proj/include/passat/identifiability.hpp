#pragma once

#include <utility>
#include <vector>

#include "passat/scenario.hpp"

namespace passat {

// Kruskal rank: the largest k such that every set of k columns is linearly
// independent (0 when any column is zero). Exhaustive over column subsets;
// throws ValidationError for more than 8 columns.
int k_rank(const Mat& m);

struct IdentifiabilityReport {
  int krank_a = 0;
  int krank_r = 0;
  int lhs = 0;        // 2 * krank_a + krank_r
  int rhs = 0;        // 2K + 2
  bool satisfied = false;
  bool k1_rule = false;  // K == 1: uniqueness needs only nonzero factors
  std::vector<std::pair<int, int>> omega_violations;  // collided source pairs
};

// Uniqueness condition for the decomposition with factors (A, conj(A), R):
// 2*k(A) + k(R) >= 2K + 2, with the K == 1 case reduced to nonzero factors.
IdentifiabilityReport kruskal_check(const Mat& a, const Mat& r);

// Source pairs whose correlation columns are structurally proportional:
// equal bandwidth and carriers that coincide modulo the sampling rate.
// Such pairs cannot be separated at any L.
std::vector<std::pair<int, int>> omega_condition_check(const Scenario& scenario);

// Builds the model factors for the scenario at lag count L and runs both
// checks; omega violations are merged into the report.
IdentifiabilityReport kruskal_check(const Scenario& scenario, int L);

}  // namespace passat
