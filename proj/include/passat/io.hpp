#pragma once

#include <string>
#include <vector>

#include "passat/common.hpp"
#include "passat/simulate.hpp"
#include "passat/tensor.hpp"

namespace passat {

// Binary container formats. All integers and floats are little-endian; complex
// samples are stored as float32 (re, im) pairs.
//
//   samples   "PASSAT01" | N u32 | Ns u64 | fs f64 | N*Ns complex64, antenna-major row-major
//   tensor    "PASSATR1" | L u32 | N u32  | (2L+1) slices l=-L..L, each N*N complex64 row-major
//   factors   "PASSATF1" | S u32 | I u32 | J u32 | K u32 | R (S*K) | A (I*K) | B (J*K), row-major complex64
//   matrix    "PASSATC1" | P u32 | P*P f64 row-major

void write_samples(const std::string& path, const SampleMatrix& samples);
SampleMatrix read_samples(const std::string& path);

void write_correlation_tensor(const std::string& path, const CorrelationTensor& tensor);
CorrelationTensor read_correlation_tensor(const std::string& path);

struct FactorFile {
  Mat R;  // (2L+1) x K
  Mat A;  // N x K
  Mat B;  // N x K
};

void write_factors(const std::string& path, const Mat& R, const Mat& A, const Mat& B);
FactorFile read_factors(const std::string& path);

void write_real_matrix(const std::string& path, const RealMat& m);
RealMat read_real_matrix(const std::string& path);

// Doubles in text outputs are printed with %.17g (round-trip exact).
std::string format_g17(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace passat
