#include "passat/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace passat {

namespace {

constexpr char kMagicSamples[8] = {'P', 'A', 'S', 'S', 'A', 'T', '0', '1'};
constexpr char kMagicTensor[8] = {'P', 'A', 'S', 'S', 'A', 'T', 'R', '1'};
constexpr char kMagicFactors[8] = {'P', 'A', 'S', 'S', 'A', 'T', 'F', '1'};
constexpr char kMagicMatrix[8] = {'P', 'A', 'S', 'S', 'A', 'T', 'C', '1'};

class BinWriter {
 public:
  explicit BinWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
    if (!out_) throw IoError("cannot open for writing: " + path);
  }
  void raw(const void* p, std::size_t n) {
    out_.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
  }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void u64(std::uint64_t v) { raw(&v, 8); }
  void f64(double v) { raw(&v, 8); }
  void c64(const cx& v) {
    float re = static_cast<float>(v.real());
    float im = static_cast<float>(v.imag());
    raw(&re, 4);
    raw(&im, 4);
  }
  void cmat_rowmajor(const Mat& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) c64(m(i, j));
  }
  void close() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_);
    out_.close();
  }

 private:
  std::string path_;
  std::ofstream out_;
};

class BinReader {
 public:
  explicit BinReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open for reading: " + path);
    in_.seekg(0, std::ios::end);
    size_ = static_cast<std::uint64_t>(in_.tellg());
    in_.seekg(0, std::ios::beg);
  }
  std::uint64_t size() const { return size_; }
  void raw(void* p, std::size_t n) {
    in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw IoError("truncated file: " + path_);
  }
  void magic(const char expect[8], const char* what) {
    char got[8];
    raw(got, 8);
    if (std::memcmp(got, expect, 8) != 0) {
      throw IoError(std::string("bad magic, expected ") + what + " container: " + path_);
    }
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  std::uint64_t u64() {
    std::uint64_t v;
    raw(&v, 8);
    return v;
  }
  double f64() {
    double v;
    raw(&v, 8);
    return v;
  }
  cx c64() {
    float re, im;
    raw(&re, 4);
    raw(&im, 4);
    return cx(static_cast<double>(re), static_cast<double>(im));
  }
  Mat cmat_rowmajor(Eigen::Index rows, Eigen::Index cols) {
    Mat m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = c64();
    return m;
  }
  void expect_size(std::uint64_t expected, const char* what) const {
    if (size_ != expected) {
      throw IoError(std::string("size mismatch for ") + what + " container: " + path_);
    }
  }

 private:
  std::string path_;
  std::ifstream in_;
  std::uint64_t size_ = 0;
};

}  // namespace

void write_samples(const std::string& path, const SampleMatrix& samples) {
  const auto N = static_cast<std::uint32_t>(samples.data.rows());
  const auto Ns = static_cast<std::uint64_t>(samples.data.cols());
  BinWriter w(path);
  w.raw(kMagicSamples, 8);
  w.u32(N);
  w.u64(Ns);
  w.f64(samples.sample_rate_hz);
  w.cmat_rowmajor(samples.data);
  w.close();
}

SampleMatrix read_samples(const std::string& path) {
  BinReader r(path);
  r.magic(kMagicSamples, "samples");
  const std::uint32_t N = r.u32();
  const std::uint64_t Ns = r.u64();
  const double fs = r.f64();
  if (N == 0 || Ns == 0) throw IoError("samples container with empty dimensions: " + path);
  r.expect_size(28 + 8ull * N * Ns, "samples");
  SampleMatrix out;
  out.sample_rate_hz = fs;
  out.data = r.cmat_rowmajor(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(Ns));
  return out;
}

void write_correlation_tensor(const std::string& path, const CorrelationTensor& tensor) {
  BinWriter w(path);
  w.raw(kMagicTensor, 8);
  w.u32(static_cast<std::uint32_t>(tensor.L));
  w.u32(static_cast<std::uint32_t>(tensor.N));
  for (const auto& s : tensor.slices) w.cmat_rowmajor(s);
  w.close();
}

CorrelationTensor read_correlation_tensor(const std::string& path) {
  BinReader r(path);
  r.magic(kMagicTensor, "tensor");
  const std::uint32_t L = r.u32();
  const std::uint32_t N = r.u32();
  if (N == 0) throw IoError("tensor container with empty dimensions: " + path);
  const std::uint64_t S = 2ull * L + 1;
  r.expect_size(16 + 8ull * S * N * N, "tensor");
  CorrelationTensor t;
  t.L = static_cast<int>(L);
  t.N = static_cast<int>(N);
  t.estimator = CorrelationTensor::Estimator::biased;
  t.num_samples_used = 0;
  t.slices.reserve(S);
  for (std::uint64_t i = 0; i < S; ++i) t.slices.push_back(r.cmat_rowmajor(N, N));
  return t;
}

void write_factors(const std::string& path, const Mat& R, const Mat& A, const Mat& B) {
  if (R.cols() != A.cols() || A.cols() != B.cols()) {
    throw ValidationError("write_factors: factor column counts differ");
  }
  BinWriter w(path);
  w.raw(kMagicFactors, 8);
  w.u32(static_cast<std::uint32_t>(R.rows()));
  w.u32(static_cast<std::uint32_t>(A.rows()));
  w.u32(static_cast<std::uint32_t>(B.rows()));
  w.u32(static_cast<std::uint32_t>(R.cols()));
  w.cmat_rowmajor(R);
  w.cmat_rowmajor(A);
  w.cmat_rowmajor(B);
  w.close();
}

FactorFile read_factors(const std::string& path) {
  BinReader r(path);
  r.magic(kMagicFactors, "factors");
  const std::uint32_t S = r.u32();
  const std::uint32_t I = r.u32();
  const std::uint32_t J = r.u32();
  const std::uint32_t K = r.u32();
  r.expect_size(24 + 8ull * (static_cast<std::uint64_t>(S) + I + J) * K, "factors");
  FactorFile f;
  f.R = r.cmat_rowmajor(S, K);
  f.A = r.cmat_rowmajor(I, K);
  f.B = r.cmat_rowmajor(J, K);
  return f;
}

void write_real_matrix(const std::string& path, const RealMat& m) {
  if (m.rows() != m.cols()) throw ValidationError("write_real_matrix: matrix must be square");
  BinWriter w(path);
  w.raw(kMagicMatrix, 8);
  w.u32(static_cast<std::uint32_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
  w.close();
}

RealMat read_real_matrix(const std::string& path) {
  BinReader r(path);
  r.magic(kMagicMatrix, "matrix");
  const std::uint32_t P = r.u32();
  r.expect_size(12 + 8ull * P * P, "matrix");
  RealMat m(P, P);
  for (std::uint32_t i = 0; i < P; ++i)
    for (std::uint32_t j = 0; j < P; ++j) m(i, j) = r.f64();
  return m;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path);
  return ss.str();
}

}  // namespace passat
