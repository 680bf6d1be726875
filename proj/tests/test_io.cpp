#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "passat/io.hpp"
#include "passat/rng.hpp"
#include "test_util.hpp"

using namespace passat;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("passat_io_" + std::to_string(static_cast<unsigned long>(::getpid())));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

// The volatile stop keeps the vectorizer from folding the float round-trip
// away (seen with GCC 11 at -O3 on complex assignments in a loop).
double through_float(double v) {
  volatile float f = static_cast<float>(v);
  return static_cast<double>(f);
}

// Push every entry through float32 so container round-trips compare exactly.
Mat quantized_random(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) {
      const auto z = rng.cnormal();
      m(r, c) = cx(through_float(z.real()), through_float(z.imag()));
    }
  return m;
}

}  // namespace

TEST_CASE("sample container round-trips") {
  TempDir tmp;
  SampleMatrix x;
  x.data = quantized_random(3, 17, 5);
  x.sample_rate_hz = 28e6;
  x.scenario_digest = 0;
  const std::string path = tmp.file("samples.bin");
  write_samples(path, x);
  const SampleMatrix back = read_samples(path);
  CHECK(back.data.rows() == 3);
  CHECK(back.data.cols() == 17);
  CHECK(back.sample_rate_hz == 28e6);
  CHECK((back.data - x.data).norm() == 0.0);
}

TEST_CASE("sample container size follows the format arithmetic") {
  TempDir tmp;
  SampleMatrix x;
  x.data = Mat::Zero(8, 1000);
  x.sample_rate_hz = 1e6;
  const std::string path = tmp.file("sized.bin");
  write_samples(path, x);
  CHECK(fs::file_size(path) == 28u + 8u * 1000u * 8u);
}

TEST_CASE("tensor container round-trips and tags the estimator") {
  TempDir tmp;
  CorrelationTensor t(2, 3);
  for (int l = 1; l <= 2; ++l) {
    t.slice(l) = quantized_random(3, 3, static_cast<std::uint64_t>(10 + l));
    t.slice(-l) = t.slice(l).adjoint();
  }
  t.slice(0) = quantized_random(3, 3, 9);
  t.slice(0) = (t.slice(0) + Mat(t.slice(0).adjoint())) / 2.0;
  // Re-quantize after symmetrization so the store is lossless.
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      t.slice(0)(r, c) = cx(through_float(t.slice(0)(r, c).real()),
                            through_float(t.slice(0)(r, c).imag()));
  const std::string path = tmp.file("tensor.bin");
  write_correlation_tensor(path, t);
  const CorrelationTensor back = read_correlation_tensor(path);
  CHECK(back.L == 2);
  CHECK(back.N == 3);
  CHECK(back.estimator == CorrelationTensor::Estimator::biased);
  for (int l = -2; l <= 2; ++l) CHECK((back.slice(l) - t.slice(l)).norm() == 0.0);
}

TEST_CASE("factor container round-trips") {
  TempDir tmp;
  const Mat R = quantized_random(5, 2, 21);
  const Mat A = quantized_random(4, 2, 22);
  const Mat B = quantized_random(4, 2, 23);
  const std::string path = tmp.file("factors.bin");
  write_factors(path, R, A, B);
  const FactorFile f = read_factors(path);
  CHECK((f.R - R).norm() == 0.0);
  CHECK((f.A - A).norm() == 0.0);
  CHECK((f.B - B).norm() == 0.0);
}

TEST_CASE("real matrix container round-trips exactly") {
  TempDir tmp;
  Rng rng(31);
  RealMat m(6, 6);
  for (int c = 0; c < 6; ++c)
    for (int r = 0; r < 6; ++r) m(r, c) = rng.normal();
  const std::string path = tmp.file("fim.bin");
  write_real_matrix(path, m);
  const RealMat back = read_real_matrix(path);
  CHECK((back - m).norm() == 0.0);
}

TEST_CASE("readers reject missing, mislabeled, and truncated files") {
  TempDir tmp;
  CHECK_THROWS_AS((void)read_samples(tmp.file("absent.bin")), IoError);

  const std::string wrong = tmp.file("wrong.bin");
  write_text_file(wrong, "PASSATXX................");
  CHECK_THROWS_AS((void)read_samples(wrong), IoError);
  CHECK_THROWS_AS((void)read_correlation_tensor(wrong), IoError);
  CHECK_THROWS_AS((void)read_factors(wrong), IoError);
  CHECK_THROWS_AS((void)read_real_matrix(wrong), IoError);

  SampleMatrix x;
  x.data = Mat::Zero(2, 8);
  x.sample_rate_hz = 1.0;
  const std::string path = tmp.file("trunc.bin");
  write_samples(path, x);
  const std::string full = read_text_file(path);
  write_text_file(path, full.substr(0, full.size() - 5));
  CHECK_THROWS_AS((void)read_samples(path), IoError);
}

TEST_CASE("g17 formatting round-trips doubles") {
  const double values[] = {0.0,    1.0,       kPi,     1.0 / 3.0, 2.2250738585072014e-308,
                           1e300,  -742.25,   3e-9,    28e6,      -3.6956785844890086e-10};
  for (const double v : values) {
    CAPTURE(v);
    CHECK(std::stod(format_g17(v)) == v);
  }
}

TEST_CASE("text files round-trip") {
  TempDir tmp;
  const std::string body = "line one\nline two\n# comment\n";
  const std::string path = tmp.file("t.txt");
  write_text_file(path, body);
  CHECK(read_text_file(path) == body);
  CHECK_THROWS_AS((void)read_text_file(tmp.file("missing.txt")), IoError);
}
