#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"
#include "passat/crb.hpp"
#include "test_util.hpp"

using namespace passat;
using passat_test::three_source_scenario;
using passat_test::two_source_scenario;

namespace {

CrbModel small_model() {
  CrbModel m;
  m.N = 3;
  m.Ns = 8;
  m.K = 2;
  m.L = 2;
  m.delays_s = {0.0, 0.4e-9, 1.1e-9};
  m.xi = {0.83, -0.41};
  m.psi = {0.955, 2.714};
  m.p.resize(2);
  m.p[0] = Vec(3);
  m.p[0] << cx(1.3, 0.0), cx(0.42, -0.11), cx(0.08, 0.05);
  m.p[1] = Vec(3);
  m.p[1] << cx(0.9, 0.0), cx(-0.21, 0.33), cx(0.02, -0.07);
  m.sigma2 = 0.6;
  return m;
}

CrbModel noise_only_model(int n, std::int64_t ns, double sigma2) {
  CrbModel m;
  m.N = n;
  m.Ns = ns;
  m.K = 0;
  m.L = 0;
  m.delays_s.assign(static_cast<std::size_t>(n), 0.0);
  m.sigma2 = sigma2;
  return m;
}

// Element-by-element covariance oracle built straight from the signal model:
// x is stacked antenna-major with time inner, sources have banded stationary
// envelopes and rank-one spatial signatures.
Mat covariance_reference(const CrbModel& m) {
  const std::int64_t size = m.N * m.Ns;
  Mat rx = Mat::Zero(size, size);
  for (int k = 0; k < m.K; ++k) {
    const Vec a = crb_steering(m, k);
    for (int n1 = 0; n1 < m.N; ++n1)
      for (int n2 = 0; n2 < m.N; ++n2)
        for (std::int64_t t1 = 0; t1 < m.Ns; ++t1)
          for (std::int64_t t2 = 0; t2 < m.Ns; ++t2) {
            const std::int64_t lag = t1 - t2;
            cx p;
            if (std::llabs(lag) > m.L) {
              p = 0.0;
            } else if (lag >= 0) {
              p = m.p[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(lag));
            } else {
              p = std::conj(m.p[static_cast<std::size_t>(k)](static_cast<Eigen::Index>(-lag)));
            }
            rx(n1 * m.Ns + t1, n2 * m.Ns + t2) += a(n1) * std::conj(a(n2)) * p;
          }
  }
  for (std::int64_t i = 0; i < size; ++i) rx(i, i) += m.sigma2;
  return rx;
}

std::vector<double*> parameter_slots(CrbModel& m) {
  std::vector<double*> slots;
  for (int k = 0; k < m.K; ++k) slots.push_back(&m.xi[static_cast<std::size_t>(k)]);
  for (int k = 0; k < m.K; ++k) slots.push_back(&m.psi[static_cast<std::size_t>(k)]);
  for (int k = 0; k < m.K; ++k) {
    Vec& p = m.p[static_cast<std::size_t>(k)];
    slots.push_back(reinterpret_cast<double*>(p.data()));
    for (int l = 1; l <= m.L; ++l)
      slots.push_back(reinterpret_cast<double*>(p.data() + l));
    for (int l = 1; l <= m.L; ++l)
      slots.push_back(reinterpret_cast<double*>(p.data() + l) + 1);
  }
  slots.push_back(&m.sigma2);
  return slots;
}

}  // namespace

TEST_CASE("parameter bookkeeping") {
  const CrbModel m = small_model();
  CHECK(m.param_count() == 15);
  const std::vector<std::string> names = m.param_names();
  REQUIRE(names.size() == 15);
  CHECK(names[0] == "xi_1");
  CHECK(names[1] == "xi_2");
  CHECK(names[2] == "psi_1");
  CHECK(names[3] == "psi_2");
  CHECK(names[4] == "p1_l0");
  CHECK(names[5] == "p1_l1_re");
  CHECK(names[6] == "p1_l2_re");
  CHECK(names[7] == "p1_l1_im");
  CHECK(names[8] == "p1_l2_im");
  CHECK(names[9] == "p2_l0");
  CHECK(names[14] == "sigma2");

  CHECK(noise_only_model(4, 16, 1.0).param_count() == 1);
  CHECK(noise_only_model(4, 16, 1.0).param_names() ==
        std::vector<std::string>{"sigma2"});
}

TEST_CASE("covariance assembly matches the elementwise model") {
  const CrbModel m = small_model();
  const Mat rx = assemble_Rx(m);
  const Mat ref = covariance_reference(m);
  REQUIRE(rx.rows() == 24);
  CHECK((rx - ref).norm() < 1e-12 * ref.norm());

  const CrbModel noise = noise_only_model(3, 5, 0.7);
  const Mat rn = assemble_Rx(noise);
  CHECK((rn - 0.7 * Mat::Identity(15, 15)).norm() == 0.0);

  CrbModel single = small_model();
  single.K = 1;
  single.L = 0;
  single.xi.resize(1);
  single.psi.resize(1);
  single.p.resize(1);
  single.p[0] = Vec::Ones(1) * 2.0;
  const Mat rs = assemble_Rx(single);
  Eigen::SelfAdjointEigenSolver<Mat> eig(rs);
  const auto ev = eig.eigenvalues();
  CHECK(ev(ev.size() - 1) == doctest::Approx(single.sigma2 + 3.0 * 2.0).epsilon(1e-12));
  CHECK(ev(0) == doctest::Approx(single.sigma2).epsilon(1e-12));

  CrbModel big = noise_only_model(8, 1000, 1.0);
  CHECK_THROWS_AS((void)assemble_Rx(big), ValidationError);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  CrbModel m = small_model();
  const std::vector<Mat> d = partial_derivatives(m);
  REQUIRE(static_cast<int>(d.size()) == m.param_count());

  // Closed forms for the two easy blocks.
  CHECK((d.back() - Mat::Identity(24, 24)).norm() == 0.0);
  const Vec a0 = crb_steering(m, 0);
  Mat p0_expect = Mat::Zero(24, 24);
  for (int n1 = 0; n1 < 3; ++n1)
    for (int n2 = 0; n2 < 3; ++n2)
      for (int t = 0; t < 8; ++t)
        p0_expect(n1 * 8 + t, n2 * 8 + t) = a0(n1) * std::conj(a0(n2));
  CHECK((d[4] - p0_expect).norm() < 1e-12 * p0_expect.norm());

  std::vector<double*> slots = parameter_slots(m);
  REQUIRE(slots.size() == d.size());
  for (std::size_t i = 0; i < slots.size(); ++i) {
    const double v = *slots[i];
    const double h = 1e-6 * std::max(1.0, std::abs(v));
    *slots[i] = v + h;
    const Mat plus = assemble_Rx(m);
    *slots[i] = v - h;
    const Mat minus = assemble_Rx(m);
    *slots[i] = v;
    const Mat fd = (plus - minus) / (2.0 * h);
    CHECK((d[i] - fd).norm() < 1e-6 * std::max(1.0, fd.norm()));
  }
}

TEST_CASE("fisher information against the dense cross-check") {
  const CrbModel m = small_model();
  const RealMat fast = fim(m);
  const RealMat dense = fim_dense(m);
  REQUIRE(fast.rows() == 15);
  CHECK((fast - dense).norm() < 1e-8 * dense.norm());
  CHECK((fast - fast.transpose()).norm() < 1e-10 * fast.norm());

  Eigen::SelfAdjointEigenSolver<RealMat> eig(fast);
  CHECK(eig.eigenvalues()(0) > -1e-8 * eig.eigenvalues()(eig.eigenvalues().size() - 1));
}

TEST_CASE("noise-only closed forms") {
  const CrbModel m = noise_only_model(4, 32, 0.8);
  const RealMat f = fim(m);
  REQUIRE(f.rows() == 1);
  const double expect = 4.0 * 32.0 / (0.8 * 0.8);
  CHECK(std::abs(f(0, 0) - expect) < 1e-10 * expect);

  const CrbReport rep = crb(m);
  const double bound = 0.8 * 0.8 / (4.0 * 32.0);
  CHECK(std::abs(rep.crb_diag(0) - bound) < 1e-10 * bound);
  CHECK_FALSE(rep.used_pinv);
}

TEST_CASE("source reordering conjugates the information matrix") {
  const CrbModel m = small_model();
  CrbModel swapped = m;
  std::swap(swapped.xi[0], swapped.xi[1]);
  std::swap(swapped.psi[0], swapped.psi[1]);
  std::swap(swapped.p[0], swapped.p[1]);

  const int P = m.param_count();
  RealMat perm = RealMat::Zero(P, P);
  perm(0, 1) = 1.0;
  perm(1, 0) = 1.0;
  perm(2, 3) = 1.0;
  perm(3, 2) = 1.0;
  const int blk = 2 * m.L + 1;
  for (int j = 0; j < blk; ++j) {
    perm(4 + j, 4 + blk + j) = 1.0;
    perm(4 + blk + j, 4 + j) = 1.0;
  }
  perm(P - 1, P - 1) = 1.0;

  const RealMat f = fim(m);
  const RealMat fs = fim(swapped);
  CHECK((fs - perm.transpose() * f * perm).norm() < 1e-8 * f.norm());
}

TEST_CASE("more samples can only help") {
  CrbModel m = small_model();
  m.L = 0;
  m.p[0] = Vec::Ones(1) * 1.3;
  m.p[1] = Vec::Ones(1) * 0.9;

  std::vector<double> xi_bounds;
  for (std::int64_t ns : {16, 32, 64}) {
    m.Ns = ns;
    const CrbReport rep = crb(m);
    xi_bounds.push_back(rep.crb_diag(0));
  }
  CHECK(xi_bounds[1] < xi_bounds[0]);
  CHECK(xi_bounds[2] < xi_bounds[1]);
}

TEST_CASE("higher snr tightens the bound") {
  Scenario sc = two_source_scenario();
  sc.sampling.num_samples = 250;
  sc.snr_db = 5.0;
  const CrbReport low = crb(crb_model_from_scenario(sc));
  sc.snr_db = 15.0;
  const CrbReport high = crb(crb_model_from_scenario(sc));
  REQUIRE(low.crb_diag.size() == high.crb_diag.size());
  CHECK(high.crb_diag(0) < low.crb_diag(0));
  CHECK(high.crb_diag(2) < low.crb_diag(2));
}

TEST_CASE("benchmark bounds fall with the record length") {
  const Scenario sc = two_source_scenario();
  std::vector<double> xi1, psi1;
  for (std::int64_t ns : {100, 200, 300}) {
    const CrbReport rep = crb(crb_model_from_scenario(sc, ns));
    xi1.push_back(rep.crb_diag(0));
    psi1.push_back(rep.crb_diag(2));
  }
  CHECK(xi1[1] < xi1[0]);
  CHECK(xi1[2] < xi1[1]);
  CHECK(psi1[1] < psi1[0]);
  CHECK(psi1[2] < psi1[1]);
}

TEST_CASE("carrier scale propagates quadratically") {
  CrbModel m = small_model();
  CrbModel scaled = m;
  scaled.c_scale = m.c_scale * 10.0;
  for (double& v : scaled.psi) v /= 10.0;
  const CrbReport r0 = crb(m);
  const CrbReport r1 = crb(scaled);
  for (int k = 0; k < 2; ++k) {
    CHECK(r1.crb_diag(2 + k) ==
          doctest::Approx(r0.crb_diag(2 + k) / 100.0).epsilon(1e-9));
    CHECK(r1.crb_diag(k) == doctest::Approx(r0.crb_diag(k)).epsilon(1e-9));
  }
}

TEST_CASE("degenerate models fall back to the pseudoinverse") {
  CrbModel m = small_model();
  m.xi[1] = m.xi[0];
  m.psi[1] = m.psi[0];
  m.p[1] = m.p[0];
  const CrbReport rep = crb(m);
  CHECK(rep.used_pinv);
  CHECK(rep.condition_number > 1e12);
  for (Eigen::Index i = 0; i < rep.crb_diag.size(); ++i)
    CHECK(std::isfinite(rep.crb_diag(i)));
}

TEST_CASE("default lag depth follows the envelope decay") {
  const Scenario mse = two_source_scenario();
  CHECK(default_crb_lag(mse, 300) == 299);
  CHECK(default_crb_lag(mse, 100000) == 512);

  Scenario none = mse;
  none.sources.clear();
  CHECK(default_crb_lag(none, 300) == 0);

  const CrbModel m = crb_model_from_scenario(mse);
  CHECK(m.Ns == 300);
  CHECK(m.L == 299);
  CHECK(m.K == 2);
  CHECK(m.param_count() == 2 * 2 + 2 * (2 * 299 + 1) + 1);

  const CrbModel trimmed = crb_model_from_scenario(mse, 0, 3);
  CHECK(trimmed.L == 3);
}

TEST_CASE("scenario translation fixes the parorder and values") {
  const Scenario sc = three_source_scenario();
  const CrbModel m = crb_model_from_scenario(sc, 40, 2);
  CHECK(m.N == 8);
  CHECK(m.Ns == 40);
  CHECK(m.K == 3);
  CHECK(m.L == 2);
  for (int k = 0; k < 3; ++k) {
    const double omega = sc.sources[static_cast<std::size_t>(k)].omega();
    const double tau = tau_of_theta(sc.sources[static_cast<std::size_t>(k)].doa_rad, sc.array);
    CHECK(m.xi[static_cast<std::size_t>(k)] == doctest::Approx(omega * tau).epsilon(1e-12));
    CHECK(m.psi[static_cast<std::size_t>(k)] == doctest::Approx(omega / 1e9).epsilon(1e-12));
    CHECK(m.p[static_cast<std::size_t>(k)](0).real() ==
          doctest::Approx(sc.sources[static_cast<std::size_t>(k)].power).epsilon(1e-12));
    CHECK(m.p[static_cast<std::size_t>(k)](0).imag() == 0.0);
  }
  CHECK(m.sigma2 == doctest::Approx(sc.sigma2()).epsilon(1e-12));
}
