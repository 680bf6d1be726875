#include "passat/crb.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <utility>

namespace passat {

namespace {

void check_model(const CrbModel& m) {
  if (m.N < 1 || m.Ns < 1) throw ValidationError("crb: need N >= 1 and Ns >= 1");
  if (m.K < 0) throw ValidationError("crb: negative source count");
  if (m.sigma2 <= 0.0) throw ValidationError("crb: sigma2 must be positive");
  if (m.c_scale <= 0.0) throw ValidationError("crb: c_scale must be positive");
  if (m.delays_s.size() != static_cast<std::size_t>(m.N)) {
    throw ValidationError("crb: delay list length must equal N");
  }
  if (m.K > 0) {
    if (m.L < 0 || m.L > m.Ns - 1) throw ValidationError("crb: need 0 <= L <= Ns - 1");
    if (m.xi.size() != static_cast<std::size_t>(m.K) ||
        m.psi.size() != static_cast<std::size_t>(m.K) ||
        m.p.size() != static_cast<std::size_t>(m.K)) {
      throw ValidationError("crb: per-source parameter lists must have length K");
    }
    for (const auto& pk : m.p) {
      if (pk.size() != m.L + 1) throw ValidationError("crb: p must hold lags 0..L");
      if (std::abs(pk(0).imag()) > 1e-12 * (1.0 + std::abs(pk(0).real()))) {
        throw ValidationError("crb: p(0) must be real");
      }
    }
  }
}

// scale is the magnitude of the accumulation that produced s (a norm bound on
// its terms). Rounding residue grows with that scale even when the real result
// is small, so the imaginary part is judged against it, not against s itself.
// A conjugation or pairing bug puts imag at the term scale and still trips.
double check_real(const cx& s, double scale, const char* where) {
  if (std::abs(s.imag()) > 1e-10 * (1.0 + std::abs(s.real()) + scale)) {
    throw NumericalError(std::string("fim: nonreal entry in ") + where);
  }
  return s.real();
}

// Sum of the diagonal at the given offset: sum_t w(t, t + off).
cx trace_offset(const Mat& w, std::int64_t off) {
  const std::int64_t n = w.rows();
  cx s = 0.0;
  const std::int64_t lo = std::max<std::int64_t>(0, -off);
  const std::int64_t hi = std::min<std::int64_t>(n, n - off);
  for (std::int64_t t = lo; t < hi; ++t) s += w(t, t + off);
  return s;
}

// Time-shift coefficient expansion of a p-type parameter at block offset o:
// p0 -> {(0, 1)}; Re p_l -> {(l, 1), (-l, 1)}; Im p_l -> {(l, j), (-l, -j)}.
std::vector<std::pair<int, cx>> p_coeffs(int o, int L) {
  if (o == 0) return {{0, cx(1.0, 0.0)}};
  if (o <= L) return {{o, cx(1.0, 0.0)}, {-o, cx(1.0, 0.0)}};
  const int l = o - L;
  return {{l, cx(0.0, 1.0)}, {-l, cx(0.0, -1.0)}};
}

Mat kron_nt(const Mat& c, const Mat& t) {
  const Eigen::Index N = c.rows();
  const Eigen::Index Ns = t.rows();
  Mat out(N * Ns, N * Ns);
  for (Eigen::Index m = 0; m < N; ++m)
    for (Eigen::Index n = 0; n < N; ++n) out.block(m * Ns, n * Ns, Ns, Ns) = c(m, n) * t;
  return out;
}

// (T_off)(s, t) = 1 iff s - t = off; off < 0 gives the transposed shift.
Mat shift_matrix(std::int64_t ns, int off) {
  Mat t = Mat::Zero(ns, ns);
  for (std::int64_t s = 0; s < ns; ++s) {
    const std::int64_t c = s - off;
    if (c >= 0 && c < ns) t(s, c) = 1.0;
  }
  return t;
}

Mat fft2_impl(const Mat& in, bool inverse) {
  Eigen::FFT<double> fft;
  const Eigen::Index R = in.rows(), C = in.cols();
  Mat tmp(R, C), out(R, C);
  std::vector<cx> src(static_cast<std::size_t>(C)), dst(static_cast<std::size_t>(C));
  for (Eigen::Index r = 0; r < R; ++r) {
    for (Eigen::Index c = 0; c < C; ++c) src[static_cast<std::size_t>(c)] = in(r, c);
    if (inverse) {
      fft.inv(dst, src);
    } else {
      fft.fwd(dst, src);
    }
    for (Eigen::Index c = 0; c < C; ++c) tmp(r, c) = dst[static_cast<std::size_t>(c)];
  }
  std::vector<cx> src2(static_cast<std::size_t>(R)), dst2(static_cast<std::size_t>(R));
  for (Eigen::Index c = 0; c < C; ++c) {
    for (Eigen::Index r = 0; r < R; ++r) src2[static_cast<std::size_t>(r)] = tmp(r, c);
    if (inverse) {
      fft.inv(dst2, src2);
    } else {
      fft.fwd(dst2, src2);
    }
    for (Eigen::Index r = 0; r < R; ++r) out(r, c) = dst2[static_cast<std::size_t>(r)];
  }
  return out;
}

Mat invert_pd(const Mat& rx) {
  Eigen::LLT<Mat> llt(rx);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("fim: covariance is not positive definite");
  }
  return llt.solve(Mat::Identity(rx.rows(), rx.cols()));
}

Vec steering_derivative(const CrbModel& m, const Vec& a, bool wrt_xi) {
  Vec da(m.N);
  for (int n = 0; n < m.N; ++n) {
    const double g =
        wrt_xi ? static_cast<double>(n) : m.c_scale * m.delays_s[static_cast<std::size_t>(n)];
    da(n) = cx(0.0, -1.0) * g * a(n);
  }
  return da;
}

}  // namespace

std::vector<std::string> CrbModel::param_names() const {
  std::vector<std::string> names;
  if (K > 0) {
    char buf[48];
    for (int k = 0; k < K; ++k) {
      std::snprintf(buf, sizeof(buf), "xi_%d", k + 1);
      names.emplace_back(buf);
    }
    for (int k = 0; k < K; ++k) {
      std::snprintf(buf, sizeof(buf), "psi_%d", k + 1);
      names.emplace_back(buf);
    }
    for (int k = 0; k < K; ++k) {
      std::snprintf(buf, sizeof(buf), "p%d_l0", k + 1);
      names.emplace_back(buf);
      for (int l = 1; l <= L; ++l) {
        std::snprintf(buf, sizeof(buf), "p%d_l%d_re", k + 1, l);
        names.emplace_back(buf);
      }
      for (int l = 1; l <= L; ++l) {
        std::snprintf(buf, sizeof(buf), "p%d_l%d_im", k + 1, l);
        names.emplace_back(buf);
      }
    }
  }
  names.emplace_back("sigma2");
  return names;
}

int default_crb_lag(const Scenario& scenario, std::int64_t num_samples) {
  if (scenario.sources.empty()) return 0;
  if (num_samples < 1) throw ValidationError("default_crb_lag: need num_samples >= 1");
  const double ts = scenario.sampling.ts();
  std::int64_t L = 1;
  for (const auto& src : scenario.sources) {
    if (src.bandwidth_hz <= 0.0) {
      throw ValidationError("default_crb_lag: bandwidth must be positive");
    }
    // first lag where the envelope bound 1/(pi B l Ts) drops below 1e-3
    const std::int64_t lk =
        static_cast<std::int64_t>(std::floor(1000.0 / (kPi * src.bandwidth_hz * ts))) + 1;
    L = std::max(L, lk);
  }
  L = std::min<std::int64_t>(L, std::min<std::int64_t>(num_samples - 1, 512));
  return static_cast<int>(std::max<std::int64_t>(L, 0));
}

CrbModel crb_model_from_scenario(const Scenario& sc, std::int64_t ns_override, int lag_override) {
  CrbModel m;
  m.N = sc.array.num_antennas;
  m.Ns = ns_override > 0 ? ns_override : sc.sampling.num_samples;
  m.K = static_cast<int>(sc.sources.size());
  m.L = lag_override >= 0 ? lag_override : default_crb_lag(sc, m.Ns);
  m.delays_s = sc.array.delays_s;
  m.sigma2 = sc.sigma2();
  const double ts = sc.sampling.ts();
  for (const auto& src : sc.sources) {
    const double omega = src.omega();
    m.xi.push_back(omega * tau_of_theta(src.doa_rad, sc.array));
    m.psi.push_back(omega / m.c_scale);
    Vec pk(m.L + 1);
    for (int l = 0; l <= m.L; ++l) {
      const double mag = src.power * sinc(src.bandwidth_hz * l * ts);
      const double ph = mod_2pi(omega * l * ts);
      pk(l) = mag * cx(std::cos(ph), std::sin(ph));
    }
    pk(0) = cx(pk(0).real(), 0.0);
    m.p.push_back(std::move(pk));
  }
  check_model(m);
  return m;
}

Vec crb_steering(const CrbModel& m, int k) {
  if (k < 0 || k >= m.K) throw ValidationError("crb_steering: source index out of range");
  Vec a(m.N);
  for (int n = 0; n < m.N; ++n) {
    const double ph =
        mod_2pi(n * m.xi[static_cast<std::size_t>(k)] +
                m.c_scale * m.delays_s[static_cast<std::size_t>(n)] * m.psi[static_cast<std::size_t>(k)]);
    a(n) = cx(std::cos(ph), -std::sin(ph));
  }
  return a;
}

Mat toeplitz_band(const Vec& p, std::int64_t ns) {
  const std::int64_t L = p.size() - 1;
  if (L < 0) throw ValidationError("toeplitz_band: empty coefficient list");
  Mat t = Mat::Zero(ns, ns);
  for (std::int64_t r = 0; r < ns; ++r) {
    const std::int64_t lo = std::max<std::int64_t>(0, r - L);
    const std::int64_t hi = std::min<std::int64_t>(ns - 1, r + L);
    for (std::int64_t c = lo; c <= hi; ++c) {
      const std::int64_t d = r - c;
      t(r, c) = d >= 0 ? p(d) : std::conj(p(-d));
    }
  }
  return t;
}

Mat assemble_Rx(const CrbModel& m) {
  check_model(m);
  const std::int64_t total = static_cast<std::int64_t>(m.N) * m.Ns;
  if (total > 4096) {
    throw ValidationError("assemble_Rx: N * Ns exceeds the dense size cap of 4096");
  }
  Mat rx = m.sigma2 * Mat::Identity(total, total);
  for (int k = 0; k < m.K; ++k) {
    const Vec a = crb_steering(m, k);
    const Mat pk = toeplitz_band(m.p[static_cast<std::size_t>(k)], m.Ns);
    for (int mm = 0; mm < m.N; ++mm) {
      for (int nn = 0; nn < m.N; ++nn) {
        rx.block(mm * m.Ns, nn * m.Ns, m.Ns, m.Ns) += (a(mm) * std::conj(a(nn))) * pk;
      }
    }
  }
  return rx;
}

std::vector<Mat> partial_derivatives(const CrbModel& m) {
  check_model(m);
  const std::int64_t total = static_cast<std::int64_t>(m.N) * m.Ns;
  if (total > 4096) {
    throw ValidationError("partial_derivatives: N * Ns exceeds the dense size cap of 4096");
  }
  std::vector<Mat> out;
  out.reserve(static_cast<std::size_t>(m.param_count()));
  if (m.K > 0) {
    std::vector<Vec> av(static_cast<std::size_t>(m.K));
    std::vector<Mat> pv(static_cast<std::size_t>(m.K));
    for (int k = 0; k < m.K; ++k) {
      av[static_cast<std::size_t>(k)] = crb_steering(m, k);
      pv[static_cast<std::size_t>(k)] = toeplitz_band(m.p[static_cast<std::size_t>(k)], m.Ns);
    }
    for (int pass = 0; pass < 2; ++pass) {  // 0: xi, 1: psi
      for (int k = 0; k < m.K; ++k) {
        const Vec& a = av[static_cast<std::size_t>(k)];
        const Vec da = steering_derivative(m, a, pass == 0);
        const Mat mm = da * a.adjoint() + a * da.adjoint();
        out.push_back(kron_nt(mm, pv[static_cast<std::size_t>(k)]));
      }
    }
    for (int k = 0; k < m.K; ++k) {
      const Vec& a = av[static_cast<std::size_t>(k)];
      const Mat caa = a * a.adjoint();
      for (int o = 0; o < 2 * m.L + 1; ++o) {
        Mat time = Mat::Zero(m.Ns, m.Ns);
        for (const auto& [off, coef] : p_coeffs(o, m.L)) time += coef * shift_matrix(m.Ns, off);
        out.push_back(kron_nt(caa, time));
      }
    }
  }
  out.push_back(Mat::Identity(total, total));
  return out;
}

RealMat fim_dense(const CrbModel& m) {
  const Mat rx = assemble_Rx(m);
  const Mat rinv = invert_pd(rx);
  const std::vector<Mat> ds = partial_derivatives(m);
  const int P = static_cast<int>(ds.size());
  std::vector<Mat> md(static_cast<std::size_t>(P));
  for (int i = 0; i < P; ++i) md[static_cast<std::size_t>(i)] = rinv * ds[static_cast<std::size_t>(i)];
  std::vector<double> mdn(static_cast<std::size_t>(P));
  for (int i = 0; i < P; ++i) mdn[static_cast<std::size_t>(i)] = md[static_cast<std::size_t>(i)].norm();
  RealMat omega(P, P);
  for (int i = 0; i < P; ++i) {
    for (int j = i; j < P; ++j) {
      const cx s = md[static_cast<std::size_t>(i)]
                       .cwiseProduct(md[static_cast<std::size_t>(j)].transpose())
                       .sum();
      omega(i, j) = omega(j, i) =
          check_real(s, mdn[static_cast<std::size_t>(i)] * mdn[static_cast<std::size_t>(j)], "dense");
    }
  }
  return omega;
}

RealMat fim(const CrbModel& m) {
  check_model(m);
  if (m.K == 0) {
    RealMat omega(1, 1);
    omega(0, 0) = static_cast<double>(m.N) * static_cast<double>(m.Ns) / (m.sigma2 * m.sigma2);
    return omega;
  }

  const int N = m.N;
  const std::int64_t Ns = m.Ns;
  const int L = m.L;
  const int K = m.K;
  const int S = 2 * L + 1;
  const int P = m.param_count();
  const int sigma_idx = P - 1;
  const auto pblock = [&](int k) { return 2 * K + k * S; };

  const Mat rx = assemble_Rx(m);
  const Mat rinv = invert_pd(rx);

  // Per-source vectors (ids: 3k = a, 3k+1 = d/dxi, 3k+2 = d/dpsi) and
  // time-correlation blocks.
  std::vector<Vec> vecs(static_cast<std::size_t>(3 * K));
  std::vector<Mat> pv(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const Vec a = crb_steering(m, k);
    vecs[static_cast<std::size_t>(3 * k)] = a;
    vecs[static_cast<std::size_t>(3 * k + 1)] = steering_derivative(m, a, true);
    vecs[static_cast<std::size_t>(3 * k + 2)] = steering_derivative(m, a, false);
    pv[static_cast<std::size_t>(k)] = toeplitz_band(m.p[static_cast<std::size_t>(k)], Ns);
  }

  // H(y, x) = sum_{mn} conj(y_m) x_n Block_mn of Rx^-1, cached by vector ids.
  std::map<std::pair<int, int>, Mat> hcache;
  const auto hget = [&](int yid, int xid) -> const Mat& {
    const auto key = std::make_pair(yid, xid);
    auto it = hcache.find(key);
    if (it != hcache.end()) return it->second;
    const Vec& y = vecs[static_cast<std::size_t>(yid)];
    const Vec& x = vecs[static_cast<std::size_t>(xid)];
    Mat h = Mat::Zero(Ns, Ns);
    for (int mm = 0; mm < N; ++mm) {
      for (int nn = 0; nn < N; ++nn) {
        h.noalias() += (std::conj(y(mm)) * x(nn)) * rinv.block(mm * Ns, nn * Ns, Ns, Ns);
      }
    }
    return hcache.emplace(key, std::move(h)).first->second;
  };

  // V(x) = Rx^-1 (x kron I), for the sigma2 row: H2(y, x) = V(y)^H V(x).
  std::map<int, Mat> vcache;
  const auto vget = [&](int id) -> const Mat& {
    auto it = vcache.find(id);
    if (it != vcache.end()) return it->second;
    const Vec& x = vecs[static_cast<std::size_t>(id)];
    Mat v = Mat::Zero(static_cast<Eigen::Index>(N) * Ns, Ns);
    for (int nn = 0; nn < N; ++nn) v.noalias() += x(nn) * rinv.middleCols(nn * Ns, Ns);
    return vcache.emplace(id, std::move(v)).first->second;
  };

  // Head parameter table: global index i < 2K, (source, derivative id).
  struct Head {
    int k;
    int dv_id;
  };
  std::vector<Head> heads(static_cast<std::size_t>(2 * K));
  for (int k = 0; k < K; ++k) {
    heads[static_cast<std::size_t>(k)] = {k, 3 * k + 1};
    heads[static_cast<std::size_t>(K + k)] = {k, 3 * k + 2};
  }
  // Triples (u, v) with D = u v^H kron P_k, two per head parameter.
  const auto triples = [&](const Head& h) {
    return std::array<std::pair<int, int>, 2>{
        std::make_pair(h.dv_id, 3 * h.k), std::make_pair(3 * h.k, h.dv_id)};
  };

  RealMat omega = RealMat::Zero(P, P);

  // head x head
  for (int i = 0; i < 2 * K; ++i) {
    for (int j = i; j < 2 * K; ++j) {
      const Head& hi = heads[static_cast<std::size_t>(i)];
      const Head& hj = heads[static_cast<std::size_t>(j)];
      cx acc = 0.0;
      double mag = 0.0;
      for (const auto& [u1, v1] : triples(hi)) {
        for (const auto& [u2, v2] : triples(hj)) {
          const Mat xp = hget(v2, u1) * pv[static_cast<std::size_t>(hi.k)];
          const Mat yp = hget(v1, u2) * pv[static_cast<std::size_t>(hj.k)];
          acc += xp.cwiseProduct(yp.transpose()).sum();
          mag += xp.norm() * yp.norm();
        }
      }
      omega(i, j) = omega(j, i) = check_real(acc, mag, "head-head");
    }
  }

  // head x p: one offset-trace table per (head, source) pair serves the whole
  // parameter block of that source.
  for (int i = 0; i < 2 * K; ++i) {
    const Head& hi = heads[static_cast<std::size_t>(i)];
    for (int k2 = 0; k2 < K; ++k2) {
      std::vector<cx> trs(static_cast<std::size_t>(S), cx(0.0, 0.0));
      double wmag = 0.0;
      for (const auto& [u1, v1] : triples(hi)) {
        const Mat w = hget(3 * k2, u1) * pv[static_cast<std::size_t>(hi.k)] * hget(v1, 3 * k2);
        wmag += w.norm();
        for (int off = -L; off <= L; ++off) {
          trs[static_cast<std::size_t>(off + L)] += trace_offset(w, off);
        }
      }
      for (int o = 0; o < S; ++o) {
        cx acc = 0.0;
        double mag = wmag;
        for (const auto& [off, coef] : p_coeffs(o, L)) {
          acc += coef * trs[static_cast<std::size_t>(off + L)];
          mag += std::abs(coef) * std::abs(trs[static_cast<std::size_t>(off + L)]);
        }
        const int j = pblock(k2) + o;
        omega(i, j) = omega(j, i) = check_real(acc, mag, "head-p");
      }
    }
  }

  // p x p through the FFT correlation table D(u, v) = tr(G1 T_u G2 T_v).
  const std::int64_t Pf = 2 * Ns;
  const auto pmod = [&](std::int64_t x) { return ((x % Pf) + Pf) % Pf; };
  for (int k1 = 0; k1 < K; ++k1) {
    for (int k2 = k1; k2 < K; ++k2) {
      const Mat& g1 = hget(3 * k2, 3 * k1);
      const Mat& g2 = hget(3 * k1, 3 * k2);
      Mat a = Mat::Zero(Pf, Pf);
      a.topLeftCorner(Ns, Ns) = g2.transpose();
      Mat bm = Mat::Zero(Pf, Pf);
      bm.topLeftCorner(Ns, Ns) = g1;
      const Mat fa = fft2_impl(a, false);
      const Mat fb = fft2_impl(bm.conjugate(), false);
      const Mat cor = fft2_impl(fa.cwiseProduct(fb.conjugate()), true);
      Mat dtab(S, S);
      for (int u = -L; u <= L; ++u) {
        for (int v = -L; v <= L; ++v) {
          dtab(u + L, v + L) = cor(pmod(v), pmod(-u));
        }
      }
      const double dmax = dtab.cwiseAbs().maxCoeff();
      for (int oi = 0; oi < S; ++oi) {
        const int i = pblock(k1) + oi;
        const int j0 = k1 == k2 ? oi : 0;
        for (int oj = j0; oj < S; ++oj) {
          const int j = pblock(k2) + oj;
          cx acc = 0.0;
          double mag = dmax;
          for (const auto& [u, cu] : p_coeffs(oi, L)) {
            for (const auto& [v, cv] : p_coeffs(oj, L)) {
              acc += cu * cv * dtab(u + L, v + L);
              mag += std::abs(cu * cv * dtab(u + L, v + L));
            }
          }
          omega(i, j) = omega(j, i) = check_real(acc, mag, "p-p");
        }
      }
    }
  }

  // sigma2 row and column
  omega(sigma_idx, sigma_idx) = rinv.squaredNorm();
  for (int i = 0; i < 2 * K; ++i) {
    const Head& hi = heads[static_cast<std::size_t>(i)];
    cx acc = 0.0;
    double mag = 0.0;
    for (const auto& [u1, v1] : triples(hi)) {
      const Mat h2 = vget(v1).adjoint() * vget(u1);
      acc += h2.cwiseProduct(pv[static_cast<std::size_t>(hi.k)].transpose()).sum();
      mag += h2.norm() * pv[static_cast<std::size_t>(hi.k)].norm();
    }
    omega(i, sigma_idx) = omega(sigma_idx, i) = check_real(acc, mag, "head-sigma");
  }
  for (int k2 = 0; k2 < K; ++k2) {
    const Mat h2 = vget(3 * k2).adjoint() * vget(3 * k2);
    const double wmag = h2.norm();
    std::vector<cx> trs(static_cast<std::size_t>(S));
    for (int off = -L; off <= L; ++off) {
      trs[static_cast<std::size_t>(off + L)] = trace_offset(h2, off);
    }
    for (int o = 0; o < S; ++o) {
      cx acc = 0.0;
      double mag = wmag;
      for (const auto& [off, coef] : p_coeffs(o, L)) {
        acc += coef * trs[static_cast<std::size_t>(off + L)];
        mag += std::abs(coef) * std::abs(trs[static_cast<std::size_t>(off + L)]);
      }
      const int j = pblock(k2) + o;
      omega(j, sigma_idx) = omega(sigma_idx, j) = check_real(acc, mag, "p-sigma");
    }
  }

  return omega;
}

CrbReport crb(const CrbModel& m) {
  CrbReport rep;
  rep.fim = fim(m);
  rep.param_names = m.param_names();

  const RealMat sym = 0.5 * (rep.fim + rep.fim.transpose());
  Eigen::SelfAdjointEigenSolver<RealMat> es(sym);
  if (es.info() != Eigen::Success) throw NumericalError("crb: eigensolver failed");
  const RealVec& ev = es.eigenvalues();
  const RealMat& v = es.eigenvectors();
  const int P = static_cast<int>(ev.size());
  const double lmax = ev(P - 1);
  if (!(lmax > 0.0)) throw NumericalError("crb: information matrix is not positive");
  const double lmin = ev(0);
  rep.condition_number =
      lmin > 0.0 ? lmax / lmin : std::numeric_limits<double>::infinity();
  rep.used_pinv = !(rep.condition_number <= 1e12);

  RealVec inv_ev(P);
  const double cutoff = lmax * 1e-12;
  for (int i = 0; i < P; ++i) {
    if (rep.used_pinv) {
      inv_ev(i) = ev(i) > cutoff ? 1.0 / ev(i) : 0.0;
    } else {
      inv_ev(i) = 1.0 / ev(i);
    }
  }
  rep.crb_diag.resize(P);
  for (int j = 0; j < P; ++j) {
    double acc = 0.0;
    for (int i = 0; i < P; ++i) acc += v(j, i) * v(j, i) * inv_ev(i);
    rep.crb_diag(j) = acc;
  }
  return rep;
}

}  // namespace passat
