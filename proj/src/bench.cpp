#include "passat/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numeric>
#include <sstream>

#include "passat/io.hpp"
#include "passat/rng.hpp"

namespace passat {

namespace {

constexpr double kPsiScale = 1e9;  // matches CrbModel::c_scale

struct TrialResult {
  bool ok = false;
  double sxi = 0.0, spsi = 0.0, stheta = 0.0, somega = 0.0;
};

struct Truth {
  std::vector<double> omega, theta, xi, psi;
};

Truth truth_of(const Scenario& sc) {
  Truth t;
  for (const auto& src : sc.sources) {
    const double omega = src.omega();
    t.omega.push_back(omega);
    t.theta.push_back(src.doa_rad);
    t.xi.push_back(omega * tau_of_theta(src.doa_rad, sc.array));
    t.psi.push_back(omega / kPsiScale);
  }
  return t;
}

TrialResult run_trial(const Scenario& sc, const PipelineOptions& popts, const Truth& truth) {
  TrialResult res;
  const int K = static_cast<int>(sc.sources.size());
  PipelineResult pr;
  try {
    const SampleMatrix x = synthesize_array_samples(sc);
    pr = run_estimate_pipeline(sc, x, popts);
  } catch (const std::exception&) {
    return res;
  }
  if (static_cast<int>(pr.report.sources.size()) != K) return res;
  for (const auto& s : pr.report.sources) {
    if (!s.ok) return res;
  }

  // Assign estimates to truth by the permutation minimizing the combined
  // relative carrier and normalized angle error.
  std::vector<int> best(static_cast<std::size_t>(K));
  std::vector<int> perm(static_cast<std::size_t>(K));
  std::iota(perm.begin(), perm.end(), 0);
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (int k = 0; k < K; ++k) {
      const auto& s = pr.report.sources[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
      const double dw = (s.omega_hat_rad_s - truth.omega[static_cast<std::size_t>(k)]) /
                        truth.omega[static_cast<std::size_t>(k)];
      const double dt = (s.theta_hat_rad - truth.theta[static_cast<std::size_t>(k)]) / kPi;
      cost += dw * dw + dt * dt;
    }
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  for (int k = 0; k < K; ++k) {
    const auto& s = pr.report.sources[static_cast<std::size_t>(best[static_cast<std::size_t>(k)])];
    const double xi_hat = s.omega_hat_rad_s * s.tau_hat_s;
    const double psi_hat = s.omega_hat_rad_s / kPsiScale;
    const double dxi = xi_hat - truth.xi[static_cast<std::size_t>(k)];
    const double dpsi = psi_hat - truth.psi[static_cast<std::size_t>(k)];
    const double dth = s.theta_hat_rad - truth.theta[static_cast<std::size_t>(k)];
    const double dw = s.omega_hat_rad_s - truth.omega[static_cast<std::size_t>(k)];
    res.sxi += dxi * dxi;
    res.spsi += dpsi * dpsi;
    res.stheta += dth * dth;
    res.somega += dw * dw / (truth.omega[static_cast<std::size_t>(k)] *
                             truth.omega[static_cast<std::size_t>(k)]);
  }
  res.ok = true;
  return res;
}

}  // namespace

PipelineOptions MonteCarloOptions::default_benchmark_pipeline() {
  PipelineOptions p;
  p.tol = 1e-11;
  p.max_iter = 800;
  p.restarts = 4;
  p.denoise = true;
  p.recovery.refine_carrier = false;
  return p;
}

MetricsTable run_montecarlo(const Scenario& base, const MonteCarloOptions& opts) {
  if (base.sources.empty()) throw ValidationError("montecarlo: scenario has no sources");
  if (base.sources.size() > 8) throw ValidationError("montecarlo: pairing limited to 8 sources");
  if (opts.sweep_values.empty()) throw ValidationError("montecarlo: empty sweep");
  if (opts.trials < 1) throw ValidationError("montecarlo: need at least one trial");
  if (opts.jobs < 1) throw ValidationError("montecarlo: jobs must be positive");
  const int K = static_cast<int>(base.sources.size());

  MetricsTable table;
  table.sweep_name = opts.sweep_is_snr ? "snr_db" : "num_samples";
  char msg[160];

  for (double value : opts.sweep_values) {
    Scenario sc = base;
    if (opts.sweep_is_snr) {
      sc.snr_db = value;
    } else {
      if (value < 1.0) throw ValidationError("montecarlo: sample count sweep value below 1");
      sc.sampling.num_samples = static_cast<std::int64_t>(std::llround(value));
    }

    MetricsRow row;
    row.sweep_value = value;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    try {
      const CrbReport rep = crb(crb_model_from_scenario(sc));
      row.crb_xi = rep.crb_diag.segment(0, K).sum();
      row.crb_psi = rep.crb_diag.segment(K, K).sum();
    } catch (const std::exception& e) {
      row.crb_xi = nan;
      row.crb_psi = nan;
      std::snprintf(msg, sizeof(msg), "bound unavailable at %s = %g: %s",
                    table.sweep_name.c_str(), value, e.what());
      table.warnings.push_back(msg);
    }

    PipelineOptions popts = opts.pipeline;
    if (popts.rank == 0) popts.rank = K;
    const Truth truth = truth_of(sc);

    std::vector<TrialResult> results(static_cast<std::size_t>(opts.trials));
    const auto worker = [&](int lo, int hi) {
      for (int t = lo; t < hi; ++t) {
        Scenario sct = sc;
        sct.seed = substream_seed(base.seed, static_cast<std::uint64_t>(t + 1) << 20);
        results[static_cast<std::size_t>(t)] = run_trial(sct, popts, truth);
      }
    };
    if (opts.jobs == 1) {
      worker(0, opts.trials);
    } else {
      const int jobs = std::min(opts.jobs, opts.trials);
      std::vector<std::future<void>> futures;
      const int chunk = (opts.trials + jobs - 1) / jobs;
      for (int j = 0; j < jobs; ++j) {
        const int lo = j * chunk;
        const int hi = std::min(opts.trials, lo + chunk);
        if (lo >= hi) break;
        futures.push_back(std::async(std::launch::async, worker, lo, hi));
      }
      for (auto& f : futures) f.get();
    }

    int used = 0;
    double sxi = 0.0, spsi = 0.0, stheta = 0.0, somega = 0.0;
    for (const auto& r : results) {
      if (!r.ok) continue;
      ++used;
      sxi += r.sxi;
      spsi += r.spsi;
      stheta += r.stheta;
      somega += r.somega;
    }
    row.trials_used = used;
    const int failures = opts.trials - used;
    if (failures * 20 > opts.trials) {  // > 5%
      row.mse_xi = row.mse_psi = row.mse_theta = row.nmse_omega = nan;
      std::snprintf(msg, sizeof(msg), "%d of %d trials failed at %s = %g; metrics dropped",
                    failures, opts.trials, table.sweep_name.c_str(), value);
      table.warnings.push_back(msg);
    } else {
      row.mse_xi = sxi / used;
      row.mse_psi = spsi / used;
      row.mse_theta = stheta / used;
      row.nmse_omega = somega / used;
    }
    table.rows.push_back(row);
  }
  return table;
}

std::string metrics_to_csv(const MetricsTable& table) {
  std::ostringstream out;
  out << table.sweep_name << ",mse_xi,mse_psi,mse_theta,nmse_omega,crb_xi,crb_psi,trials_used\n";
  for (const auto& r : table.rows) {
    out << format_g17(r.sweep_value) << ',' << format_g17(r.mse_xi) << ',' << format_g17(r.mse_psi)
        << ',' << format_g17(r.mse_theta) << ',' << format_g17(r.nmse_omega) << ','
        << format_g17(r.crb_xi) << ',' << format_g17(r.crb_psi) << ',' << r.trials_used << '\n';
  }
  return out.str();
}

}  // namespace passat
