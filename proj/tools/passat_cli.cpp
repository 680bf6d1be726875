#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "passat/bench.hpp"
#include "passat/identifiability.hpp"
#include "passat/io.hpp"
#include "passat/pipeline.hpp"
#include "passat/svg.hpp"

namespace fs = std::filesystem;
using namespace passat;

namespace {

struct GlobalArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 1;
};

Scenario load_scenario(const GlobalArgs& g) {
  if (g.config_path.empty()) throw ValidationError("--config is required");
  Scenario sc = parse_scenario_config(read_text_file(g.config_path));
  if (g.seed_set) sc.seed = g.seed;
  return sc;
}

fs::path ensure_out_dir(const GlobalArgs& g) {
  fs::path out(g.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create output directory: " + out.string());
  return out;
}

std::vector<double> parse_value_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::string item;
  std::istringstream is(text);
  while (std::getline(is, item, ',')) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(item, &pos);
      while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
      if (pos != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (...) {
      throw ValidationError(std::string(what) + ": bad numeric list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ValidationError(std::string(what) + ": empty value list");
  return out;
}

std::string join_flags(const std::set<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) {
    if (!out.empty()) out += ';';
    out += f;
  }
  return out;
}

int cmd_simulate(const GlobalArgs& g) {
  const Scenario sc = load_scenario(g);
  const ValidationReport rep = validate_scenario(sc);
  if (!rep.all_pass()) throw ValidationError("scenario validation failed:\n" + rep.to_text());
  const fs::path out = ensure_out_dir(g);
  const SampleMatrix x = synthesize_array_samples(sc);
  write_samples((out / "samples.bin").string(), x);

  std::ostringstream truth;
  truth << "source_id,f_hz,bandwidth_hz,theta_rad,tau_s,power\n";
  for (std::size_t k = 0; k < sc.sources.size(); ++k) {
    const auto& s = sc.sources[k];
    truth << k << ',' << format_g17(s.carrier_hz) << ',' << format_g17(s.bandwidth_hz) << ','
          << format_g17(s.doa_rad) << ',' << format_g17(tau_of_theta(s.doa_rad, sc.array)) << ','
          << format_g17(s.power) << '\n';
  }
  write_text_file((out / "truth.csv").string(), truth.str());
  write_text_file((out / "scenario.cfg").string(), scenario_to_config(sc));

  std::cout << "samples: " << (out / "samples.bin").string() << "\n";
  std::cout << "antennas: " << sc.array.num_antennas << "\n";
  std::cout << "num_samples: " << sc.sampling.num_samples << "\n";
  std::cout << "fs_hz: " << format_g17(sc.sampling.fs_hz) << "\n";
  std::cout << "seed: " << sc.seed << "\n";
  return 0;
}

struct EstimateArgs {
  std::string samples_path;
  int rank = 0;
  bool auto_rank = false;
  int k_over = 0;
  int lag = 0;
  double mu = -1.0;
  double tol = 1e-10;
  int max_iter = 500;
  int restarts = 5;
  bool no_denoise = false;
  bool refine = false;
  int grid = 1024;
  bool from_oracle = false;
};

int cmd_estimate(const GlobalArgs& g, const EstimateArgs& e) {
  const Scenario sc = load_scenario(g);
  const fs::path out = ensure_out_dir(g);
  if (e.rank > 0 && e.auto_rank) {
    throw ValidationError("estimate: --rank and --auto-rank are mutually exclusive");
  }
  if (e.samples_path.empty() && !e.from_oracle) {
    throw ValidationError("estimate: give --samples or --from-oracle");
  }

  PipelineOptions popts;
  popts.rank = e.rank;
  popts.k_over = e.k_over;
  popts.max_lag = e.lag;
  popts.mu_rel = e.mu;
  popts.tol = e.tol;
  popts.max_iter = e.max_iter;
  popts.restarts = e.restarts;
  popts.denoise = !e.no_denoise;
  popts.recovery.refine_carrier = e.refine;
  popts.recovery.grid_size = e.grid;
  if (g.seed_set) popts.seed = g.seed;

  const PipelineResult pr = e.from_oracle
                                ? run_estimate_pipeline(sc, popts)
                                : run_estimate_pipeline(sc, read_samples(e.samples_path), popts);

  write_text_file((out / "estimates.csv").string(), estimates_to_csv(pr.report));
  write_factors((out / "factors.bin").string(), pr.factors.R, pr.factors.A, pr.factors.B);
  for (const auto& s : pr.report.sources) {
    if (!s.ok) continue;
    const std::string name = "spectrum_" + std::to_string(s.source_id) + ".csv";
    write_text_file((out / name).string(), spectrum_to_csv(s.spectrum));
  }

  std::cout << "rank: " << pr.rank << (pr.auto_rank ? " (detected)" : " (given)") << "\n";
  std::cout << "max_lag: " << pr.max_lag << "\n";
  std::cout << "sigma2_hat: " << format_g17(pr.sigma2_hat) << "\n";
  std::cout << "fit: " << format_g17(pr.fit) << "\n";
  for (const auto& s : pr.report.sources) {
    std::cout << "source " << s.source_id << ": ";
    if (s.ok) {
      std::cout << "f_hat_hz=" << format_g17(s.f_hat_hz)
                << " theta_hat_rad=" << format_g17(s.theta_hat_rad)
                << " tau_hat_s=" << format_g17(s.tau_hat_s) << " power=" << format_g17(s.power);
      const std::string flags = join_flags(s.flags);
      if (!flags.empty()) std::cout << " flags=" << flags;
    } else {
      std::cout << "failed (" << s.error << ")";
    }
    std::cout << "\n";
  }
  for (const auto& w : pr.warnings) std::cout << "warning: " << w << "\n";
  return 0;
}

struct MontecarloArgs {
  std::string sweep_ns;
  std::string sweep_snr;
  int trials = 100;
};

int cmd_montecarlo(const GlobalArgs& g, const MontecarloArgs& m) {
  const Scenario sc = load_scenario(g);
  const fs::path out = ensure_out_dir(g);
  if (m.sweep_ns.empty() == m.sweep_snr.empty()) {
    throw ValidationError("montecarlo: give exactly one of --sweep-ns or --sweep-snr");
  }

  MonteCarloOptions mco;
  mco.sweep_is_snr = !m.sweep_snr.empty();
  mco.sweep_values =
      parse_value_list(mco.sweep_is_snr ? m.sweep_snr : m.sweep_ns, "montecarlo sweep");
  mco.trials = m.trials;
  mco.jobs = g.jobs;

  const MetricsTable table = run_montecarlo(sc, mco);
  write_text_file((out / "metrics.csv").string(), metrics_to_csv(table));

  std::vector<PlotSeries> series(4);
  series[0].label = "MSE xi";
  series[1].label = "bound xi";
  series[1].dashed = true;
  series[2].label = "MSE psi";
  series[3].label = "bound psi";
  series[3].dashed = true;
  for (const auto& r : table.rows) {
    series[0].x.push_back(r.sweep_value);
    series[0].y.push_back(r.mse_xi);
    series[1].x.push_back(r.sweep_value);
    series[1].y.push_back(r.crb_xi);
    series[2].x.push_back(r.sweep_value);
    series[2].y.push_back(r.mse_psi);
    series[3].x.push_back(r.sweep_value);
    series[3].y.push_back(r.crb_psi);
  }
  write_text_file((out / "metrics.svg").string(),
                  render_line_plot("estimator error vs bound", table.sweep_name, "value", series,
                                   false, true));

  std::cout << metrics_to_csv(table);
  for (const auto& w : table.warnings) std::cout << "warning: " << w << "\n";
  return 0;
}

struct CrbArgs {
  std::int64_t ns = 0;
  int lag = -1;
  bool dump_fim = false;
};

int cmd_crb(const GlobalArgs& g, const CrbArgs& c) {
  const Scenario sc = load_scenario(g);
  const fs::path out = ensure_out_dir(g);
  const CrbModel model = crb_model_from_scenario(sc, c.ns, c.lag);
  const CrbReport rep = crb(model);
  write_text_file((out / "crb.csv").string(), crb_to_csv(rep));
  if (c.dump_fim) write_real_matrix((out / "fim.bin").string(), rep.fim);

  std::cout << "parameters: " << rep.param_names.size() << "\n";
  std::cout << "lag_depth: " << model.L << "\n";
  std::cout << "condition_number: " << format_g17(rep.condition_number) << "\n";
  std::cout << "used_pinv: " << (rep.used_pinv ? "yes" : "no") << "\n";
  for (int k = 0; k < model.K; ++k) {
    std::cout << rep.param_names[static_cast<std::size_t>(k)] << ": "
              << format_g17(rep.crb_diag(k)) << "\n";
    std::cout << rep.param_names[static_cast<std::size_t>(model.K + k)] << ": "
              << format_g17(rep.crb_diag(model.K + k)) << "\n";
  }
  return 0;
}

int cmd_check(const GlobalArgs& g) {
  const Scenario sc = load_scenario(g);
  const ValidationReport rep = validate_scenario(sc);
  std::cout << rep.to_text();
  bool ok = rep.all_pass();
  try {
    const int L = sc.sampling.max_lag > 0 ? sc.sampling.max_lag : default_max_lag(sc);
    const IdentifiabilityReport idr = kruskal_check(sc, L);
    std::cout << "krank_A: " << idr.krank_a << "\n";
    std::cout << "krank_R: " << idr.krank_r << "\n";
    std::cout << "kruskal_lhs: " << idr.lhs << "\n";
    std::cout << "kruskal_rhs: " << idr.rhs << "\n";
    if (idr.k1_rule) std::cout << "kruskal_note: single source, nonzero factors suffice\n";
    std::cout << "kruskal: " << (idr.satisfied ? "satisfied" : "violated") << "\n";
    std::cout << "omega_collisions: " << idr.omega_violations.size() << "\n";
    ok = ok && idr.satisfied;
  } catch (const std::exception& e) {
    std::cout << "identifiability: unavailable (" << e.what() << ")\n";
    ok = false;
  }
  return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multiband sub-Nyquist array receiver toolkit"};
  app.require_subcommand(1);

  GlobalArgs g;
  app.add_option("--config", g.config_path, "scenario config file");
  app.add_option("--out", g.out_dir, "output directory (default .)");
  auto* seed_opt = app.add_option("--seed", g.seed, "override the scenario seed");
  app.add_option("--jobs", g.jobs, "worker threads for the benchmark")->check(CLI::PositiveNumber);

  auto* sim = app.add_subcommand("simulate", "synthesize array samples");
  sim->fallthrough();

  EstimateArgs e;
  auto* est = app.add_subcommand("estimate", "recover carriers, angles, and spectra");
  est->fallthrough();
  est->add_option("--samples", e.samples_path, "sample container to analyze");
  est->add_option("--rank", e.rank, "use this source count instead of detecting");
  est->add_flag("--auto-rank", e.auto_rank, "detect the source count (default)");
  est->add_option("--k-over", e.k_over, "over-factoring width for detection");
  est->add_option("--lag", e.lag, "correlation lag count");
  est->add_option("--mu", e.mu, "detection weight relative to the tensor norm");
  est->add_option("--tol", e.tol, "solver tolerance");
  est->add_option("--max-iter", e.max_iter, "solver sweep cap");
  est->add_option("--restarts", e.restarts, "solver restarts");
  est->add_flag("--no-denoise", e.no_denoise, "keep the noise floor on the zero lag");
  est->add_flag("--refine", e.refine, "spectral centroid pass on each carrier");
  est->add_option("--grid", e.grid, "spectrum grid size");
  est->add_flag("--from-oracle", e.from_oracle, "analyze the ideal model tensor");

  MontecarloArgs m;
  auto* mc = app.add_subcommand("montecarlo", "error-versus-bound benchmark");
  mc->fallthrough();
  mc->add_option("--sweep-ns", m.sweep_ns, "comma list of sample counts");
  mc->add_option("--sweep-snr", m.sweep_snr, "comma list of SNR values in dB");
  mc->add_option("--trials", m.trials, "trials per sweep point")->check(CLI::PositiveNumber);

  CrbArgs c;
  auto* cr = app.add_subcommand("crb", "estimation bound for the scenario");
  cr->fallthrough();
  cr->add_option("--ns", c.ns, "override the sample count");
  cr->add_option("--lag", c.lag, "override the modeled lag depth");
  cr->add_flag("--dump-fim", c.dump_fim, "write the information matrix container");

  auto* ch = app.add_subcommand("check", "validate the scenario and its identifiability");
  ch->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed_opt->count() > 0;

  try {
    if (sim->parsed()) return cmd_simulate(g);
    if (est->parsed()) return cmd_estimate(g, e);
    if (mc->parsed()) return cmd_montecarlo(g, m);
    if (cr->parsed()) return cmd_crb(g, c);
    if (ch->parsed()) return cmd_check(g);
    throw ValidationError("no subcommand given");
  } catch (const ValidationError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 2;
  } catch (const IoError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 4;
  } catch (const NumericalError& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 3;
  }
}
