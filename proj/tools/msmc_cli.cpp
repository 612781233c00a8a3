#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "msmc/msmc.hpp"

namespace {

struct Common {
  std::uint64_t seed = 20160101;
  unsigned workers = 1;
  std::string out;
  std::string table;
};

msmc::LogisticCoeffTable load_table(const std::string& path) {
  return path.empty() ? msmc::LogisticCoeffTable::published() : msmc::LogisticCoeffTable::load(path);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw msmc::InvalidInput("cannot open '" + path + "' for writing");
  return os;
}

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--workers", c.workers, "Worker threads (never changes results)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "CSV output path");
}

int run(int argc, char** argv) {
  CLI::App app{"Monte Carlo tests for Markov-switching regime changes"};
  app.set_version_flag("--version", std::string(msmc::kVersion));
  app.require_subcommand(1);

  // test ---------------------------------------------------------------------
  Common test_c;
  std::string test_series, test_transform = "none";
  std::size_t test_lags = 4, test_mc = 100, test_grid = 0;
  double test_alpha = 0.05;
  std::vector<std::string> test_methods{"LMC_min", "LMC_prod", "MMC_min", "MMC_prod"};
  auto* test = app.add_subcommand("test", "LMC/MMC linearity tests on a series");
  add_common(test, test_c);
  test->add_option("--series", test_series, "Series CSV (period,value)")->required()->check(CLI::ExistingFile);
  test->add_option("--transform", test_transform, "none or logdiff100")
      ->check(CLI::IsMember({"none", "logdiff100"}));
  test->add_option("--lags", test_lags, "AR order r")->check(CLI::PositiveNumber);
  test->add_option("--mc", test_mc, "MC replicate count N")->check(CLI::Range(2, 100000000));
  test->add_option("--alpha", test_alpha, "Level used for the reject column")->check(CLI::Range(0.0, 1.0));
  test->add_option("--grid-points", test_grid, "MMC grid points per dimension (odd; 0 = default)");
  test->add_option("--methods", test_methods, "Subset of LMC_min,LMC_prod,MMC_min,MMC_prod")->delimiter(',');
  test->add_option("--table", test_c.table, "Coefficient table CSV (default: built-in)");

  // chp ----------------------------------------------------------------------
  Common chp_c;
  std::string chp_series, chp_transform = "none";
  std::size_t chp_B = 200, chp_draws = 200;
  double chp_alpha = 0.05;
  auto* chp = app.add_subcommand("chp", "supTS/expTS bootstrap tests on a series (AR(1) null)");
  add_common(chp, chp_c);
  chp->add_option("--series", chp_series, "Series CSV")->required()->check(CLI::ExistingFile);
  chp->add_option("--transform", chp_transform, "none or logdiff100")
      ->check(CLI::IsMember({"none", "logdiff100"}));
  chp->add_option("--bootstrap", chp_B, "Bootstrap replications B")->check(CLI::Range(2, 100000000));
  chp->add_option("--draws", chp_draws, "Nuisance draws")->check(CLI::PositiveNumber);
  chp->add_option("--alpha", chp_alpha, "Level used for the reject column")->check(CLI::Range(0.0, 1.0));

  // study --------------------------------------------------------------------
  Common study_c;
  std::string study_config, study_profile = "desk";
  std::size_t study_reps = 0, study_mc = 0, study_grid = 0, study_B = 0, study_draws = 0;
  double study_alpha = 0.0;
  std::vector<std::string> study_methods;
  bool study_quiet = false;
  auto* study = app.add_subcommand("study", "Size/power grid over MS-AR DGPs");
  add_common(study, study_c);
  study->add_option("--config", study_config, "key=value config file")->check(CLI::ExistingFile);
  study->add_option("--profile", study_profile, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
  study->add_option("--reps", study_reps, "Replications per cell");
  study->add_option("--mc", study_mc, "MC replicate count N");
  study->add_option("--alpha", study_alpha, "Nominal level");
  study->add_option("--grid-points", study_grid, "MMC grid points (odd)");
  study->add_option("--bootstrap", study_B, "CHP bootstrap replications");
  study->add_option("--draws", study_draws, "CHP nuisance draws");
  study->add_option("--methods", study_methods, "Methods to run")->delimiter(',');
  study->add_flag("--quiet", study_quiet, "No per-cell progress");

  // fit-table ----------------------------------------------------------------
  Common fit_c;
  std::vector<std::size_t> fit_sizes{50, 100, 150, 200, 250};
  std::size_t fit_draws = 1000000;
  auto* fit = app.add_subcommand("fit-table", "Regenerate the logistic coefficient table");
  add_common(fit, fit_c);
  fit->add_option("--sizes", fit_sizes, "Sample sizes")->delimiter(',');
  fit->add_option("--reps", fit_draws, "Simulated samples per size (>= 10000)");

  // simulate -----------------------------------------------------------------
  Common sim_c;
  std::size_t sim_T = 200, sim_paths = 1;
  double mu1 = 0.0, mu2 = 0.0, s1 = 1.0, s2 = 1.0, p11 = 0.9, p22 = 0.9;
  std::vector<double> sim_phi{0.1};
  auto* sim = app.add_subcommand("simulate", "Emit MS-AR sample paths");
  add_common(sim, sim_c);
  sim->add_option("--T", sim_T, "Path length")->check(CLI::PositiveNumber);
  sim->add_option("--reps", sim_paths, "Number of paths")->check(CLI::PositiveNumber);
  sim->add_option("--mu1", mu1);
  sim->add_option("--mu2", mu2);
  sim->add_option("--sigma1", s1);
  sim->add_option("--sigma2", s2);
  sim->add_option("--p11", p11);
  sim->add_option("--p22", p22);
  sim->add_option("--phi", sim_phi, "AR coefficients")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  if (test->parsed()) {
    const auto data = msmc::ingest_series(test_series, msmc::parse_transformation(test_transform));
    msmc::EmpiricalOptions opt;
    opt.r = test_lags;
    opt.N = test_mc;
    opt.master_seed = test_c.seed;
    opt.workers = test_c.workers;
    opt.grid.points_per_dim = test_grid;
    opt.methods.clear();
    for (const auto& m : test_methods) opt.methods.push_back(msmc::to_mc_method(msmc::parse_study_method(m)));
    const auto table = load_table(test_c.table);
    const auto reps = msmc::run_empirical(data.values, opt, table);

    std::ostringstream echo;
    echo << "command=test\nseries=" << test_series << "\ntransform=" << test_transform
         << "\nlags=" << test_lags << "\nmc=" << test_mc << "\ngrid_points=" << test_grid
         << "\nseed=" << test_c.seed << "\ntable=" << test_c.table << '\n';
    std::cout << "# " << data.values.size() << " observations ("
              << (data.labels.empty() ? std::string("unlabelled") : data.labels.front() + " to " + data.labels.back())
              << "), r=" << test_lags << ", N=" << test_mc << ", seed=" << test_c.seed << "\n";
    msmc::write_linearity_summary(std::cout, reps);
    for (const auto& r : reps) {
      if (r.p_value <= test_alpha) std::cout << msmc::to_string(r.method) << " rejects at " << test_alpha << '\n';
    }
    if (!test_c.out.empty()) {
      auto os = open_out(test_c.out);
      msmc::write_linearity_csv(os, reps, test_c.seed, msmc::fnv1a(echo.str()));
    }
    return 0;
  }

  if (chp->parsed()) {
    const auto data = msmc::ingest_series(chp_series, msmc::parse_transformation(chp_transform));
    const auto rep = msmc::chp_bootstrap_test(data.values, chp_B, chp_draws, chp_c.seed, chp_c.workers);
    std::ostringstream echo;
    echo << "command=chp\nseries=" << chp_series << "\ntransform=" << chp_transform << "\nbootstrap=" << chp_B
         << "\ndraws=" << chp_draws << "\nseed=" << chp_c.seed << '\n';
    std::cout << "supTS " << msmc::format_fixed(rep.supTS, 4) << "  p=" << msmc::format_fixed(rep.bootstrap_p_sup, 3)
              << (rep.bootstrap_p_sup <= chp_alpha ? "  reject" : "") << '\n'
              << "expTS " << msmc::format_fixed(rep.expTS, 4) << "  p=" << msmc::format_fixed(rep.bootstrap_p_exp, 3)
              << (rep.bootstrap_p_exp <= chp_alpha ? "  reject" : "") << '\n';
    if (!chp_c.out.empty()) {
      auto os = open_out(chp_c.out);
      os << msmc::csv_header_comment(chp_c.seed, msmc::fnv1a(echo.str())) << '\n'
         << "method,statistic,bootstrap_p_value,B,draws,seed\n"
         << "supTS," << msmc::format_double(rep.supTS) << ',' << msmc::format_double(rep.bootstrap_p_sup) << ','
         << rep.B << ',' << rep.draws << ',' << rep.seed << '\n'
         << "expTS," << msmc::format_double(rep.expTS) << ',' << msmc::format_double(rep.bootstrap_p_exp) << ','
         << rep.B << ',' << rep.draws << ',' << rep.seed << '\n';
    }
    return 0;
  }

  if (study->parsed()) {
    msmc::StudyConfig cfg;
    cfg.apply(msmc::Profile::named(study_profile));
    if (!study_config.empty()) {
      std::ifstream in(study_config);
      cfg = msmc::parse_study_config(in, cfg);
    }
    if (study->count("--seed")) cfg.master_seed = study_c.seed;
    if (study_reps) cfg.replications = study_reps;
    if (study_mc) cfg.N = study_mc;
    if (study_alpha > 0.0) cfg.alpha = study_alpha;
    if (study_grid) cfg.grid_points = study_grid;
    if (study_B) cfg.B = study_B;
    if (study_draws) cfg.chp_draws = study_draws;
    if (!study_methods.empty()) {
      cfg.methods.clear();
      for (const auto& m : study_methods) cfg.methods.push_back(msmc::parse_study_method(m));
    }
    std::cout << "# config\n" << cfg.echo();
    const auto rows = msmc::run_size_power_study(cfg, msmc::LogisticCoeffTable::published(), study_c.workers,
                                                 study_quiet ? nullptr : &std::cerr);
    std::cout << "cell  phi  dmu  dsig   p11  p22    T  method     rate(%)   se\n";
    for (const auto& r : rows) {
      std::string m = r.method;
      m.resize(9, ' ');
      std::cout << r.cell << "  " << msmc::format_fixed(r.phi, 1) << "  " << msmc::format_fixed(r.delta_mu, 1) << "  "
                << msmc::format_fixed(r.delta_sigma, 1) << "  " << msmc::format_fixed(r.p11, 2) << " "
                << msmc::format_fixed(r.p22, 2) << "  " << r.T << "  " << m << "  "
                << msmc::format_fixed(100.0 * r.rate, 1) << "  " << msmc::format_fixed(100.0 * r.se, 2)
                << (r.status == "ok" ? "" : "  " + r.status) << '\n';
    }
    if (!study_c.out.empty()) {
      auto os = open_out(study_c.out);
      msmc::write_study_csv(os, rows, cfg.master_seed, cfg.hash());
    }
    return 0;
  }

  if (fit->parsed()) {
    const auto res = msmc::regenerate_coeff_table(fit_sizes, fit_draws, fit_c.seed, fit_c.workers);
    const auto ref = msmc::LogisticCoeffTable::published();
    std::cout << "stat    T     gamma0      gamma1    fit_err   sup|F-F_ref|\n";
    for (std::size_t i = 0; i < res.fits.size(); ++i) {
      const auto& f = res.fits[i];
      std::cout << msmc::to_string(f.coeffs.statistic) << "  " << f.coeffs.T << "  "
                << msmc::format_fixed(f.coeffs.gamma0, 4) << "  " << msmc::format_fixed(f.coeffs.gamma1, 4) << "  "
                << msmc::format_fixed(f.sup_error, 4);
      if (ref.has(f.coeffs.statistic, f.coeffs.T)) {
        const auto published = ref.lookup(f.coeffs.statistic, f.coeffs.T, msmc::SizeLookup::exact);
        std::cout << "  " << msmc::format_fixed(msmc::sup_distance_on_grid(res.quantiles[i], f.coeffs, published), 4);
      }
      std::cout << '\n';
    }
    if (!fit_c.out.empty()) {
      std::ostringstream echo;
      echo << "command=fit-table\nreps=" << fit_draws << "\nseed=" << fit_c.seed << '\n';
      auto os = open_out(fit_c.out);
      os << msmc::csv_header_comment(fit_c.seed, msmc::fnv1a(echo.str())) << '\n';
      res.table.write_csv(os);
    }
    return 0;
  }

  if (sim->parsed()) {
    msmc::MSARSpec spec;
    spec.regimes = {mu1, mu2, s1, s2};
    spec.transition = {p11, p22};
    spec.phi = sim_phi;
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!sim_c.out.empty()) {
      file = open_out(sim_c.out);
      os = &file;
    }
    *os << "path,t,y\n";
    for (std::size_t p = 0; p < sim_paths; ++p) {
      auto rng = msmc::make_stream(sim_c.seed, {msmc::stream_tag::data, p});
      const auto y = msmc::simulate_msar(spec, sim_T, rng);
      for (std::size_t t = 0; t < y.size(); ++t) *os << p << ',' << (t + 1) << ',' << msmc::format_double(y[t]) << '\n';
    }
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
