#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "msmc/chp.hpp"
#include "msmc/data.hpp"
#include "msmc/error.hpp"
#include "msmc/format.hpp"
#include "msmc/linearity.hpp"
#include "msmc/mc_engine.hpp"
#include "msmc/msar.hpp"
#include "msmc/parallel.hpp"
#include "msmc/random.hpp"

namespace msmc {

enum class StudyMethod { LMC_min, LMC_prod, MMC_min, MMC_prod, supTS, expTS };

inline constexpr std::array<StudyMethod, 6> kAllStudyMethods{
    StudyMethod::LMC_min, StudyMethod::LMC_prod, StudyMethod::MMC_min,
    StudyMethod::MMC_prod, StudyMethod::supTS,   StudyMethod::expTS};

inline const char* to_string(StudyMethod m) {
  switch (m) {
    case StudyMethod::LMC_min: return "LMC_min";
    case StudyMethod::LMC_prod: return "LMC_prod";
    case StudyMethod::MMC_min: return "MMC_min";
    case StudyMethod::MMC_prod: return "MMC_prod";
    case StudyMethod::supTS: return "supTS";
    case StudyMethod::expTS: return "expTS";
  }
  return "?";
}

inline StudyMethod parse_study_method(const std::string& s) {
  for (auto m : kAllStudyMethods)
    if (s == to_string(m)) return m;
  if (s == "LMC_x") return StudyMethod::LMC_prod;
  if (s == "MMC_x") return StudyMethod::MMC_prod;
  throw InvalidInput("unknown method '" + s +
                     "' (expected LMC_min, LMC_prod, MMC_min, MMC_prod, supTS or expTS)");
}

inline McMethod to_mc_method(StudyMethod m) {
  switch (m) {
    case StudyMethod::LMC_min: return McMethod::LMC_min;
    case StudyMethod::LMC_prod: return McMethod::LMC_prod;
    case StudyMethod::MMC_min: return McMethod::MMC_min;
    case StudyMethod::MMC_prod: return McMethod::MMC_prod;
    default: throw InvalidInput(std::string(to_string(m)) + " is not an MC mixture test");
  }
}

inline bool is_chp(StudyMethod m) { return m == StudyMethod::supTS || m == StudyMethod::expTS; }

/// Counts used by a run. The desk profile trims the replication and
/// bootstrap counts; the paper profile uses the full counts.
struct Profile {
  std::size_t replications = 500;
  std::size_t N = 100;
  std::size_t B = 200;
  std::size_t chp_draws = 200;

  static Profile desk() { return {500, 100, 200, 200}; }
  static Profile paper() { return {1000, 100, 500, 200}; }
  static Profile named(const std::string& name) {
    if (name == "desk") return desk();
    if (name == "paper") return paper();
    throw InvalidInput("unknown profile '" + name + "' (expected desk or paper)");
  }
};

/// One cell of a size/power study: a DGP, a sample size and the tests run on it.
struct ExperimentConfig {
  MSARSpec dgp;
  std::size_t T = 100;
  std::size_t replications = 500;
  std::size_t N = 100;
  double alpha = 0.05;
  std::vector<StudyMethod> methods{kAllStudyMethods.begin(), kAllStudyMethods.end()};
  std::uint64_t master_seed = 0;
  std::string output_path;
  std::size_t B = 200;
  std::size_t chp_draws = 200;
  GridOptions grid{};

  void validate() const {
    if (replications < 1) throw InvalidInput("replications must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
    if (N < 2) throw InvalidInput("N must be at least 2");
    if (methods.empty()) throw InvalidInput("no methods requested");
  }
};

/// One output row: rejection frequency of one method in one cell.
struct StudyRow {
  std::size_t cell = 0;
  double phi = 0.0;
  double delta_mu = 0.0;
  double delta_sigma = 0.0;
  double p11 = 0.0;
  double p22 = 0.0;
  std::size_t T = 0;
  std::string method;
  std::size_t rejections = 0;
  std::size_t replications = 0;
  /// Rejection frequency in [0, 1] and its binomial standard error
  /// sqrt(rate (1 - rate) / replications); one replication gives SE 0.
  double rate = 0.0;
  double se = 0.0;
  double seconds = 0.0;
  std::string status = "ok";

  /// Every field except the wall time.
  bool same_result(const StudyRow& o) const {
    return cell == o.cell && phi == o.phi && delta_mu == o.delta_mu &&
           delta_sigma == o.delta_sigma && p11 == o.p11 && p22 == o.p22 && T == o.T &&
           method == o.method && rejections == o.rejections && replications == o.replications &&
           rate == o.rate && se == o.se && status == o.status;
  }
};

struct ReplicationOutcome {
  /// p-values per requested method, in request order.
  std::vector<double> p_values;
};

/// p-values of every requested method on one simulated sample.
inline ReplicationOutcome run_replication(const ExperimentConfig& cfg,
                                          const LogisticCoeffTable& table,
                                          std::uint64_t cell_seed, std::size_t rep) {
  Stream data_rng = make_stream(cell_seed, {stream_tag::data, rep});
  const auto y = simulate_msar(cfg.dgp, cfg.T, data_rng);
  const std::size_t r = std::max<std::size_t>(1, cfg.dgp.order());

  std::vector<McMethod> mc_methods;
  bool want_chp = false;
  for (auto m : cfg.methods) {
    if (is_chp(m)) {
      want_chp = true;
    } else {
      mc_methods.push_back(to_mc_method(m));
    }
  }
  std::vector<LinearityReport> mc;
  if (!mc_methods.empty()) {
    mc = run_linearity_tests(y, r, cfg.N, mc_methods, table,
                             derive_seed(cell_seed, {stream_tag::mc_test, rep}), cfg.grid);
  }
  CHPReport chp;
  if (want_chp) {
    chp = chp_bootstrap_test(y, cfg.B, cfg.chp_draws, derive_seed(cell_seed, {stream_tag::chp, rep}));
  }
  ReplicationOutcome out;
  std::size_t k = 0;
  for (auto m : cfg.methods) {
    if (m == StudyMethod::supTS) {
      out.p_values.push_back(chp.bootstrap_p_sup);
    } else if (m == StudyMethod::expTS) {
      out.p_values.push_back(chp.bootstrap_p_exp);
    } else {
      out.p_values.push_back(mc[k++].p_value);
    }
  }
  return out;
}

/// Rejection frequencies for one cell. Replications run in parallel, each
/// on substreams of cell_seed, so the rows do not depend on `workers`.
inline std::vector<StudyRow> run_cell(const ExperimentConfig& cfg, const LogisticCoeffTable& table,
                                      std::uint64_t cell_seed, std::size_t cell_index,
                                      unsigned workers = 1) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<ReplicationOutcome> outcomes(cfg.replications);
  parallel_for(cfg.replications, workers,
               [&](std::size_t rep) { outcomes[rep] = run_replication(cfg, table, cell_seed, rep); });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::vector<StudyRow> rows;
  for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
    StudyRow row;
    row.cell = cell_index;
    row.phi = cfg.dgp.phi.empty() ? 0.0 : cfg.dgp.phi[0];
    row.delta_mu = cfg.dgp.regimes.delta_mu();
    row.delta_sigma = cfg.dgp.regimes.delta_sigma();
    row.p11 = cfg.dgp.transition.p11;
    row.p22 = cfg.dgp.transition.p22;
    row.T = cfg.T;
    row.method = to_string(cfg.methods[k]);
    row.replications = cfg.replications;
    for (const auto& o : outcomes)
      if (o.p_values[k] <= cfg.alpha) ++row.rejections;
    row.rate = static_cast<double>(row.rejections) / static_cast<double>(row.replications);
    row.se = std::sqrt(row.rate * (1.0 - row.rate) / static_cast<double>(row.replications));
    row.seconds = seconds;
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Grid of cells: every (phi, T) crossed with the null DGP and with every
/// (separation, transition) pair.
struct StudyConfig {
  std::vector<double> phis{0.1, 0.9};
  std::vector<std::size_t> sizes{100, 200};
  std::vector<std::pair<double, double>> separations{{2.0, 0.0}, {0.0, 1.0}, {2.0, 1.0}};
  std::vector<std::pair<double, double>> transitions{{0.9, 0.9}, {0.9, 0.5}, {0.9, 0.1}};
  bool include_null = true;
  double mu1 = 0.0;
  double sigma1 = 1.0;
  std::size_t replications = 500;
  std::size_t N = 100;
  double alpha = 0.05;
  std::size_t B = 200;
  std::size_t chp_draws = 200;
  std::size_t grid_points = 0;
  std::vector<StudyMethod> methods{kAllStudyMethods.begin(), kAllStudyMethods.end()};
  std::uint64_t master_seed = 20160101;

  void apply(const Profile& p) {
    replications = p.replications;
    N = p.N;
    B = p.B;
    chp_draws = p.chp_draws;
  }

  std::vector<ExperimentConfig> cells() const {
    std::vector<ExperimentConfig> out;
    auto add = [&](double phi, std::size_t T, double dmu, double dsigma, double p11, double p22) {
      ExperimentConfig c;
      c.dgp.regimes = RegimeParams::from_separation(dmu, dsigma, mu1, sigma1);
      c.dgp.transition = {p11, p22};
      c.dgp.phi = {phi};
      c.T = T;
      c.replications = replications;
      c.N = N;
      c.alpha = alpha;
      c.methods = methods;
      c.B = B;
      c.chp_draws = chp_draws;
      c.grid.points_per_dim = grid_points;
      out.push_back(std::move(c));
    };
    for (double phi : phis) {
      for (std::size_t T : sizes) {
        if (include_null) add(phi, T, 0.0, 0.0, 0.9, 0.9);
        for (const auto& [dmu, ds] : separations)
          for (const auto& [p11, p22] : transitions) add(phi, T, dmu, ds, p11, p22);
      }
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i].master_seed = derive_seed(master_seed, {stream_tag::cell, i});
    }
    return out;
  }

  /// Canonical key=value echo; together with the version it determines
  /// every numeric output.
  std::string echo() const {
    std::ostringstream os;
    auto list = [&](const auto& v, auto fmt) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
      return s;
    };
    auto dbl = [](double d) { return format_double(d); };
    auto pair = [](const std::pair<double, double>& p) {
      return format_double(p.first) + ":" + format_double(p.second);
    };
    os << "phi=" << list(phis, dbl) << '\n'
       << "T=" << list(sizes, [](std::size_t t) { return std::to_string(t); }) << '\n'
       << "separations=" << list(separations, pair) << '\n'
       << "transitions=" << list(transitions, pair) << '\n'
       << "include_null=" << (include_null ? "true" : "false") << '\n'
       << "mu1=" << format_double(mu1) << '\n'
       << "sigma1=" << format_double(sigma1) << '\n'
       << "reps=" << replications << '\n'
       << "mc=" << N << '\n'
       << "alpha=" << format_double(alpha) << '\n'
       << "bootstrap=" << B << '\n'
       << "chp_draws=" << chp_draws << '\n'
       << "grid_points=" << grid_points << '\n'
       << "methods=" << list(methods, [](StudyMethod m) { return std::string(to_string(m)); }) << '\n'
       << "seed=" << master_seed << '\n';
    return os.str();
  }

  std::uint64_t hash() const { return fnv1a(echo()); }
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

inline double to_double(const std::string& s, const std::string& key) {
  double v = 0;
  if (!parse_number(s, v)) throw InvalidInput("config key '" + key + "': bad number '" + s + "'");
  return v;
}

inline std::size_t to_count(const std::string& s, const std::string& key) {
  const double v = to_double(s, key);
  if (v < 0 || v != std::floor(v)) {
    throw InvalidInput("config key '" + key + "': expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

inline std::pair<double, double> to_pair(const std::string& s, const std::string& key) {
  const auto parts = split(s, ':');
  if (parts.size() != 2) throw InvalidInput("config key '" + key + "': expected a:b, got '" + s + "'");
  return {to_double(parts[0], key), to_double(parts[1], key)};
}

}  // namespace detail

/// Applies one key=value setting.
inline void set_study_key(StudyConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "phi") {
    cfg.phis.clear();
    for (const auto& v : split(value, ',')) cfg.phis.push_back(to_double(v, key));
  } else if (key == "T") {
    cfg.sizes.clear();
    for (const auto& v : split(value, ',')) cfg.sizes.push_back(to_count(v, key));
  } else if (key == "separations") {
    cfg.separations.clear();
    for (const auto& v : split(value, ',')) cfg.separations.push_back(to_pair(v, key));
  } else if (key == "transitions") {
    cfg.transitions.clear();
    for (const auto& v : split(value, ',')) cfg.transitions.push_back(to_pair(v, key));
  } else if (key == "include_null") {
    if (value != "true" && value != "false") throw InvalidInput("config key 'include_null': expected true or false");
    cfg.include_null = value == "true";
  } else if (key == "mu1") {
    cfg.mu1 = to_double(value, key);
  } else if (key == "sigma1") {
    cfg.sigma1 = to_double(value, key);
  } else if (key == "reps") {
    cfg.replications = to_count(value, key);
  } else if (key == "mc") {
    cfg.N = to_count(value, key);
  } else if (key == "alpha") {
    cfg.alpha = to_double(value, key);
  } else if (key == "bootstrap") {
    cfg.B = to_count(value, key);
  } else if (key == "chp_draws") {
    cfg.chp_draws = to_count(value, key);
  } else if (key == "grid_points") {
    cfg.grid_points = to_count(value, key);
  } else if (key == "methods") {
    cfg.methods.clear();
    for (const auto& v : split(value, ',')) cfg.methods.push_back(parse_study_method(v));
  } else if (key == "seed") {
    cfg.master_seed = static_cast<std::uint64_t>(std::stoull(value));
  } else if (key == "profile") {
    cfg.apply(Profile::named(value));
  } else {
    throw InvalidInput("unknown config key '" + key + "'");
  }
}

/// Flat key=value text, '#' comments, arrays comma-separated.
inline StudyConfig parse_study_config(std::istream& in, StudyConfig cfg = {}) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(line_no) + ": expected key=value");
    }
    try {
      set_study_key(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)));
    } catch (const std::exception& e) {
      throw InvalidInput("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

/// Runs every cell; a cell that throws yields rows with status "failed: ..."
/// and the study continues.
inline std::vector<StudyRow> run_size_power_study(const StudyConfig& cfg,
                                                  const LogisticCoeffTable& table,
                                                  unsigned workers = 1,
                                                  std::ostream* progress = nullptr) {
  const auto cells = cfg.cells();
  std::vector<StudyRow> rows;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto& c = cells[i];
    std::vector<StudyRow> cell_rows;
    try {
      cell_rows = run_cell(c, table, c.master_seed, i, workers);
    } catch (const std::exception& e) {
      for (auto m : c.methods) {
        StudyRow row;
        row.cell = i;
        row.phi = c.dgp.phi.empty() ? 0.0 : c.dgp.phi[0];
        row.delta_mu = c.dgp.regimes.delta_mu();
        row.delta_sigma = c.dgp.regimes.delta_sigma();
        row.p11 = c.dgp.transition.p11;
        row.p22 = c.dgp.transition.p22;
        row.T = c.T;
        row.method = to_string(m);
        row.replications = c.replications;
        row.status = std::string("failed: ") + e.what();
        std::replace(row.status.begin(), row.status.end(), ',', ';');
        cell_rows.push_back(std::move(row));
      }
    }
    if (progress) {
      *progress << "cell " << (i + 1) << "/" << cells.size() << " phi=" << format_double(cell_rows.front().phi)
                << " dmu=" << format_double(cell_rows.front().delta_mu)
                << " dsigma=" << format_double(cell_rows.front().delta_sigma) << " p=("
                << format_double(cell_rows.front().p11) << "," << format_double(cell_rows.front().p22)
                << ") T=" << c.T << '\n';
    }
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  }
  return rows;
}

inline std::string csv_header_comment(std::uint64_t seed, std::uint64_t config_hash) {
  return "# msmc " + std::string(kVersion) + " seed=" + std::to_string(seed) +
         " config_hash=" + hex64(config_hash);
}

inline constexpr const char* kStudyColumns =
    "cell,phi,delta_mu,delta_sigma,p11,p22,T,method,rejections,replications,rate,se,seconds,status";

inline void write_study_csv(std::ostream& os, const std::vector<StudyRow>& rows, std::uint64_t seed,
                            std::uint64_t config_hash) {
  os << csv_header_comment(seed, config_hash) << '\n' << kStudyColumns << '\n';
  for (const auto& r : rows) {
    os << r.cell << ',' << format_double(r.phi) << ',' << format_double(r.delta_mu) << ','
       << format_double(r.delta_sigma) << ',' << format_double(r.p11) << ','
       << format_double(r.p22) << ',' << r.T << ',' << r.method << ',' << r.rejections << ','
       << r.replications << ',' << format_double(r.rate) << ',' << format_double(r.se) << ','
       << format_fixed(r.seconds, 3) << ',' << r.status << '\n';
  }
}

inline std::vector<StudyRow> read_study_csv(std::istream& in) {
  std::vector<StudyRow> rows;
  std::string line;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line != kStudyColumns) throw InvalidInput("study csv: unexpected column header");
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 14) {
      throw InvalidInput("study csv line " + std::to_string(line_no) + ": expected 14 fields");
    }
    StudyRow r;
    r.cell = std::stoul(f[0]);
    r.phi = std::stod(f[1]);
    r.delta_mu = std::stod(f[2]);
    r.delta_sigma = std::stod(f[3]);
    r.p11 = std::stod(f[4]);
    r.p22 = std::stod(f[5]);
    r.T = std::stoul(f[6]);
    r.method = f[7];
    r.rejections = std::stoul(f[8]);
    r.replications = std::stoul(f[9]);
    r.rate = std::stod(f[10]);
    r.se = std::stod(f[11]);
    r.seconds = std::stod(f[12]);
    r.status = f[13];
    rows.push_back(std::move(r));
  }
  return rows;
}

// Empirical application ------------------------------------------------------

struct EmpiricalOptions {
  std::size_t r = 4;
  std::size_t N = 100;
  std::vector<McMethod> methods{McMethod::LMC_min, McMethod::LMC_prod, McMethod::MMC_min,
                                McMethod::MMC_prod};
  std::uint64_t master_seed = 20160101;
  GridOptions grid{};
  unsigned workers = 1;
};

inline std::vector<LinearityReport> run_empirical(std::span<const double> y,
                                                  const EmpiricalOptions& opt,
                                                  const LogisticCoeffTable& table) {
  return run_linearity_tests(y, opt.r, opt.N, opt.methods, table, opt.master_seed, opt.grid,
                             opt.workers);
}

inline std::vector<LinearityReport> run_empirical(const std::string& path, Transformation tr,
                                                  const EmpiricalOptions& opt,
                                                  const LogisticCoeffTable& table) {
  const auto data = ingest_series(path, tr);
  return run_empirical(data.values, opt, table);
}

/// method,p_value,phi1..phir,min_root_modulus (+ bookkeeping columns).
inline void write_linearity_csv(std::ostream& os, const std::vector<LinearityReport>& reps,
                                std::uint64_t seed, std::uint64_t config_hash) {
  os << csv_header_comment(seed, config_hash) << '\n' << "method,p_value";
  const std::size_t r = reps.empty() ? 0 : reps.front().phi_at_report.size();
  for (std::size_t k = 1; k <= r; ++k) os << ",phi" << k;
  os << ",min_root_modulus,N,grid_points,statistic\n";
  for (const auto& rep : reps) {
    os << to_string(rep.method) << ',' << format_double(rep.p_value);
    for (double v : rep.phi_at_report) os << ',' << format_double(v);
    os << ',' << format_double(rep.min_root_modulus) << ',' << rep.N << ','
       << rep.grid_points_evaluated << ',' << format_double(rep.statistic_value) << '\n';
  }
}

/// Human-readable table with the layout of the published GNP results.
inline void write_linearity_summary(std::ostream& os, const std::vector<LinearityReport>& reps) {
  os << "Test       p-value";
  const std::size_t r = reps.empty() ? 0 : reps.front().phi_at_report.size();
  for (std::size_t k = 1; k <= r; ++k) os << "    phi" << k;
  os << "    |z|\n";
  for (const auto& rep : reps) {
    std::string name = to_string(rep.method);
    name.resize(10, ' ');
    os << name << "  " << format_fixed(rep.p_value, 2);
    for (double v : rep.phi_at_report) {
      std::string s = format_fixed(v, 2);
      os << std::string(s.size() < 7 ? 7 - s.size() : 0, ' ') << s;
    }
    os << "   " << format_fixed(rep.min_root_modulus, 2) << '\n';
  }
}

// Coefficient-table regeneration ---------------------------------------------

/// Null draws of the four statistics at sample size T. Draw j uses the
/// substream (seed, T, j, attempt).
inline std::array<std::vector<double>, 4> simulate_null_statistics(std::size_t T, std::size_t draws,
                                                                   std::uint64_t seed,
                                                                   unsigned workers = 1) {
  std::array<std::vector<double>, 4> out;
  for (auto& v : out) v.resize(draws);
  parallel_for(draws, workers, [&](std::size_t j) {
    for (std::size_t a = 0;; ++a) {
      Stream rng = make_stream(seed, {T, j, a});
      const auto eta = standard_normal_vector(T, rng);
      try {
        const auto q = compute_quartet(demean(eta));
        out[0][j] = q.M;
        out[1][j] = q.V;
        out[2][j] = q.S;
        out[3][j] = q.K;
        return;
      } catch (const DegenerateSample&) {
        if (a > 1000) throw;
      }
    }
  });
  return out;
}

struct CoeffTableFit {
  LogisticCoeffTable table;
  std::vector<LogisticFit> fits;
  /// Sample quantiles at levels 0.001..0.999, one per fit.
  std::vector<std::vector<double>> quantiles;
};

inline CoeffTableFit regenerate_coeff_table(std::span<const std::size_t> sizes, std::size_t draws,
                                            std::uint64_t seed, unsigned workers = 1) {
  if (draws < 10000) throw InvalidInput("fit-table: draws must be at least 10^4");
  CoeffTableFit out;
  for (std::size_t T : sizes) {
    auto samples = simulate_null_statistics(T, draws, seed, workers);
    for (Statistic s : kStatistics) {
      auto& v = samples[static_cast<std::size_t>(s)];
      out.quantiles.push_back(quantile_grid(v));
      auto fit = fit_logistic_cdf(std::move(v), s, T);
      out.table.set(fit.coeffs);
      out.fits.push_back(fit);
    }
  }
  return out;
}

/// max over the quantile grid of |F_a(x_q) - F_b(x_q)|.
inline double sup_distance_on_grid(std::span<const double> grid, const LogisticCoeffs& a,
                                   const LogisticCoeffs& b) {
  double d = 0.0;
  for (double x : grid) d = std::max(d, std::abs(logistic_cdf(x, a) - logistic_cdf(x, b)));
  return d;
}

}  // namespace msmc
