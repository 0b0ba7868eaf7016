#include "fastgauss/cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "fastgauss/errors.hpp"
#include "fastgauss/experiments.hpp"
#include "fastgauss/horseshoe.hpp"
#include "fastgauss/io.hpp"
#include "fastgauss/structured_gaussian.hpp"

namespace fastgauss::cli {

namespace {

struct SampleOptions {
  std::string phi_csv, d_csv, alpha_csv, out;
  long draws = 1;
  std::uint64_t seed = 0;
  std::string method = "fast";
};

struct FitOptions {
  std::string x_csv, y_csv, out;
  int iters = 6000;
  int burnin = 1000;
  int thin = 1;
  std::uint64_t seed = 0;
  std::optional<double> fixed_sigma;
  bool write_draws = false;
};

struct SimulateOptions {
  long n = 100, p = 500, sparsity = 5;
  double sigma = 1.5;
  std::string cov = "ind", signal = "strong", out;
  int reps = 10, iters = 3000, burnin = 1000, threads = 1;
  std::uint64_t seed = 0;
};

struct BenchOptions {
  std::vector<long> n_grid{50}, p_grid{250, 500, 1000, 2000};
  int reps = 5;
  std::uint64_t seed = 0;
  std::string out;
};

/// Input problem detected after parsing; reported as exit code 2.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw InputError("cannot open output file " + path);
  f << contents;
  if (!f.flush()) throw InputError("failed writing " + path);
}

Eigen::VectorXd read_column(const std::string& path) {
  const Eigen::MatrixXd m = io::read_matrix_csv(path);
  if (m.cols() != 1) {
    throw io::CsvError(path, 1, "expected one value per row, found " + std::to_string(m.cols()));
  }
  return m.col(0);
}

int cmd_sample(const SampleOptions& opt) {
  const Eigen::MatrixXd phi = io::read_matrix_csv(opt.phi_csv);
  const Eigen::MatrixXd d = io::read_matrix_csv(opt.d_csv);
  const Eigen::VectorXd alpha = read_column(opt.alpha_csv);
  const Eigen::Index p = phi.cols();
  if (alpha.size() != phi.rows()) {
    throw io::CsvError(opt.alpha_csv, 0,
                       "has " + std::to_string(alpha.size()) + " rows, Phi has " +
                           std::to_string(phi.rows()));
  }

  std::optional<ScaleStructure<double>> scale;
  if (d.rows() == 1 && d.cols() == p) {
    try {
      scale = ScaleStructure<double>::diagonal(d.row(0).transpose());
    } catch (const InvalidParameter& e) {
      throw io::CsvError(opt.d_csv, 1, e.what());
    }
  } else if (d.rows() == p && d.cols() == p) {
    try {
      scale = ScaleStructure<double>::dense(d);
    } catch (const InvalidParameter& e) {
      throw io::CsvError(opt.d_csv, 0, e.what());
    }
  } else {
    throw io::CsvError(opt.d_csv, 0,
                       "must be one row of " + std::to_string(p) + " values or a " +
                           std::to_string(p) + "x" + std::to_string(p) + " matrix");
  }

  const StructuredGaussian<double> g(phi, std::move(*scale), alpha);
  RngStream rng(opt.seed, 0);
  Eigen::MatrixXd draws(opt.draws, p);
  if (opt.method == "fast") {
    const auto system = woodbury_system(g);
    for (long i = 0; i < opt.draws; ++i) draws.row(i) = fast_sample(g, system, rng).theta;
  } else {
    for (long i = 0; i < opt.draws; ++i) draws.row(i) = baseline_sample(g, rng);
  }
  std::ostringstream buf;
  io::write_matrix_csv(draws, buf);
  write_file(opt.out, buf.str());
  return kOk;
}

int cmd_fit(const FitOptions& opt, std::ostream& err) {
  const Eigen::MatrixXd x = io::read_matrix_csv(opt.x_csv);
  const Eigen::VectorXd y = read_column(opt.y_csv);
  if (y.size() != x.rows()) {
    throw io::CsvError(opt.y_csv, 0,
                       "has " + std::to_string(y.size()) + " rows, X has " +
                           std::to_string(x.rows()));
  }
  horseshoe::ChainConfig cfg;
  cfg.n_iter = opt.iters;
  cfg.burn_in = opt.burnin;
  cfg.thin = opt.thin;
  cfg.seed = opt.seed;
  cfg.fixed_sigma = opt.fixed_sigma;
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  std::optional<horseshoe::RegressionData> data;
  try {
    data.emplace(x, y);
  } catch (const Error& e) {
    throw InputError(e.what());
  }

  horseshoe::ChainResult result;
  try {
    result = horseshoe::run_chain(*data, cfg);
  } catch (const std::exception& e) {
    err << "fit: chain failed: " << e.what() << '\n';
    return kChainFailure;
  }

  std::ostringstream summary;
  summary << "index,mean,median,lower95,upper95\n";
  const auto& s = result.summary;
  for (Eigen::Index j = 0; j < s.mean.size(); ++j) {
    summary << j << ',' << io::format_real(s.mean[j]) << ',' << io::format_real(s.median[j])
            << ',' << io::format_real(s.lower[j]) << ',' << io::format_real(s.upper[j]) << '\n';
  }
  write_file(opt.out + "_summary.csv", summary.str());
  if (opt.write_draws) {
    std::ostringstream draws;
    io::write_matrix_csv(result.draws, draws);
    write_file(opt.out + "_draws.csv", draws.str());
  }
  return kOk;
}

int cmd_simulate(const SimulateOptions& opt) {
  experiments::SimDesign design;
  design.n = opt.n;
  design.p = opt.p;
  design.sigma = opt.sigma;
  design.sparsity = opt.sparsity;
  design.n_replicates = opt.reps;
  design.cov_kind = opt.cov == "ind"  ? experiments::CovKind::Independent
                    : opt.cov == "cs" ? experiments::CovKind::CompoundSymmetry
                                      : experiments::CovKind::Toeplitz;
  design.signal_set =
      opt.signal == "strong" ? experiments::SignalSet::Strong : experiments::SignalSet::Weak;
  horseshoe::ChainConfig cfg;
  cfg.n_iter = opt.iters;
  cfg.burn_in = opt.burnin;
  try {
    design.validate();
    cfg.validate();
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  const auto report = experiments::run_replicates(design, cfg, opt.seed, opt.threads);
  std::ostringstream buf;
  experiments::write_simulation_csv(report, buf);
  write_file(opt.out, buf.str());
  return kOk;
}

int cmd_bench(const BenchOptions& opt, std::ostream& out) {
  std::vector<Eigen::Index> n_grid(opt.n_grid.begin(), opt.n_grid.end());
  std::vector<Eigen::Index> p_grid(opt.p_grid.begin(), opt.p_grid.end());
  experiments::BenchResult result;
  try {
    result = experiments::run_bench(n_grid, p_grid, opt.reps, opt.seed);
  } catch (const ConfigError& e) {
    throw InputError(e.what());
  }
  std::ostringstream buf;
  experiments::write_bench_csv(result, buf);
  if (opt.out.empty()) {
    out << buf.str();
  } else {
    write_file(opt.out, buf.str());
  }
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured Gaussian sampling and horseshoe regression"};
  app.require_subcommand(1);

  SampleOptions sample_opt;
  auto* sample = app.add_subcommand("sample", "Draw from N(mu, Sigma), Sigma = (Phi'Phi + D^-1)^-1");
  sample->add_option("phi", sample_opt.phi_csv, "Phi, n x p CSV")->required()->check(CLI::ExistingFile);
  sample->add_option("d", sample_opt.d_csv, "D: one row (diagonal) or p x p SPD CSV")
      ->required()
      ->check(CLI::ExistingFile);
  sample->add_option("alpha", sample_opt.alpha_csv, "alpha, n x 1 CSV")->required()->check(CLI::ExistingFile);
  sample->add_option("--draws", sample_opt.draws, "Number of draws")->check(CLI::PositiveNumber);
  sample->add_option("--seed", sample_opt.seed, "RNG seed");
  sample->add_option("--method", sample_opt.method, "fast or baseline")
      ->check(CLI::IsMember({"fast", "baseline"}));
  sample->add_option("--out", sample_opt.out, "Output CSV")->required();

  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "Horseshoe regression by Gibbs sampling");
  fit->add_option("x", fit_opt.x_csv, "Design matrix, n x p CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("y", fit_opt.y_csv, "Response, n x 1 CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--iters", fit_opt.iters, "Gibbs iterations");
  fit->add_option("--burnin", fit_opt.burnin, "Discarded initial iterations");
  fit->add_option("--thin", fit_opt.thin, "Keep every k-th draw");
  fit->add_option("--seed", fit_opt.seed, "RNG seed");
  fit->add_option("--fixed-sigma", fit_opt.fixed_sigma, "Hold sigma fixed at this value");
  fit->add_flag("--draws", fit_opt.write_draws, "Also write <prefix>_draws.csv");
  fit->add_option("--out", fit_opt.out, "Output prefix")->required();

  SimulateOptions sim_opt;
  auto* simulate = app.add_subcommand("simulate", "Replicated simulation study");
  simulate->add_option("--n", sim_opt.n, "Observations");
  simulate->add_option("--p", sim_opt.p, "Predictors");
  simulate->add_option("--sigma", sim_opt.sigma, "Noise standard deviation");
  simulate->add_option("--sparsity", sim_opt.sparsity, "Number of signals");
  simulate->add_option("--cov", sim_opt.cov, "ind, cs or toep")->check(CLI::IsMember({"ind", "cs", "toep"}));
  simulate->add_option("--signal", sim_opt.signal, "strong or weak")
      ->check(CLI::IsMember({"strong", "weak"}));
  simulate->add_option("--reps", sim_opt.reps, "Replicates");
  simulate->add_option("--iters", sim_opt.iters, "Gibbs iterations per replicate");
  simulate->add_option("--burnin", sim_opt.burnin, "Burn-in per replicate");
  simulate->add_option("--threads", sim_opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim_opt.seed, "RNG seed");
  simulate->add_option("--out", sim_opt.out, "Output CSV")->required();

  BenchOptions bench_opt;
  auto* bench = app.add_subcommand("bench", "Time fast and baseline samplers");
  bench->add_option("--n-grid", bench_opt.n_grid, "Comma-separated n values")->delimiter(',');
  bench->add_option("--p-grid", bench_opt.p_grid, "Comma-separated p values")->delimiter(',');
  bench->add_option("--reps", bench_opt.reps, "Timed repetitions per point (>= 5)");
  bench->add_option("--seed", bench_opt.seed, "Seed for the random instances");
  bench->add_option("--out", bench_opt.out, "Output CSV (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*sample) return cmd_sample(sample_opt);
    if (*fit) return cmd_fit(fit_opt, err);
    if (*simulate) return cmd_simulate(sim_opt);
    if (*bench) return cmd_bench(bench_opt, out);
  } catch (const io::CsvError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DimensionMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}

}  // namespace fastgauss::cli
