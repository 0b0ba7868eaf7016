#include "fastgauss/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <thread>

#include "fastgauss/errors.hpp"
#include "fastgauss/io.hpp"
#include "fastgauss/structured_gaussian.hpp"

namespace fastgauss::experiments {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kCompoundRho = 0.5;
constexpr double kToeplitzRho = 0.9;

Eigen::Index uniform_index(RngStream& rng, Eigen::Index range) {
  const auto k = static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(range));
  return std::min(k, range - 1);
}

double median_of(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

std::string sanitize(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

void SimDesign::validate() const {
  if (n < 2 || p < 1) throw ConfigError("SimDesign: need n >= 2 and p >= 1");
  if (!(sigma > 0.0)) throw ConfigError("SimDesign: sigma must be positive");
  if (sparsity < 0 || sparsity > p) throw ConfigError("SimDesign: sparsity must lie in [0, p]");
  if (n_replicates < 1) throw ConfigError("SimDesign: n_replicates must be at least 1");
}

std::vector<double> signal_magnitudes(SignalSet set) {
  if (set == SignalSet::Strong) return {1.5, 1.75, 2.0, 2.25, 2.5};
  return {0.75, 1.0, 1.25, 1.5, 1.75};
}

SimulatedData gen_design(const SimDesign& design, RngStream& rng) {
  design.validate();
  const Eigen::Index n = design.n;
  const Eigen::Index p = design.p;
  SimulatedData out;
  out.x.resize(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    switch (design.cov_kind) {
      case CovKind::Independent:
        for (Eigen::Index j = 0; j < p; ++j) out.x(i, j) = rng.normal();
        break;
      case CovKind::CompoundSymmetry: {
        const double shared = std::sqrt(kCompoundRho) * rng.normal();
        const double own = std::sqrt(1.0 - kCompoundRho);
        for (Eigen::Index j = 0; j < p; ++j) out.x(i, j) = own * rng.normal() + shared;
        break;
      }
      case CovKind::Toeplitz: {
        const double innovation = std::sqrt(1.0 - kToeplitzRho * kToeplitzRho);
        out.x(i, 0) = rng.normal();
        for (Eigen::Index j = 1; j < p; ++j) {
          out.x(i, j) = kToeplitzRho * out.x(i, j - 1) + innovation * rng.normal();
        }
        break;
      }
    }
  }

  // Partial Fisher-Yates for positions without replacement.
  std::vector<Eigen::Index> order(static_cast<std::size_t>(p));
  for (Eigen::Index j = 0; j < p; ++j) order[j] = j;
  const auto magnitudes = signal_magnitudes(design.signal_set);
  out.beta0 = Eigen::VectorXd::Zero(p);
  for (Eigen::Index k = 0; k < design.sparsity; ++k) {
    const Eigen::Index pick = k + uniform_index(rng, p - k);
    std::swap(order[k], order[pick]);
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    out.beta0[order[k]] = sign * magnitudes[static_cast<std::size_t>(k) % magnitudes.size()];
    out.signal_positions.push_back(order[k]);
  }
  std::sort(out.signal_positions.begin(), out.signal_positions.end());

  out.y = out.x * out.beta0 + design.sigma * draw_std_normal(rng, n);
  return out;
}

double ReplicateMetrics::signal_coverage() const {
  return signal_count > 0 ? static_cast<double>(signal_covered) / signal_count : kNaN;
}

double ReplicateMetrics::noise_coverage() const {
  return noise_count > 0 ? static_cast<double>(noise_covered) / noise_count : kNaN;
}

PointErrors point_errors(const Eigen::VectorXd& estimate, const Eigen::VectorXd& beta0,
                         const Eigen::MatrixXd& x) {
  if (estimate.size() != beta0.size() || x.cols() != beta0.size()) {
    throw DimensionMismatch("point_errors: estimate, beta0 and X disagree in p");
  }
  const Eigen::VectorXd diff = estimate - beta0;
  return {diff.lpNorm<1>(), diff.norm(), (x * diff).norm()};
}

ReplicateMetrics compute_metrics(const horseshoe::PosteriorSummary& summary,
                                 const Eigen::VectorXd& beta0, const Eigen::MatrixXd& x) {
  const Eigen::Index p = beta0.size();
  if (summary.mean.size() != p || summary.lower.size() != p || summary.upper.size() != p ||
      summary.median.size() != p) {
    throw DimensionMismatch("compute_metrics: summary length differs from beta0");
  }
  ReplicateMetrics m;
  m.mean = point_errors(summary.mean, beta0, x);
  m.median = point_errors(summary.median, beta0, x);
  double signal_length = 0.0;
  double noise_length = 0.0;
  for (Eigen::Index j = 0; j < p; ++j) {
    const bool covered = summary.lower[j] <= beta0[j] && beta0[j] <= summary.upper[j];
    const double length = summary.upper[j] - summary.lower[j];
    if (beta0[j] != 0.0) {
      ++m.signal_count;
      m.signal_covered += covered ? 1 : 0;
      signal_length += length;
    } else {
      ++m.noise_count;
      m.noise_covered += covered ? 1 : 0;
      noise_length += length;
    }
  }
  m.signal_length_mean = m.signal_count > 0 ? signal_length / m.signal_count : kNaN;
  m.noise_length_mean = m.noise_count > 0 ? noise_length / m.noise_count : kNaN;
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names = {
      "l1_mean",         "l2_mean",         "pred_mean",
      "l1_median",       "l2_median",       "pred_median",
      "signal_coverage", "noise_coverage",  "signal_length",
      "noise_length"};
  return names;
}

std::vector<double> metric_values(const ReplicateMetrics& m) {
  return {m.mean.l1,          m.mean.l2,           m.mean.pred,         m.median.l1,
          m.median.l2,        m.median.pred,       m.signal_coverage(), m.noise_coverage(),
          m.signal_length_mean, m.noise_length_mean};
}

SimulationReport run_replicates(const SimDesign& design, const horseshoe::ChainConfig& cfg,
                                std::uint64_t seed, int threads) {
  design.validate();
  cfg.validate();
  SimulationReport report;
  report.replicates.resize(static_cast<std::size_t>(design.n_replicates));

  auto run_one = [&](int r) {
    ReplicateRecord& rec = report.replicates[static_cast<std::size_t>(r)];
    rec.index = r;
    try {
      RngStream data_rng(seed, 2 * static_cast<std::uint64_t>(r));
      const SimulatedData sim = gen_design(design, data_rng);
      rec.signal_positions = sim.signal_positions;
      horseshoe::ChainConfig chain_cfg = cfg;
      chain_cfg.seed = seed;
      chain_cfg.stream_id = 2 * static_cast<std::uint64_t>(r) + 1;
      const auto chain = horseshoe::run_chain(horseshoe::RegressionData(sim.x, sim.y), chain_cfg);
      rec.metrics = compute_metrics(chain.summary, sim.beta0, sim.x);
      rec.ok = true;
    } catch (const std::exception& e) {
      rec.ok = false;
      rec.error = e.what();
    }
  };

  const int workers = std::clamp(threads, 1, design.n_replicates);
  if (workers == 1) {
    for (int r = 0; r < design.n_replicates; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) {
      pool.emplace_back([&] {
        for (int r = next++; r < design.n_replicates; r = next++) run_one(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  const auto& names = metric_names();
  report.aggregate.names = names;
  report.aggregate.mean.assign(names.size(), 0.0);
  report.aggregate.se.assign(names.size(), kNaN);
  std::vector<std::vector<double>> columns(names.size());
  for (const auto& rec : report.replicates) {
    if (!rec.ok) continue;
    const auto values = metric_values(rec.metrics);
    for (std::size_t k = 0; k < values.size(); ++k) columns[k].push_back(values[k]);
    report.pooled_signal_covered += rec.metrics.signal_covered;
    report.pooled_signal_count += rec.metrics.signal_count;
    report.pooled_noise_covered += rec.metrics.noise_covered;
    report.pooled_noise_count += rec.metrics.noise_count;
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto& col = columns[k];
    if (col.empty()) {
      report.aggregate.mean[k] = kNaN;
      continue;
    }
    double sum = 0.0;
    for (double v : col) sum += v;
    const double mean = sum / static_cast<double>(col.size());
    report.aggregate.mean[k] = mean;
    if (col.size() > 1) {
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      const double var = ss / static_cast<double>(col.size() - 1);
      report.aggregate.se[k] = std::sqrt(var / static_cast<double>(col.size()));
    }
  }
  return report;
}

void write_simulation_csv(const SimulationReport& report, std::ostream& out) {
  out << "replicate,status";
  for (const auto& name : metric_names()) out << ',' << name;
  out << ",signal_positions\n";

  for (const auto& rec : report.replicates) {
    std::string line = std::to_string(rec.index) + ',';
    line += rec.ok ? "ok" : "failed: " + sanitize(rec.error);
    const auto values = rec.ok ? metric_values(rec.metrics)
                               : std::vector<double>(metric_names().size(), kNaN);
    for (double v : values) line += ',' + io::format_real(v);
    line += ',';
    for (std::size_t k = 0; k < rec.signal_positions.size(); ++k) {
      if (k > 0) line += ';';
      line += std::to_string(rec.signal_positions[k]);
    }
    out << line << '\n';
  }

  int ok = 0;
  for (const auto& rec : report.replicates) ok += rec.ok ? 1 : 0;
  const std::string status = "n_ok=" + std::to_string(ok);
  for (const auto* row : {&report.aggregate.mean, &report.aggregate.se}) {
    std::string line = row == &report.aggregate.mean ? "mean," : "se,";
    line += status;
    for (double v : *row) line += ',' + io::format_real(v);
    out << line << ",\n";
  }
}

std::string to_string(BenchMethod method) {
  return method == BenchMethod::Fast ? "fast" : "baseline";
}

double BenchResult::seconds(BenchMethod method, Eigen::Index n, Eigen::Index p) const {
  for (const auto& row : rows) {
    if (row.method == method && row.n == n && row.p == p) return row.median_seconds;
  }
  throw ConfigError("BenchResult: no timing for " + to_string(method) + " at n=" +
                    std::to_string(n) + ", p=" + std::to_string(p));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw DimensionMismatch("loglog_slope: need at least two paired points");
  }
  const auto k = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx <= 0.0) throw DimensionMismatch("loglog_slope: x values must not all be equal");
  return sxy / sxx;
}

BenchResult run_bench(const std::vector<Eigen::Index>& n_grid,
                      const std::vector<Eigen::Index>& p_grid, int repetitions,
                      std::uint64_t seed) {
  if (n_grid.empty() || p_grid.empty()) throw ConfigError("run_bench: empty grid");
  if (repetitions < 5) throw ConfigError("run_bench: repetitions must be at least 5");
  for (auto v : n_grid) {
    if (v < 1) throw ConfigError("run_bench: n must be positive");
  }
  for (auto v : p_grid) {
    if (v < 1) throw ConfigError("run_bench: p must be positive");
  }

  using Clock = std::chrono::steady_clock;
  BenchResult result;
  RngStream data_rng(seed, 0);
  RngStream draw_rng(seed, 1);
  for (const Eigen::Index n : n_grid) {
    for (const Eigen::Index p : p_grid) {
      Eigen::MatrixXd phi(n, p);
      for (Eigen::Index j = 0; j < p; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) phi(i, j) = data_rng.normal();
      }
      Eigen::VectorXd d(p);
      for (Eigen::Index j = 0; j < p; ++j) d[j] = 0.5 + 1.5 * data_rng.uniform();
      const StructuredGaussian<double> g(std::move(phi), ScaleStructure<double>::diagonal(d),
                                         draw_std_normal(data_rng, n));

      for (const BenchMethod method : {BenchMethod::Fast, BenchMethod::Baseline}) {
        auto once = [&] {
          if (method == BenchMethod::Fast) {
            return fast_sample(g, draw_rng).theta[0];
          }
          return baseline_sample(g, draw_rng)[0];
        };
        volatile double sink = once();  // warm-up
        std::vector<double> times;
        for (int r = 0; r < repetitions; ++r) {
          const auto start = Clock::now();
          sink = once();
          const auto stop = Clock::now();
          times.push_back(std::chrono::duration<double>(stop - start).count());
        }
        (void)sink;
        result.rows.push_back({method, n, p, std::max(median_of(times), 1e-12)});
      }
    }
  }

  for (const BenchMethod method : {BenchMethod::Fast, BenchMethod::Baseline}) {
    for (const Eigen::Index n : n_grid) {
      std::vector<double> ps, ts;
      for (const auto& row : result.rows) {
        if (row.method == method && row.n == n) {
          ps.push_back(static_cast<double>(row.p));
          ts.push_back(row.median_seconds);
        }
      }
      std::vector<double> distinct = ps;
      std::sort(distinct.begin(), distinct.end());
      if (std::unique(distinct.begin(), distinct.end()) - distinct.begin() >= 2) {
        result.slopes.push_back({method, n, loglog_slope(ps, ts)});
      }
    }
  }
  return result;
}

void write_bench_csv(const BenchResult& result, std::ostream& out) {
  out << "method,n,p,median_seconds\n";
  for (const auto& row : result.rows) {
    out << to_string(row.method) << ',' << row.n << ',' << row.p << ','
        << io::format_real(row.median_seconds) << '\n';
  }
  // Footer: fitted log-log slope in p at each n, written as method "slope_<method>" with p empty.
  for (const auto& s : result.slopes) {
    out << "slope_" << to_string(s.method) << ',' << s.n << ",," << io::format_real(s.slope)
        << '\n';
  }
}

}  // namespace fastgauss::experiments
