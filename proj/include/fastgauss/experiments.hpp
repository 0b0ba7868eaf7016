#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fastgauss/horseshoe.hpp"
#include "fastgauss/rng.hpp"

namespace fastgauss::experiments {

enum class CovKind { Independent, CompoundSymmetry, Toeplitz };
enum class SignalSet { Strong, Weak };

struct SimDesign {
  Eigen::Index n = 100;
  Eigen::Index p = 500;
  double sigma = 1.5;
  CovKind cov_kind = CovKind::Independent;
  SignalSet signal_set = SignalSet::Strong;
  Eigen::Index sparsity = 5;
  int n_replicates = 10;

  void validate() const;
};

/// Nonzero magnitudes: Strong {1.5, ..., 2.5}, Weak {0.75, ..., 1.75}.
std::vector<double> signal_magnitudes(SignalSet set);

struct SimulatedData {
  Eigen::MatrixXd x;
  Eigen::VectorXd beta0;
  Eigen::VectorXd y;
  std::vector<Eigen::Index> signal_positions;  // ascending
};

/// Rows of X i.i.d. N_p(0, Σ), β₀ with `sparsity` signed signals at uniformly
/// random positions, y = Xβ₀ + σz. Compound-symmetric rows are built from one
/// shared normal, Toeplitz rows from an AR(1) recursion; both are O(np).
SimulatedData gen_design(const SimDesign& design, RngStream& rng);

struct PointErrors {
  double l1 = 0.0;
  double l2 = 0.0;
  double pred = 0.0;
};

struct ReplicateMetrics {
  PointErrors mean;    // posterior mean as the estimate
  PointErrors median;  // pointwise posterior median as the estimate
  int signal_covered = 0;
  int signal_count = 0;
  int noise_covered = 0;
  int noise_count = 0;
  double signal_length_mean = 0.0;
  double noise_length_mean = 0.0;

  double signal_coverage() const;
  double noise_coverage() const;
};

PointErrors point_errors(const Eigen::VectorXd& estimate, const Eigen::VectorXd& beta0,
                         const Eigen::MatrixXd& x);

/// Signal coordinates are the nonzero entries of β₀.
ReplicateMetrics compute_metrics(const horseshoe::PosteriorSummary& summary,
                                 const Eigen::VectorXd& beta0, const Eigen::MatrixXd& x);

struct ReplicateRecord {
  int index = 0;
  bool ok = false;
  std::string error;
  ReplicateMetrics metrics;
  std::vector<Eigen::Index> signal_positions;
};

struct MetricAggregate {
  std::vector<std::string> names;
  std::vector<double> mean;
  std::vector<double> se;
};

struct SimulationReport {
  std::vector<ReplicateRecord> replicates;
  MetricAggregate aggregate;  // over successful replicates
  int pooled_signal_covered = 0;
  int pooled_signal_count = 0;
  int pooled_noise_covered = 0;
  int pooled_noise_count = 0;
};

/// Replicate r draws its data from stream 2r and runs its chain on stream
/// 2r+1 of `seed`, so results do not depend on `threads`. A replicate whose
/// chain fails is recorded and skipped in the aggregate.
SimulationReport run_replicates(const SimDesign& design, const horseshoe::ChainConfig& cfg,
                                std::uint64_t seed, int threads = 1);

/// Metric columns in output order.
const std::vector<std::string>& metric_names();
std::vector<double> metric_values(const ReplicateMetrics& m);

void write_simulation_csv(const SimulationReport& report, std::ostream& out);

enum class BenchMethod { Fast, Baseline };
std::string to_string(BenchMethod method);

struct BenchRow {
  BenchMethod method;
  Eigen::Index n;
  Eigen::Index p;
  double median_seconds;
};

struct BenchSlope {
  BenchMethod method;
  Eigen::Index n;
  double slope;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<BenchSlope> slopes;  // one per (method, n) with at least two p values

  /// Median time lookup; throws if the point was not measured.
  double seconds(BenchMethod method, Eigen::Index n, Eigen::Index p) const;
};

/// Least-squares slope of log(y) on log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Times one fast and one baseline draw per repetition on a random diagonal-D
/// instance for every (n, p). Instance generation and one warm-up call per
/// method are excluded. At least 5 repetitions; runs on the calling thread.
BenchResult run_bench(const std::vector<Eigen::Index>& n_grid,
                      const std::vector<Eigen::Index>& p_grid, int repetitions,
                      std::uint64_t seed = 0);

void write_bench_csv(const BenchResult& result, std::ostream& out);

}  // namespace fastgauss::experiments
