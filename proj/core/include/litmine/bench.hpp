// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace litmine::bench {

struct BenchPoint {
  std::size_t n_articles = 0;
  std::size_t m_workers = 0;
  std::uint64_t wall_ms = 0;       // median over repeats
  double per_article_ms = 0.0;     // wall_ms / n_articles
  double speedup = 1.0;            // vs m=1 at the same n
  bool valid = false;
  std::size_t doc_count = 0;       // index docs after the job
  std::string result_fingerprint;  // sha1 over the sorted (doc_id, label) map
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

struct BenchReport {
  std::vector<BenchPoint> grid;
  LinearFit linear_fit;  // wall_ms vs n at m=1
  std::string notes;

  std::string to_json() const;
  std::string to_csv() const;
};

struct BenchConfig {
  std::vector<std::size_t> n_set = {1000, 2000, 3000, 4000, 5000};
  std::vector<std::size_t> m_set = {1, 2, 3, 4};
  std::size_t repeats = 3;
  std::uint32_t seed = 7;
  std::size_t batch_size = 1000;
  std::size_t train_examples = 600;
  // Per-article simulated object-store fetch latency in ms. The corpus sits
  // on page-cached local disk, so without it there is nothing for extra
  // workers to overlap; the delay models the remote GET each article would
  // cost in a deployed store. Negative = calibrate to 1.2x the measured
  // no-delay per-article time; 0 = off.
  double simulate_fetch_ms = -1.0;
  std::filesystem::path work_dir;  // scratch; required
  std::string worker_exe;          // litmine binary; empty = this executable
};

/// Ordinary least squares of y on x.
LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys);

/// Runs the full n x m grid: per point a fresh store/index/corpus, a master
/// in converged mode (one in-process worker over loopback) plus m-1 worker
/// subprocesses, timed from submit to completion. A failed job marks the
/// point invalid; the report is still emitted.
BenchReport run_grid(const BenchConfig& config);

}  // namespace litmine::bench
