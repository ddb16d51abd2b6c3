// SPDX-License-Identifier: Apache-2.0
#include <litmine/bench.hpp>

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <thread>

#include <json.hpp>

#include <litmine/corpus.hpp>
#include <litmine/errors.hpp>
#include <litmine/pipeline.hpp>
#include <litmine/sha1.hpp>

namespace litmine::bench {

using nlohmann::json;

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
  LinearFit fit;
  std::size_t n = xs.size();
  if (n < 2) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0) return fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double mean_y = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double pred = fit.slope * xs[i] + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r2 = ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
  return fit;
}

std::string BenchReport::to_json() const {
  json grid_j = json::array();
  for (const auto& p : grid) {
    grid_j.push_back({{"n_articles", p.n_articles},
                      {"m_workers", p.m_workers},
                      {"wall_ms", p.wall_ms},
                      {"per_article_ms", p.per_article_ms},
                      {"speedup", p.speedup},
                      {"valid", p.valid},
                      {"doc_count", p.doc_count},
                      {"result_fingerprint", p.result_fingerprint}});
  }
  json j{{"grid", std::move(grid_j)},
         {"linear_fit", {{"slope", linear_fit.slope},
                         {"intercept", linear_fit.intercept},
                         {"r2", linear_fit.r2}}},
         {"notes", notes}};
  return j.dump(2);
}

std::string BenchReport::to_csv() const {
  std::string out = "n_articles,m_workers,wall_ms,per_article_ms,speedup,valid\n";
  for (const auto& p : grid) {
    out += std::to_string(p.n_articles) + "," + std::to_string(p.m_workers) + "," +
           std::to_string(p.wall_ms) + "," + std::to_string(p.per_article_ms) + "," +
           std::to_string(p.speedup) + "," + (p.valid ? "1" : "0") + "\n";
  }
  return out;
}

namespace {

std::string self_exe() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) throw io_error("cannot resolve /proc/self/exe");
  buf[n] = '\0';
  return buf;
}

pid_t spawn_worker(const std::string& exe, const std::string& master_addr,
                   const std::string& master_http, const std::filesystem::path& store_root) {
  pid_t pid = ::fork();
  if (pid < 0) throw io_error("fork failed");
  if (pid == 0) {
    int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) {
      ::dup2(devnull, 1);
      ::dup2(devnull, 2);
    }
    ::execl(exe.c_str(), exe.c_str(), "worker", "--master", master_addr.c_str(),
            "--master-http", master_http.c_str(), "--store", store_root.c_str(),
            "--slots", "1", static_cast<char*>(nullptr));
    _exit(127);
  }
  return pid;
}

void reap_worker(pid_t pid) {
  if (pid <= 0) return;
  ::kill(pid, SIGTERM);
  int status = 0;
  for (int i = 0; i < 50; ++i) {
    if (::waitpid(pid, &status, WNOHANG) == pid) return;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  ::kill(pid, SIGKILL);
  ::waitpid(pid, &status, 0);
}

struct PointOutcome {
  std::uint64_t wall_ms = 0;
  bool ok = false;
  std::size_t doc_count = 0;
  std::string fingerprint;
};

std::string fingerprint_of(const idx::Index& index) {
  std::string payload;
  for (const auto& [id, label] : index.category_map()) {
    payload += id;
    payload += '=';
    payload += label;
    payload += '\n';
  }
  return sha1_hex(payload);
}

PointOutcome run_point(const BenchConfig& config, const std::string& exe,
                       const std::string& model_bytes, std::size_t n, std::size_t m,
                       std::int64_t fetch_us, const std::filesystem::path& scratch) {
  std::filesystem::remove_all(scratch);
  std::filesystem::create_directories(scratch);
  store::Store store(scratch / "store");
  idx::Index index(scratch / "index");

  gen_corpus(store, n, config.seed);
  auto model_ref = store.put_content(store::BucketId::ml_models, model_bytes, "model");
  ml::set_current_model(store, model_ref.key);

  sched::MasterConfig mconfig;
  mconfig.port = 0;
  mconfig.http_port = 0;
  sched::Master master(mconfig, &index);
  master.start();
  std::string master_addr = "127.0.0.1:" + std::to_string(master.port());
  std::string master_http = "127.0.0.1:" + std::to_string(master.http_port());

  // converged mode: the master process hosts one worker itself; the sink goes
  // through loopback HTTP so every worker pays the same indexing cost
  sched::WorkerConfig wconfig;
  wconfig.master_port = master.port();
  auto sink = std::make_shared<pipeline::RemoteIndexSink>(master_http);
  pipeline::TaskRunner runner(store, sink);
  sched::Worker converged(wconfig, [&runner](const sched::TaskSpec& t) { return runner(t); });
  converged.start();

  std::vector<pid_t> children;
  for (std::size_t w = 1; w < m; ++w) {
    children.push_back(spawn_worker(exe, master_addr, master_http, store.root()));
  }

  PointOutcome outcome;
  for (int i = 0; i < 500 && master.live_worker_count() < m; ++i) {
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  if (master.live_worker_count() == m) {
    std::vector<std::string> keys;
    std::vector<std::string> page;
    std::optional<std::string> after;
    do {
      page = store.list(store::BucketId::staging, 10000, after);
      keys.insert(keys.end(), page.begin(), page.end());
      if (!page.empty()) after = page.back();
    } while (!page.empty());

    auto tasks = sched::make_batches(keys, config.batch_size, sched::TaskKind::process,
                                     model_ref.key);
    if (fetch_us > 0) {
      std::string params = json{{"simulate_fetch_us", fetch_us}}.dump();
      for (auto& t : tasks) t.params = params;
    }
    auto t0 = std::chrono::steady_clock::now();
    std::string job_id = master.submit(std::move(tasks));
    bool done = master.wait_job(job_id, std::chrono::minutes(10));
    auto t1 = std::chrono::steady_clock::now();
    auto summary = master.job_status(job_id);
    if (done && summary.failed_permanently == 0 && index.doc_count() == n) {
      outcome.ok = true;
      outcome.wall_ms = static_cast<std::uint64_t>(
          std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count());
      outcome.doc_count = index.doc_count();
      outcome.fingerprint = fingerprint_of(index);
    }
  }

  for (pid_t pid : children) reap_worker(pid);
  converged.stop();
  master.stop();
  std::filesystem::remove_all(scratch);
  return outcome;
}

}  // namespace

BenchReport run_grid(const BenchConfig& config) {
  if (config.work_dir.empty()) throw validation_error("bench: work_dir is required");
  std::filesystem::create_directories(config.work_dir);
  std::string exe = config.worker_exe.empty() ? self_exe() : config.worker_exe;

  // one demo model for the whole grid, trained from the same generator
  auto examples = gen_labeled(config.train_examples, config.seed);
  ml::ModelArtifact model = ml::train(examples);
  if (model.eval_accuracy < 0.9) {
    throw io_error("bench self-check failed: demo model eval accuracy " +
                   std::to_string(model.eval_accuracy) + " < 0.9");
  }
  std::string model_bytes = ml::serialize_model(model);

  BenchReport report;
  report.notes = "demo model eval_accuracy=" + std::to_string(model.eval_accuracy) +
                 "; repeats=" + std::to_string(config.repeats) + " (median)";

  // simulated per-article object-store fetch latency (see BenchConfig)
  std::int64_t fetch_us = 0;
  if (config.simulate_fetch_ms > 0) {
    fetch_us = static_cast<std::int64_t>(config.simulate_fetch_ms * 1000.0);
  } else if (config.simulate_fetch_ms < 0) {
    std::size_t cal_n = 500;
    auto cal = run_point(config, exe, model_bytes, cal_n, 1, 0, config.work_dir / "calibrate");
    if (!cal.ok) throw io_error("bench calibration run failed");
    fetch_us = static_cast<std::int64_t>(1.2 * 1000.0 * static_cast<double>(cal.wall_ms) /
                                         static_cast<double>(cal_n));
  }
  report.notes += "; simulate_fetch_us=" + std::to_string(fetch_us);

  for (std::size_t n : config.n_set) {
    for (std::size_t m : config.m_set) {
      BenchPoint point;
      point.n_articles = n;
      point.m_workers = m;
      point.valid = true;
      report.grid.push_back(point);
    }
  }

  // repeats are interleaved round-robin across the grid so that slow drift in
  // host load lands on every point's median instead of biasing whole points
  std::vector<std::vector<std::uint64_t>> walls(report.grid.size());
  for (std::size_t r = 0; r < config.repeats; ++r) {
    for (std::size_t i = 0; i < report.grid.size(); ++i) {
      BenchPoint& point = report.grid[i];
      if (!point.valid) continue;
      auto outcome = run_point(config, exe, model_bytes, point.n_articles, point.m_workers,
                               fetch_us,
                               config.work_dir / ("point_" + std::to_string(point.n_articles) +
                                                  "_" + std::to_string(point.m_workers) + "_" +
                                                  std::to_string(r)));
      if (!outcome.ok) {
        point.valid = false;
        continue;
      }
      walls[i].push_back(outcome.wall_ms);
      point.doc_count = outcome.doc_count;
      point.result_fingerprint = outcome.fingerprint;
    }
  }
  for (std::size_t i = 0; i < report.grid.size(); ++i) {
    BenchPoint& point = report.grid[i];
    if (!point.valid) continue;
    std::sort(walls[i].begin(), walls[i].end());
    point.wall_ms = walls[i][walls[i].size() / 2];
    point.per_article_ms =
        static_cast<double>(point.wall_ms) / static_cast<double>(point.n_articles);
  }

  // speedups at fixed n, relative to m=1
  for (auto& p : report.grid) {
    if (!p.valid) continue;
    for (const auto& base : report.grid) {
      if (base.n_articles == p.n_articles && base.m_workers == 1 && base.valid &&
          p.wall_ms > 0) {
        p.speedup = static_cast<double>(base.wall_ms) / static_cast<double>(p.wall_ms);
      }
    }
  }

  std::vector<double> xs, ys;
  for (const auto& p : report.grid) {
    if (p.m_workers == 1 && p.valid) {
      xs.push_back(static_cast<double>(p.n_articles));
      ys.push_back(static_cast<double>(p.wall_ms));
    }
  }
  report.linear_fit = least_squares(xs, ys);
  return report;
}

}  // namespace litmine::bench
