// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Exit code is the number of failed criteria.

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <litmine/bench.hpp>
#include <litmine/classifier.hpp>
#include <litmine/corpus.hpp>
#include <litmine/csv.hpp>
#include <litmine/index.hpp>
#include <litmine/ingest.hpp>
#include <litmine/master.hpp>
#include <litmine/pipeline.hpp>
#include <litmine/sha1.hpp>
#include <litmine/store.hpp>
#include <litmine/worker.hpp>

using namespace litmine;
namespace fs = std::filesystem;
using namespace std::chrono_literals;

namespace {

fs::path g_scratch;

fs::path scratch(const std::string& name) {
  fs::path p = g_scratch / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct Criterion {
  int number;
  std::string description;
  std::function<std::string()> run;  // empty string = pass, else failure detail
};

// ---------------------------------------------------------------- helpers

ml::ModelArtifact& demo_model() {
  static ml::ModelArtifact model = ml::train(bench::gen_labeled(600, 17));
  return model;
}

std::map<std::string, std::string> category_map_of(const idx::Index& index) {
  std::map<std::string, std::string> out;
  for (const auto& [id, label] : index.category_map()) out[id] = label;
  return out;
}

pid_t spawn_worker_proc(const std::string& exe, std::uint16_t tcp_port,
                        std::uint16_t http_port, const fs::path& store_root) {
  std::string master_addr = "127.0.0.1:" + std::to_string(tcp_port);
  std::string master_http = "127.0.0.1:" + std::to_string(http_port);
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

void reap(pid_t pid, int sig = SIGTERM) {
  if (pid <= 0) return;
  ::kill(pid, sig);
  int status = 0;
  for (int i = 0; i < 100; ++i) {
    if (::waitpid(pid, &status, WNOHANG) == pid) return;
    std::this_thread::sleep_for(20ms);
  }
  ::kill(pid, SIGKILL);
  ::waitpid(pid, &status, 0);
}

// Stages n synthetic docs, installs the demo model, runs one distributed
// processing job with `workers` subprocess workers; optionally SIGKILLs one
// worker shortly after submission. Returns the final (doc_id -> label) map.
struct ClusterRun {
  std::map<std::string, std::string> labels;
  std::size_t completed_count = 0;
  std::size_t staging_left = 0;
  bool done = false;
};

ClusterRun run_cluster(const fs::path& root, std::size_t n_docs, int workers,
                       bool kill_one) {
  store::Store store(root / "store");
  idx::Index index(root / "index");
  bench::gen_corpus(store, n_docs, 99);
  std::string model_key = ml::install_model(store, demo_model());

  sched::MasterConfig mc;
  mc.port = 0;
  mc.http_port = 0;
  mc.heartbeat_period = 2000ms;  // workers beat every 2 s; death after 3 misses
  mc.missed_beats_to_death = 3;
  sched::Master master(mc, &index);
  master.start();

  std::vector<pid_t> pids;
  for (int w = 0; w < workers; ++w) {
    pids.push_back(spawn_worker_proc(LITMINE_BIN_PATH, master.port(),
                                     master.http_port(), store.root()));
  }
  ClusterRun out;
  for (int i = 0; i < 500 && master.live_worker_count() < static_cast<std::size_t>(workers); ++i) {
    std::this_thread::sleep_for(20ms);
  }
  if (master.live_worker_count() == static_cast<std::size_t>(workers)) {
    std::vector<std::string> keys;
    std::vector<std::string> page;
    std::optional<std::string> after;
    do {
      page = store.list(store::BucketId::staging, 10000, after);
      keys.insert(keys.end(), page.begin(), page.end());
      if (!page.empty()) after = page.back();
    } while (!page.empty());

    auto job_id = master.submit(
        sched::make_batches(keys, 100, sched::TaskKind::process, model_key));
    if (kill_one) {
      std::this_thread::sleep_for(300ms);
      ::kill(pids[0], SIGKILL);  // mid-job fault injection
    }
    out.done = master.wait_job(job_id, 4min);
  }
  for (pid_t pid : pids) reap(pid);
  master.stop();

  out.labels = category_map_of(index);
  // rescan: the completed objects were written by the worker subprocesses
  store::Store fresh(root / "store");
  out.completed_count = fresh.count(store::BucketId::completed);
  out.staging_left = fresh.count(store::BucketId::staging);
  return out;
}

// ---------------------------------------------------------------- criteria

std::string c1_batching_law() {
  for (std::size_t n : {1ul, 999ul, 1000ul, 1001ul, 50000ul}) {
    std::vector<std::string> keys;
    keys.reserve(n);
    for (std::size_t i = 0; i < n; ++i) keys.push_back("k" + std::to_string(i));
    auto tasks = sched::make_batches(keys, 1000);
    std::size_t want_tasks = (n + 999) / 1000;
    if (tasks.size() != want_tasks) {
      return "N=" + std::to_string(n) + ": got " + std::to_string(tasks.size()) +
             " tasks, want " + std::to_string(want_tasks);
    }
    std::vector<std::string> flat;
    for (const auto& t : tasks) flat.insert(flat.end(), t.keys.begin(), t.keys.end());
    if (flat != keys) return "N=" + std::to_string(n) + ": keys not covered exactly once in order";
  }
  return "";
}

std::string c2_incremental_idempotence() {
  fs::path root = scratch("c2");
  fs::path articles = root / "articles";
  fs::create_directories(articles);

  std::ostringstream csv;
  csv << "record_id,sha,title,abstract,publish_time,authors,source\n";
  for (std::size_t i = 0; i < 5000; ++i) {
    auto doc = bench::make_synthetic_doc(31, i);
    std::string bytes = serialize_article(doc, "p" + std::to_string(i));
    std::string rid = "r" + std::to_string(i);
    std::ofstream(articles / (rid + ".json")) << bytes;
    csv << rid << "," << sha1_hex(bytes) << "," << csv::escape_field(doc.title)
        << ",abs,2020-01-01,\"Doe, J\",synthetic\n";
  }

  store::Store store(root / "store");
  auto first = ingest::run_ingest(store, csv.str(), articles);
  if (first.new_count != 5000) {
    return "first run ingested " + std::to_string(first.new_count) + " docs, want 5000";
  }

  auto state_digest = [&] {
    std::string acc;
    std::optional<std::string> after;
    std::vector<std::string> page;
    do {
      page = store.list(store::BucketId::staging, 10000, after);
      for (const auto& k : page) {
        acc += k;
        acc += sha1_hex(store.get(store::BucketId::staging, k));
      }
      if (!page.empty()) after = page.back();
    } while (!page.empty());
    return sha1_hex(acc);
  };

  std::string before = state_digest();
  auto second = ingest::run_ingest(store, csv.str(), articles);
  if (second.new_count != 0) {
    return "second run reports new=" + std::to_string(second.new_count) + ", want 0";
  }
  if (state_digest() != before) return "bucket state changed across the second run";
  return "";
}

std::string c3_o1_exists() {
  // Probe the same number of distinct keys at both cardinalities so the
  // harness-side working set is identical; what varies is only the size of
  // the store the lookups run against.
  auto measure = [](std::size_t n_keys) {
    fs::path root = scratch("c3_" + std::to_string(n_keys));
    store::Store store(root);
    std::vector<std::string> keys;
    keys.reserve(n_keys);
    for (std::size_t i = 0; i < n_keys; ++i) {
      keys.push_back(store.put_content(store::BucketId::completed,
                                       "doc" + std::to_string(i), "json").key);
    }
    std::mt19937_64 rng(5);
    std::vector<std::string> probes;
    for (int i = 0; i < 1000; ++i) probes.push_back(keys[rng() % keys.size()]);
    volatile bool sink = false;
    // warmup
    for (const auto& k : probes) sink = store.exists(store::BucketId::completed, k);
    constexpr int kRounds = 200;
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < kRounds; ++r) {
      for (const auto& k : probes) sink = store.exists(store::BucketId::completed, k);
    }
    auto t1 = std::chrono::steady_clock::now();
    (void)sink;
    return std::chrono::duration<double, std::nano>(t1 - t0).count() /
           (kRounds * probes.size());
  };
  double small = measure(1000);
  double large = measure(100000);
  double ratio = large / small;
  std::fprintf(stderr, "  [c3] mean exists(): 1k keys %.0f ns, 100k keys %.0f ns, ratio %.2f\n",
               small, large, ratio);
  if (ratio > 2.0) {
    return "latency ratio " + std::to_string(ratio) + " exceeds 2.0";
  }
  return "";
}

std::string c4_end_to_end() {
  fs::path root = scratch("c4");
  store::Store store(root / "store");
  idx::Index index(root / "index");
  bench::gen_corpus(store, 2500, 23);
  ml::install_model(store, demo_model());

  sched::MasterConfig mc;
  mc.port = 0;
  mc.http_port = 0;
  sched::Master master(mc, &index);
  master.start();
  std::string http_addr = "127.0.0.1:" + std::to_string(master.http_port());

  auto sink = std::make_shared<pipeline::RemoteIndexSink>(http_addr);
  pipeline::TaskRunner runner(store, sink);
  sched::WorkerConfig wc;
  wc.master_port = master.port();
  sched::Worker worker(wc, [&](const sched::TaskSpec& t) { return runner(t); });
  worker.start();

  pipeline::PipelineConfig pc;
  pc.store_root = root / "store";
  pc.master_http = http_addr;
  pc.batch_size = 1000;
  auto summary = pipeline::run_processing_job(pc, 4min);
  worker.stop();
  master.stop();

  if (!summary.done || summary.failed_permanently != 0) return "job did not complete cleanly";
  if (store.count(store::BucketId::staging) != 0) return "staging not drained";
  if (store.count(store::BucketId::completed) != 2500) {
    return "completed=" + std::to_string(store.count(store::BucketId::completed)) + ", want 2500";
  }
  if (index.doc_count() != 2500) {
    return "index doc_count=" + std::to_string(index.doc_count()) + ", want 2500";
  }
  std::set<std::string> labels(demo_model().labels.begin(), demo_model().labels.end());
  for (const auto& [id, label] : index.category_map()) {
    if (!labels.contains(label)) return "doc " + id + " has label outside the model's label set";
  }
  return "";
}

std::string c5_failure_equivalence() {
  auto clean = run_cluster(scratch("c5_clean"), 1200, 3, /*kill_one=*/false);
  if (!clean.done) return "failure-free run did not finish";
  auto faulty = run_cluster(scratch("c5_fault"), 1200, 3, /*kill_one=*/true);
  if (!faulty.done) return "faulted run did not finish";
  if (clean.completed_count != 1200 || faulty.completed_count != 1200) {
    return "completed sets differ in size: " + std::to_string(clean.completed_count) +
           " vs " + std::to_string(faulty.completed_count);
  }
  if (faulty.staging_left != 0) return "faulted run left staging non-empty";
  if (clean.labels != faulty.labels) return "(doc_id -> label) maps differ";
  return "";
}

// Criterion 6 sweeps n at m=1 with a fixed 8 ms simulated fetch: the constant
// delay dominates host-load noise in per-article wall time, so the flatness
// check measures the pipeline, not the shared-CPU weather.
bench::BenchReport& linearity_report() {
  static bench::BenchReport report = [] {
    bench::BenchConfig config;
    config.n_set = {1000, 2000, 3000, 4000, 5000};
    config.m_set = {1};
    config.repeats = 3;
    config.batch_size = 100;
    config.simulate_fetch_ms = 8.0;
    config.work_dir = scratch("bench_lin");
    config.worker_exe = LITMINE_BIN_PATH;
    return bench::run_grid(config);
  }();
  return report;
}

// Criterion 7 sweeps m at n=5000 with the calibrated fetch delay, so that
// worker overlap is measurable while compute still bounds the speedup.
bench::BenchReport& speedup_report() {
  static bench::BenchReport report = [] {
    bench::BenchConfig config;
    config.n_set = {5000};
    config.m_set = {1, 2, 4};
    config.repeats = 3;
    config.batch_size = 100;
    config.work_dir = scratch("bench_spd");
    config.worker_exe = LITMINE_BIN_PATH;
    return bench::run_grid(config);
  }();
  return report;
}

std::string c6_linearity() {
  const auto& report = linearity_report();
  std::vector<double> per_article;
  for (const auto& p : report.grid) {
    if (p.m_workers != 1) continue;
    if (!p.valid) return "invalid point at n=" + std::to_string(p.n_articles);
    per_article.push_back(p.per_article_ms);
  }
  if (per_article.size() != 5) return "expected 5 single-worker points";
  if (report.linear_fit.r2 < 0.98) {
    return "r2=" + std::to_string(report.linear_fit.r2) + " < 0.98";
  }
  double lo = *std::min_element(per_article.begin(), per_article.end());
  double hi = *std::max_element(per_article.begin(), per_article.end());
  std::fprintf(stderr, "  [c6] r2=%.4f per-article ms range [%.3f, %.3f] ratio %.3f\n",
               report.linear_fit.r2, lo, hi, hi / lo);
  if (hi / lo > 1.10) {
    return "per-article time max/min " + std::to_string(hi / lo) + " > 1.10";
  }
  return "";
}

std::string c7_speedup_shape() {
  const auto& report = speedup_report();
  double s2 = 0, s4 = 0;
  std::string fp1, fp2, fp4;
  for (const auto& p : report.grid) {
    if (p.n_articles != 5000) continue;
    if (!p.valid) return "invalid point at m=" + std::to_string(p.m_workers);
    if (p.m_workers == 1) fp1 = p.result_fingerprint;
    if (p.m_workers == 2) { s2 = p.speedup; fp2 = p.result_fingerprint; }
    if (p.m_workers == 4) { s4 = p.speedup; fp4 = p.result_fingerprint; }
  }
  std::fprintf(stderr, "  [c7] speedup(m=2)=%.3f speedup(m=4)=%.3f\n", s2, s4);
  if (fp1.empty() || fp1 != fp2 || fp1 != fp4) {
    return "result fingerprints differ across worker counts";
  }
  if (s2 < 1.3 || s2 >= 2.0) return "speedup(m=2)=" + std::to_string(s2) + " outside [1.3, 2.0)";
  if (s4 < s2 - 0.1) {
    return "speedup(m=4)=" + std::to_string(s4) + " < speedup(m=2)-0.1";
  }
  return "";
}

std::string c8_classifier() {
  // (a) gradient vs central finite differences, 5 docs / 3 classes
  std::vector<feat::FeatureVector> xs;
  std::vector<std::size_t> ys = {0, 1, 2, 0, 1};
  for (int i = 0; i < 5; ++i) {
    xs.push_back(feat::featurize_text("doc number " + std::to_string(i) +
                                      " talks about topic " + std::to_string(i % 3)));
  }
  std::vector<std::vector<double>> w(3, std::vector<double>(feat::kFeatureDims, 0.0));
  std::vector<double> b = {0.1, -0.2, 0.05};
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  std::set<std::uint32_t> active;
  for (const auto& x : xs) active.insert(x.indices.begin(), x.indices.end());
  for (auto& row : w) {
    for (std::uint32_t idx : active) row[idx] = unif(rng);
  }
  const double l2 = 1e-3;
  std::vector<std::vector<double>> gw;
  std::vector<double> gb;
  ml::gradient(xs, ys, w, b, l2, gw, gb);
  const double h = 1e-6;
  double max_rel = 0.0;
  auto rel_err = [](double fd, double an) {
    double denom = std::max({std::abs(fd), std::abs(an), 1e-8});
    return std::abs(fd - an) / denom;
  };
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::uint32_t idx : active) {
      double saved = w[c][idx];
      w[c][idx] = saved + h;
      double up = ml::objective(xs, ys, w, b, l2);
      w[c][idx] = saved - h;
      double down = ml::objective(xs, ys, w, b, l2);
      w[c][idx] = saved;
      max_rel = std::max(max_rel, rel_err((up - down) / (2 * h), gw[c][idx]));
    }
    double saved = b[c];
    b[c] = saved + h;
    double up = ml::objective(xs, ys, w, b, l2);
    b[c] = saved - h;
    double down = ml::objective(xs, ys, w, b, l2);
    b[c] = saved;
    max_rel = std::max(max_rel, rel_err((up - down) / (2 * h), gb[c]));
  }
  if (max_rel > 1e-4) {
    return "(a) gradient relative error " + std::to_string(max_rel) + " > 1e-4";
  }

  // (b) linearly separable 4-class toy corpus: disjoint vocabularies
  std::vector<ml::LabeledExample> toy;
  const std::vector<std::pair<std::string, std::string>> vocab = {
      {"population_spread", "spread transmission outbreak epidemic"},
      {"vaccine", "vaccine immunization dose antibody"},
      {"ppe_effectiveness", "mask respirator glove gown"},
      {"risk_factors", "age comorbidity diabetes hypertension"},
  };
  std::mt19937 trng(4);
  for (int i = 0; i < 200; ++i) {
    const auto& [label, words] = vocab[static_cast<std::size_t>(i) % 4];
    std::vector<std::string> ws;
    std::istringstream ss(words);
    for (std::string word; ss >> word;) ws.push_back(word);
    std::string text;
    for (int k = 0; k < 8; ++k) {
      text += ws[trng() % ws.size()];
      text += ' ';
    }
    toy.push_back({text, label});
  }
  auto toy_model = ml::train(toy);
  if (toy_model.eval_accuracy < 0.99) {
    return "(b) toy eval accuracy " + std::to_string(toy_model.eval_accuracy) + " < 0.99";
  }

  // (c) select_model across all orderings
  ml::ModelArtifact lo_model, hi_model;
  lo_model.labels = hi_model.labels = {"a", "b"};
  lo_model.eval_accuracy = 0.7;
  hi_model.eval_accuracy = 0.9;
  std::optional<ml::ModelArtifact> inc_lo = lo_model, inc_hi = hi_model;
  if (&ml::select_model(hi_model, inc_lo) != &hi_model) return "(c) better candidate rejected";
  if (&ml::select_model(lo_model, inc_hi) != &*inc_hi) return "(c) worse candidate accepted";
  ml::ModelArtifact tie = hi_model;
  if (&ml::select_model(tie, inc_hi) != &*inc_hi) return "(c) tie should keep the incumbent";
  return "";
}

std::string c9_index_oracle() {
  // (a) exact aggregations vs a brute-force counter on 1000 random docs
  fs::path root = scratch("c9");
  idx::Index index(root / "index");
  std::map<std::string, std::uint64_t> want_cat, want_cty;
  for (std::size_t i = 0; i < 1000; ++i) {
    std::string label;
    auto a = bench::make_synthetic_doc(57, i, &label);
    idx::IndexedDoc d;
    d.doc_id = sha1_hex("doc" + std::to_string(i));
    d.title = a.title;
    d.abstract_text = a.abstract_text;
    d.body_text = a.body_text;
    d.category = label;
    d.countries = a.countries();
    d.source = "synthetic";
    index.index_doc(d);
    ++want_cat[label];
    for (const auto& c : d.countries) ++want_cty[c];
  }
  index.commit();
  auto check = [&](const std::string& field, const std::map<std::string, std::uint64_t>& want) {
    auto agg = index.aggregate(field, 100000);
    std::map<std::string, std::uint64_t> got(agg.buckets.begin(), agg.buckets.end());
    return got == want;
  };
  if (!check("category", want_cat)) return "category aggregation disagrees with brute force";
  if (!check("countries", want_cty)) return "countries aggregation disagrees with brute force";

  // (b) BM25 on a 3-doc corpus vs the hand-computed oracle
  idx::Index small(root / "small");
  auto add = [&](const std::string& id, const std::string& title,
                 const std::string& abstract, const std::string& body) {
    idx::IndexedDoc d;
    d.doc_id = sha1_hex(id);
    d.title = title;
    d.abstract_text = abstract;
    d.body_text = body;
    d.category = "vaccine";
    small.index_doc(d);
  };
  add("A", "vaccine trial", "vaccine efficacy measured",
      "the vaccine trial results were positive vaccine");
  add("B", "mask usage", "ppe protects workers", "masks reduce spread of disease");
  add("C", "vaccine hesitancy", "survey of attitudes",
      "people refuse the vaccine due to fear");
  small.commit();
  auto hits = small.search("vaccine trial", 10);
  // independently recomputed per-field BM25 with k1=1.2 b=0.75,
  // title weight 2, idf = ln(1 + (N - df + 0.5)/(df + 0.5))
  if (hits.size() != 2) return "expected 2 hits for 'vaccine trial'";
  if (std::abs(hits[0].score - 5.450503898079695) > 1e-6) {
    return "top score " + std::to_string(hits[0].score) + " off oracle 5.450503898079695";
  }
  if (std::abs(hits[1].score - 1.3906070681811904) > 1e-6) {
    return "second score " + std::to_string(hits[1].score) + " off oracle 1.3906070681811904";
  }
  return "";
}

std::string c10_persistence() {
  fs::path root = scratch("c10");
  store::Store store(root / "store");

  // model: save -> load -> identical predictions on 100 random docs
  auto& model = demo_model();
  auto ref = ml::save_model(store, model);
  auto loaded = ml::load_model(store, ref.key);
  for (std::size_t i = 0; i < 100; ++i) {
    auto doc = bench::make_synthetic_doc(71, i);
    auto a = ml::predict(model, doc);
    auto b = ml::predict(loaded, doc);
    if (a.label != b.label || a.scores != b.scores) {
      return "model predictions changed across save/load at doc " + std::to_string(i);
    }
  }

  // index: snapshot -> wipe -> restore -> identical query battery outputs
  idx::Index index(root / "index");
  for (std::size_t i = 0; i < 300; ++i) {
    std::string label;
    auto a = bench::make_synthetic_doc(73, i, &label);
    idx::IndexedDoc d;
    d.doc_id = sha1_hex("p" + std::to_string(i));
    d.title = a.title;
    d.abstract_text = a.abstract_text;
    d.body_text = a.body_text;
    d.category = label;
    d.countries = a.countries();
    d.source = "synthetic";
    index.index_doc(d);
  }
  index.commit();

  const std::vector<std::string> battery = {
      "vaccine efficacy", "spread population", "mask ppe", "risk factor age", "study results"};
  auto snapshot_outputs = [&](const idx::Index& ix) {
    std::string acc;
    for (const auto& q : battery) {
      for (const auto& h : ix.search(q, 20)) {
        acc += h.doc_id + "|" + std::to_string(h.score) + ";";
      }
      acc += "\n";
    }
    for (const char* f : {"category", "countries", "source"}) {
      for (const auto& [k, v] : ix.aggregate(f, 1000).buckets) {
        acc += k + "=" + std::to_string(v) + ";";
      }
    }
    return acc;
  };

  std::string before = snapshot_outputs(index);
  fs::path snap = root / "index.snap";
  index.snapshot(snap);
  index.wipe();
  if (index.doc_count() != 0) return "wipe left documents behind";
  index.restore(snap, /*force=*/true);
  if (index.doc_count() != 300) {
    return "restore yielded doc_count=" + std::to_string(index.doc_count()) + ", want 300";
  }
  if (snapshot_outputs(index) != before) return "query battery outputs changed across restore";
  return "";
}

}  // namespace

int main() {
  g_scratch = fs::temp_directory_path() / ("litmine_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(g_scratch);

  std::vector<Criterion> criteria = {
      {1, "batching law: ceil(N/1000) tasks, every key exactly once", c1_batching_law},
      {2, "incremental idempotence: second ingest of 5000 docs is a bit-stable no-op",
       c2_incremental_idempotence},
      {3, "O(1) existence: 100k-key exists() within 2x of 1k-key latency", c3_o1_exists},
      {4, "end-to-end: 2500 staged docs drained, indexed and labeled", c4_end_to_end},
      {5, "failure equivalence: killing 1 of 3 workers leaves results identical",
       c5_failure_equivalence},
      {6, "single-node linearity: r2 >= 0.98 and per-article max/min <= 1.10", c6_linearity},
      {7, "multi-node speedup: 1.3 <= s(2) < 2.0 and s(4) >= s(2) - 0.1", c7_speedup_shape},
      {8, "classifier: gradient check <= 1e-4, toy accuracy >= 0.99, model selection",
       c8_classifier},
      {9, "index oracles: brute-force aggregations and BM25 to 1e-6", c9_index_oracle},
      {10, "persistence: model save/load and index snapshot/restore round-trip",
       c10_persistence},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::string detail;
    try {
      detail = c.run();
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (detail.empty()) {
      std::printf("PASS  criterion %2d: %s\n", c.number, c.description.c_str());
    } else {
      std::printf("FAIL  criterion %2d: %s -- %s\n", c.number, c.description.c_str(),
                  detail.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  fs::remove_all(g_scratch);
  return failures;
}
