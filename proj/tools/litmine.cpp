// SPDX-License-Identifier: Apache-2.0
//
// litmine — CLI for the scholarly-article mining pipeline.
// Subcommands: update | ingest | train | process | master | worker | serve |
// query | agg | bench | snapshot | restore. All outputs are line-delimited
// JSON. Exit codes: 0 success, 1 validation error, 2 I/O or network error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <semaphore>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include <litmine/bench.hpp>
#include <litmine/classifier.hpp>
#include <litmine/corpus.hpp>
#include <litmine/errors.hpp>
#include <litmine/index.hpp>
#include <litmine/ingest.hpp>
#include <litmine/master.hpp>
#include <litmine/pipeline.hpp>
#include <litmine/sha1.hpp>
#include <litmine/store.hpp>
#include <litmine/worker.hpp>

using nlohmann::json;
using namespace litmine;

namespace {

std::binary_semaphore g_shutdown{0};

void handle_signal(int) { g_shutdown.release(); }

struct GlobalOptions {
  std::string config_path;
  pipeline::PipelineConfig config;
};

void load_config_file(pipeline::PipelineConfig& config, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("config file unreadable: " + path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw validation_error("config line is not key=value: " + line);
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    if (key == "store_root") config.store_root = value;
    else if (key == "index_dir") config.index_dir = value;
    else if (key == "master_addr") config.master_addr = value;
    else if (key == "master_http") config.master_http = value;
    else if (key == "batch_size") config.batch_size = std::stoul(value);
    else if (key == "serve_port") config.serve_port = static_cast<std::uint16_t>(std::stoi(value));
    else throw validation_error("unknown config key: " + key);
  }
}

void emit(const json& j) { std::cout << j.dump() << std::endl; }

json hit_to_json(const idx::SearchHit& h) {
  return json{{"doc_id", h.doc_id}, {"score", h.score}, {"title", h.title}};
}

json agg_to_json(const idx::AggregationResult& agg) {
  json buckets = json::array();
  for (const auto& [key, count] : agg.buckets) {
    buckets.push_back({{"key", key}, {"count", count}});
  }
  return json{{"field", agg.field}, {"buckets", std::move(buckets)}};
}

int run_master_cmd(const GlobalOptions& opts, const std::string& listen,
                   std::uint16_t http_port, std::uint32_t slots, bool no_worker) {
  auto [host, port] = sched::split_host_port(listen);
  store::Store store(opts.config.store_root);
  idx::Index index(opts.config.index_dir);

  sched::MasterConfig mconfig;
  mconfig.listen_host = host;
  mconfig.port = port;
  mconfig.http_port = http_port;
  sched::Master master(mconfig, &index);
  master.start();
  emit(json{{"event", "master_started"},
            {"addr", host + ":" + std::to_string(master.port())},
            {"http", host + ":" + std::to_string(master.http_port())}});

  // converged mode: this process doubles as a worker node
  std::unique_ptr<sched::Worker> converged;
  std::unique_ptr<pipeline::TaskRunner> runner;
  if (!no_worker) {
    auto sink = std::make_shared<pipeline::RemoteIndexSink>(
        "127.0.0.1:" + std::to_string(master.http_port()));
    runner = std::make_unique<pipeline::TaskRunner>(store, sink);
    sched::WorkerConfig wconfig;
    wconfig.master_host = "127.0.0.1";
    wconfig.master_port = master.port();
    wconfig.slots = slots;
    converged = std::make_unique<sched::Worker>(
        wconfig, [&runner](const sched::TaskSpec& t) { return (*runner)(t); });
    converged->start();
  }

  std::signal(SIGINT, handle_signal);
  std::signal(SIGTERM, handle_signal);
  g_shutdown.acquire();
  if (converged) converged->stop();
  master.stop();
  emit(json{{"event", "master_stopped"}});
  return 0;
}

int run_worker_cmd(const std::string& master_addr, const std::string& master_http,
                   const std::string& store_root, std::uint32_t slots) {
  auto [host, port] = sched::split_host_port(master_addr);
  store::Store store(store_root);
  auto sink = std::make_shared<pipeline::RemoteIndexSink>(master_http);
  pipeline::TaskRunner runner(store, sink);

  sched::WorkerConfig wconfig;
  wconfig.master_host = host;
  wconfig.master_port = port;
  wconfig.slots = slots;
  sched::Worker worker(wconfig, [&runner](const sched::TaskSpec& t) { return runner(t); });
  worker.start();
  emit(json{{"event", "worker_started"}, {"worker_id", worker.worker_id()}, {"slots", slots}});
  worker.join();
  emit(json{{"event", "worker_stopped"}});
  return 0;
}

int run_serve_cmd(const std::string& index_dir, std::uint16_t port) {
  idx::Index index(index_dir);
  httplib::Server server;
  server.Get("/search", [&index](const httplib::Request& req, httplib::Response& res) {
    std::string q = req.get_param_value("q");
    std::size_t limit = req.has_param("limit") ? std::stoul(req.get_param_value("limit")) : 10;
    json hits = json::array();
    for (const auto& h : index.search(q, std::max<std::size_t>(1, limit))) {
      hits.push_back(hit_to_json(h));
    }
    res.set_content(json{{"hits", std::move(hits)}}.dump(), "application/json");
  });
  server.Get("/agg", [&index](const httplib::Request& req, httplib::Response& res) {
    std::string field = req.get_param_value("field");
    std::size_t top = req.has_param("top") ? std::stoul(req.get_param_value("top")) : 10;
    try {
      res.set_content(agg_to_json(index.aggregate(field, top)).dump(), "application/json");
    } catch (const Error& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });
  server.Get("/stats", [&index](const httplib::Request&, httplib::Response& res) {
    res.set_content(json{{"doc_count", index.doc_count()}}.dump(), "application/json");
  });
  emit(json{{"event", "serving"}, {"port", port}});
  if (!server.listen("0.0.0.0", port)) {
    throw io_error("serve: cannot listen on port " + std::to_string(port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scholarly-article mining pipeline"};
  app.require_subcommand(1);

  GlobalOptions opts;
  opts.config.store_root = "litmine_data/store";
  opts.config.index_dir = "litmine_data/index";
  app.add_option("--config", opts.config_path, "key=value config file");

  // ingest / update
  std::string metadata, articles_dir, source;
  auto* ingest_cmd = app.add_subcommand("ingest", "load new article files into staging");
  ingest_cmd->add_option("--metadata", metadata, "metadata CSV path")->required();
  ingest_cmd->add_option("--articles", articles_dir, "directory of per-article JSON files")->required();
  ingest_cmd->add_option("--source", source, "dataset source tag");
  ingest_cmd->add_option("--store", opts.config.store_root, "store root");

  auto* update_cmd = app.add_subcommand("update", "check the dataset source and ingest the delta");
  update_cmd->add_option("--metadata", metadata, "metadata CSV path or http(s) URL")->required();
  update_cmd->add_option("--articles", articles_dir, "directory of per-article JSON files")->required();
  update_cmd->add_option("--source", source, "dataset source tag");
  update_cmd->add_option("--store", opts.config.store_root, "store root");

  // train
  std::string train_data;
  ml::TrainConfig train_config;
  bool train_local = false;
  auto* train_cmd = app.add_subcommand("train", "train a model and keep the better one");
  train_cmd->add_option("--data", train_data, "ml_models object key or local JSONL path")->required();
  train_cmd->add_option("--l2", train_config.l2, "L2 regularization");
  train_cmd->add_option("--epochs", train_config.epochs, "training epochs");
  train_cmd->add_option("--seed", train_config.seed, "RNG seed");
  train_cmd->add_flag("--local", train_local, "train in-process instead of submitting a task");
  train_cmd->add_option("--store", opts.config.store_root, "store root");
  train_cmd->add_option("--master-http", opts.config.master_http, "master HTTP address");

  // process
  auto* process_cmd = app.add_subcommand("process", "run the staging->completed processing job");
  process_cmd->add_option("--store", opts.config.store_root, "store root");
  process_cmd->add_option("--master-http", opts.config.master_http, "master HTTP address");
  process_cmd->add_option("--batch", opts.config.batch_size, "keys per task");

  // master
  std::string listen = "127.0.0.1:7070";
  std::uint16_t http_port = 8080;
  std::uint32_t slots = 1;
  bool no_worker = false;
  auto* master_cmd = app.add_subcommand("master", "run the bag-of-tasks master (converged mode)");
  master_cmd->add_option("--listen", listen, "TCP listen address");
  master_cmd->add_option("--http", http_port, "HTTP port for jobs/status/index writes");
  master_cmd->add_option("--slots", slots, "converged worker slots");
  master_cmd->add_flag("--no-worker", no_worker, "do not host an in-process worker");
  master_cmd->add_option("--store", opts.config.store_root, "store root");
  master_cmd->add_option("--index", opts.config.index_dir, "index directory");

  // worker
  std::string master_addr = "127.0.0.1:7070";
  auto* worker_cmd = app.add_subcommand("worker", "run a worker node");
  worker_cmd->add_option("--master", master_addr, "master TCP address")
      ->envname("LITMINE_MASTER_ADDR");
  worker_cmd->add_option("--master-http", opts.config.master_http, "master HTTP address");
  worker_cmd->add_option("--slots", slots, "concurrent task slots");
  worker_cmd->add_option("--store", opts.config.store_root, "store root")->required();

  // serve / query / agg
  std::string query_text, agg_field, url;
  std::size_t limit = 10, top_k = 10;
  auto* serve_cmd = app.add_subcommand("serve", "read-only HTTP search service");
  serve_cmd->add_option("--index", opts.config.index_dir, "index directory");
  serve_cmd->add_option("--port", opts.config.serve_port, "HTTP port");

  auto* query_cmd = app.add_subcommand("query", "full-text search");
  query_cmd->add_option("--q", query_text, "query text")->required();
  query_cmd->add_option("--limit", limit, "max hits");
  query_cmd->add_option("--index", opts.config.index_dir, "index directory");
  query_cmd->add_option("--url", url, "query a running serve/master instead");

  auto* agg_cmd = app.add_subcommand("agg", "terms aggregation");
  agg_cmd->add_option("--field", agg_field, "category | countries | source")->required();
  agg_cmd->add_option("--top", top_k, "bucket count");
  agg_cmd->add_option("--index", opts.config.index_dir, "index directory");
  agg_cmd->add_option("--url", url, "query a running serve/master instead");

  // bench
  bench::BenchConfig bench_config;
  std::string bench_out = "bench_report.json";
  std::vector<std::size_t> bench_n, bench_m;
  auto* bench_cmd = app.add_subcommand("bench", "scalability benchmark grid");
  bench_cmd->add_option("--n", bench_n, "corpus sizes")->delimiter(',');
  bench_cmd->add_option("--m", bench_m, "worker counts")->delimiter(',');
  bench_cmd->add_option("--repeats", bench_config.repeats, "repeats per point (median)");
  bench_cmd->add_option("--seed", bench_config.seed, "corpus seed");
  bench_cmd->add_option("--batch", bench_config.batch_size, "keys per task");
  bench_cmd->add_option("--fetch-ms", bench_config.simulate_fetch_ms,
                        "simulated per-article fetch latency in ms (-1 = calibrate, 0 = off)");
  bench_cmd->add_option("--out", bench_out, "report path (JSON; CSV written alongside)");
  bench_cmd->add_option("--work-dir", bench_config.work_dir, "scratch directory");

  // snapshot / restore
  std::string snap_file;
  bool restore_force = false;
  auto* snapshot_cmd = app.add_subcommand("snapshot", "export the index to an archive");
  snapshot_cmd->add_option("--index", opts.config.index_dir, "index directory");
  snapshot_cmd->add_option("--out", snap_file, "archive path")->required();
  auto* restore_cmd = app.add_subcommand("restore", "import an index archive");
  restore_cmd->add_option("--index", opts.config.index_dir, "index directory");
  restore_cmd->add_option("--in", snap_file, "archive path")->required();
  restore_cmd->add_flag("--force", restore_force, "overwrite a non-empty index");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!opts.config_path.empty()) load_config_file(opts.config, opts.config_path);

    if (*ingest_cmd || *update_cmd) {
      store::Store store(opts.config.store_root);
      ingest::IngestReport report =
          *update_cmd ? pipeline::check_update(store, metadata, articles_dir, source)
                      : [&] {
                          std::ifstream in(metadata, std::ios::binary);
                          if (!in) throw io_error("metadata file unreadable: " + metadata);
                          std::string csv((std::istreambuf_iterator<char>(in)),
                                          std::istreambuf_iterator<char>());
                          return ingest::run_ingest(store, csv, articles_dir, source);
                        }();
      emit(json::parse(report.to_json()));
      return report.error ? 2 : 0;
    }
    if (*train_cmd) {
      store::Store store(opts.config.store_root);
      std::string data_key = train_data;
      if (std::filesystem::exists(train_data)) {
        std::ifstream in(train_data, std::ios::binary);
        std::string jsonl((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        data_key = store.put_content(store::BucketId::ml_models, jsonl, "jsonl").key;
      }
      std::string current;
      if (train_local) {
        auto examples = ml::parse_training_data(store.get(store::BucketId::ml_models, data_key));
        ml::ModelArtifact model = ml::train(examples, train_config);
        current = ml::install_model(store, model);
      } else {
        current = pipeline::run_training_job(opts.config, data_key, train_config);
      }
      ml::ModelArtifact m = ml::load_model(store, current);
      emit(json{{"current_model", current}, {"eval_accuracy", m.eval_accuracy},
                {"labels", m.labels}});
      return 0;
    }
    if (*process_cmd) {
      sched::JobSummary summary = pipeline::run_processing_job(opts.config);
      emit(summary.to_json());
      return 0;
    }
    if (*master_cmd) return run_master_cmd(opts, listen, http_port, slots, no_worker);
    if (*worker_cmd) {
      return run_worker_cmd(master_addr, opts.config.master_http,
                            opts.config.store_root.string(), slots);
    }
    if (*serve_cmd) return run_serve_cmd(opts.config.index_dir.string(), opts.config.serve_port);
    if (*query_cmd) {
      if (!url.empty()) {
        httplib::Client client(url);
        auto res = client.Get(("/search?q=" + httplib::detail::encode_url(query_text) +
                               "&limit=" + std::to_string(limit)).c_str());
        if (!res || res->status != 200) throw io_error("query against " + url + " failed");
        for (const auto& h : json::parse(res->body).at("hits")) emit(h);
      } else {
        idx::Index index(opts.config.index_dir);
        for (const auto& h : index.search(query_text, limit)) emit(hit_to_json(h));
      }
      return 0;
    }
    if (*agg_cmd) {
      if (!url.empty()) {
        httplib::Client client(url);
        auto res = client.Get(("/agg?field=" + agg_field + "&top=" + std::to_string(top_k)).c_str());
        if (!res || res->status != 200) throw io_error("agg against " + url + " failed");
        emit(json::parse(res->body));
      } else {
        idx::Index index(opts.config.index_dir);
        emit(agg_to_json(index.aggregate(agg_field, top_k)));
      }
      return 0;
    }
    if (*bench_cmd) {
      if (!bench_n.empty()) bench_config.n_set = bench_n;
      if (!bench_m.empty()) bench_config.m_set = bench_m;
      if (bench_config.work_dir.empty()) {
        bench_config.work_dir = std::filesystem::temp_directory_path() / "litmine_bench";
      }
      bench::BenchReport report = bench::run_grid(bench_config);
      std::ofstream(bench_out) << report.to_json();
      std::filesystem::path csv_path = bench_out;
      csv_path.replace_extension(".csv");
      std::ofstream(csv_path) << report.to_csv();
      emit(json{{"report", bench_out}, {"csv", csv_path.string()},
                {"r2", report.linear_fit.r2}});
      return 0;
    }
    if (*snapshot_cmd) {
      idx::Index index(opts.config.index_dir);
      index.snapshot(snap_file);
      emit(json{{"snapshot", snap_file}, {"doc_count", index.doc_count()}});
      return 0;
    }
    if (*restore_cmd) {
      idx::Index index(opts.config.index_dir);
      index.restore(snap_file, restore_force);
      emit(json{{"restored", snap_file}, {"doc_count", index.doc_count()}});
      return 0;
    }
  } catch (const Error& e) {
    emit(json{{"error", e.what()}});
    return e.kind() == ErrorKind::Io ? 2 : 1;
  } catch (const std::exception& e) {
    emit(json{{"error", e.what()}});
    return 1;
  }
  return 0;
}
