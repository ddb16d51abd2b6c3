// SPDX-License-Identifier: Apache-2.0
#include <litmine/pipeline.hpp>

#include <chrono>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include <litmine/errors.hpp>
#include <litmine/features.hpp>

namespace litmine::pipeline {

using nlohmann::json;
using sched::KeyOutcome;
using sched::KeyResult;
using sched::TaskResult;
using sched::TaskSpec;

namespace {

// Keys per index write; bounds HTTP payloads while keeping the
// index-before-move ordering for every key.
constexpr std::size_t kIndexChunk = 200;

void write_failure_sidecar(const store::Store& store, const std::string& key,
                           const std::string& reason) {
  auto path = store.root() / "staging" / (key + ".reason");
  std::ofstream out(path, std::ios::trunc);
  out << reason << '\n';
}

void clear_failure_sidecar(const store::Store& store, const std::string& key) {
  std::error_code ec;
  std::filesystem::remove(store.root() / "staging" / (key + ".reason"), ec);
}

idx::AnalyzedDoc build_indexed(const ArticleDoc& doc, const std::string& key,
                               const std::string& label) {
  idx::IndexedDoc out;
  out.doc_id = std::string(store::key_sha(key));
  out.title = doc.title;
  out.abstract_text = doc.abstract_text;
  out.body_text = doc.body_text;
  out.category = label;
  out.countries = doc.countries();
  out.source = doc.source;
  out.publish_time = doc.publish_time;
  return idx::analyze(out);
}

}  // namespace

void DirectIndexSink::write(const std::vector<idx::AnalyzedDoc>& docs) {
  std::lock_guard lock(mu_);
  for (const auto& d : docs) index_.add(d);
  index_.commit();
}

void RemoteIndexSink::write(const std::vector<idx::AnalyzedDoc>& docs) {
  std::string body;
  for (const auto& d : docs) {
    body += d.to_json();
    body += '\n';
  }
  httplib::Client client(std::string("http://") + master_http_);
  client.set_read_timeout(60, 0);
  auto res = client.Post("/internal/index", body, "application/x-ndjson");
  if (!res || res->status != 200) {
    throw io_error("index write to master failed" +
                   (res ? (": http " + std::to_string(res->status)) : ""));
  }
}

KeyResult process_one(store::Store& store, const ml::ModelArtifact& model,
                      IndexSink& sink, const std::string& key) {
  if (store.exists(store::BucketId::completed, key)) {
    store.move({store::BucketId::staging, key}, store::BucketId::completed);
    return {key, KeyOutcome::skipped, "already completed"};
  }
  try {
    std::string bytes = store.get(store::BucketId::staging, key);
    ArticleDoc doc = parse_article(bytes);
    ml::Prediction pred = ml::predict(model, doc);
    sink.write({build_indexed(doc, key, pred.label)});
    store.move({store::BucketId::staging, key}, store::BucketId::completed);
    clear_failure_sidecar(store, key);
    return {key, KeyOutcome::ok, ""};
  } catch (const std::exception& e) {
    write_failure_sidecar(store, key, e.what());
    return {key, KeyOutcome::failed, e.what()};
  }
}

TaskRunner::TaskRunner(store::Store& store, std::shared_ptr<IndexSink> sink,
                       ExtractorFn extractor)
    : store_(store), sink_(std::move(sink)), extractor_(std::move(extractor)) {}

std::shared_ptr<const ml::ModelArtifact> TaskRunner::model_for(const std::string& key) {
  std::lock_guard lock(cache_mu_);
  auto it = model_cache_.find(key);
  if (it != model_cache_.end()) return it->second;
  auto model = std::make_shared<const ml::ModelArtifact>(ml::load_model(store_, key));
  model_cache_[key] = model;
  return model;
}

TaskResult TaskRunner::run_process(const TaskSpec& task) {
  TaskResult result;
  auto model = model_for(task.model_key);

  // optional per-key delay emulating a remote object-store fetch; used by the
  // benchmark harness so worker overlap is measurable on page-cached local disk
  std::chrono::microseconds fetch_delay{0};
  if (!task.params.empty()) {
    json p = json::parse(task.params, nullptr, false);
    if (p.is_object()) {
      fetch_delay = std::chrono::microseconds(p.value("simulate_fetch_us", std::int64_t{0}));
    }
  }

  for (std::size_t start = 0; start < task.keys.size(); start += kIndexChunk) {
    std::size_t end = std::min(start + kIndexChunk, task.keys.size());
    std::vector<idx::AnalyzedDoc> batch;
    std::vector<std::size_t> ok_slots;  // result indices awaiting index+move
    for (std::size_t i = start; i < end; ++i) {
      const std::string& key = task.keys[i];
      if (store_.exists(store::BucketId::completed, key)) {
        // repair a half-finished move left by a worker that died between the
        // completed-copy and the staging-delete; no-op when staging is clean
        store_.move({store::BucketId::staging, key}, store::BucketId::completed);
        result.per_key.push_back({key, KeyOutcome::skipped, "already completed"});
        continue;
      }
      try {
        if (fetch_delay.count() > 0) std::this_thread::sleep_for(fetch_delay);
        std::string bytes = store_.get(store::BucketId::staging, key);
        ArticleDoc doc = parse_article(bytes);
        ml::Prediction pred = ml::predict(*model, doc);
        batch.push_back(build_indexed(doc, key, pred.label));
        result.per_key.push_back({key, KeyOutcome::ok, ""});
        ok_slots.push_back(result.per_key.size() - 1);
      } catch (const std::exception& e) {
        write_failure_sidecar(store_, key, e.what());
        result.per_key.push_back({key, KeyOutcome::failed, e.what()});
      }
    }
    if (batch.empty()) continue;
    try {
      sink_->write(batch);  // index before any move, preserving per-key order
    } catch (const Error& e) {
      for (std::size_t slot : ok_slots) {
        result.per_key[slot] = {result.per_key[slot].key, KeyOutcome::failed, e.what()};
        write_failure_sidecar(store_, result.per_key[slot].key, e.what());
      }
      continue;
    }
    for (std::size_t slot : ok_slots) {
      const std::string& key = result.per_key[slot].key;
      try {
        store_.move({store::BucketId::staging, key}, store::BucketId::completed);
        clear_failure_sidecar(store_, key);
      } catch (const Error& e) {
        result.per_key[slot] = {key, KeyOutcome::failed, e.what()};
        write_failure_sidecar(store_, key, e.what());
      }
    }
  }
  return result;
}

TaskResult TaskRunner::run_train(const TaskSpec& task) {
  TaskResult result;
  const std::string& data_key = task.keys.at(0);
  try {
    std::string jsonl = store_.get(store::BucketId::ml_models, data_key);
    auto examples = ml::parse_training_data(jsonl);
    ml::TrainConfig config;
    if (!task.params.empty()) {
      json p = json::parse(task.params, nullptr, false);
      if (p.is_object()) {
        config.l2 = p.value("l2", config.l2);
        config.epochs = p.value("epochs", config.epochs);
        config.seed = p.value("seed", config.seed);
      }
    }
    ml::ModelArtifact model = ml::train(examples, config);
    ml::install_model(store_, model);
    result.per_key.push_back({data_key, KeyOutcome::ok, ""});
  } catch (const Error& e) {
    result.per_key.push_back({data_key, KeyOutcome::failed, e.what()});
  }
  return result;
}

TaskResult TaskRunner::run_extract(const TaskSpec& task) {
  TaskResult result;
  for (const auto& key : task.keys) {
    if (!extractor_) {
      result.per_key.push_back({key, KeyOutcome::failed, "extractor not configured"});
      continue;
    }
    try {
      std::string bytes = store_.get(store::BucketId::raw, key);
      ArticleDoc doc = extractor_(std::as_bytes(std::span(bytes.data(), bytes.size())));
      std::string article_json = serialize_article(doc);
      store_.put_content(store::BucketId::staging, article_json, "json");
      store_.remove(store::BucketId::raw, key);
      result.per_key.push_back({key, KeyOutcome::ok, ""});
    } catch (const Error& e) {
      result.per_key.push_back({key, KeyOutcome::failed, e.what()});
    }
  }
  return result;
}

TaskResult TaskRunner::operator()(const TaskSpec& task) {
  TaskResult r;
  switch (task.kind) {
    case sched::TaskKind::process: r = run_process(task); break;
    case sched::TaskKind::train: r = run_train(task); break;
    case sched::TaskKind::extract_stub: r = run_extract(task); break;
    default:
      for (const auto& key : task.keys) {
        r.per_key.push_back({key, KeyOutcome::failed, "unknown task kind"});
      }
  }
  r.task_id = task.task_id;
  return r;
}

}  // namespace litmine::pipeline
