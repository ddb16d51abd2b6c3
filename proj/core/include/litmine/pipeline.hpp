// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>

#include <litmine/classifier.hpp>
#include <litmine/index.hpp>
#include <litmine/ingest.hpp>
#include <litmine/master.hpp>
#include <litmine/store.hpp>
#include <litmine/worker.hpp>

namespace litmine::pipeline {

struct PipelineConfig {
  std::filesystem::path store_root;
  std::filesystem::path index_dir;
  std::string master_addr = "127.0.0.1:7070";  // TCP, workers
  std::string master_http = "127.0.0.1:8080";  // HTTP: jobs + index writes
  std::size_t batch_size = 1000;
  std::uint16_t serve_port = 8081;
};

// Where analyzed docs go. The index has one writer (the master); remote
// workers reach it through the master's HTTP endpoint, the converged path
// writes straight into the Index object.
class IndexSink {
public:
  virtual ~IndexSink() = default;
  /// Atomically indexes and commits the batch; throws Io on failure.
  virtual void write(const std::vector<idx::AnalyzedDoc>& docs) = 0;
};

class DirectIndexSink : public IndexSink {
public:
  explicit DirectIndexSink(idx::Index& index) : index_(index) {}
  void write(const std::vector<idx::AnalyzedDoc>& docs) override;

private:
  idx::Index& index_;
  std::mutex mu_;
};

class RemoteIndexSink : public IndexSink {
public:
  explicit RemoteIndexSink(std::string master_http) : master_http_(std::move(master_http)) {}
  void write(const std::vector<idx::AnalyzedDoc>& docs) override;

private:
  std::string master_http_;
};

/// Pluggable PDF text extraction for extract_stub tasks. The default is
/// unset, which rejects every key with "extractor not configured".
using ExtractorFn = std::function<ArticleDoc(std::span<const std::byte>)>;

/// One key of a process task, in order: read staging/<key>, parse, clean,
/// predict, index, move to completed. A key already in completed is skipped
/// (re-delivery). Any failure leaves the file in staging with a sidecar
/// reason file next to it.
sched::KeyResult process_one(store::Store& store, const ml::ModelArtifact& model,
                             IndexSink& sink, const std::string& key);

// Executes tasks on a worker: process, train, extract_stub. Caches loaded
// models by key. Thread-safe; slots may run tasks concurrently.
class TaskRunner {
public:
  TaskRunner(store::Store& store, std::shared_ptr<IndexSink> sink,
             ExtractorFn extractor = nullptr);

  sched::TaskResult operator()(const sched::TaskSpec& task);

private:
  sched::TaskResult run_process(const sched::TaskSpec& task);
  sched::TaskResult run_train(const sched::TaskSpec& task);
  sched::TaskResult run_extract(const sched::TaskSpec& task);
  std::shared_ptr<const ml::ModelArtifact> model_for(const std::string& key);

  store::Store& store_;
  std::shared_ptr<IndexSink> sink_;
  ExtractorFn extractor_;
  std::mutex cache_mu_;
  std::unordered_map<std::string, std::shared_ptr<const ml::ModelArtifact>> model_cache_;
};

// --- orchestration against a running master (HTTP client side) ---

/// Lists staging, batches by config.batch_size, submits, waits, returns the
/// final summary. Refuses to start when no model is current.
sched::JobSummary run_processing_job(const PipelineConfig& config,
                                     std::chrono::milliseconds timeout = std::chrono::minutes(30));

/// Submits a single train task over `data_key` (JSON-lines in ml_models) and
/// returns the key of the model current after selection.
std::string run_training_job(const PipelineConfig& config, const std::string& data_key,
                             const ml::TrainConfig& train = {},
                             std::chrono::milliseconds timeout = std::chrono::minutes(30));

/// Ingest workflow against a metadata CSV path or http(s) URL.
ingest::IngestReport check_update(store::Store& store, const std::string& metadata_location,
                                  const std::filesystem::path& articles_dir,
                                  std::string_view source = "");

sched::JobSummary submit_and_wait(const std::string& master_http,
                                  std::vector<sched::TaskSpec> tasks,
                                  std::chrono::milliseconds timeout);

}  // namespace litmine::pipeline
