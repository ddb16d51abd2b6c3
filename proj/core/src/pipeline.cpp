// SPDX-License-Identifier: Apache-2.0
#include <litmine/pipeline.hpp>

#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include <litmine/errors.hpp>

namespace litmine::pipeline {

using nlohmann::json;
using sched::JobSummary;
using sched::TaskSpec;

JobSummary submit_and_wait(const std::string& master_http, std::vector<TaskSpec> tasks,
                           std::chrono::milliseconds timeout) {
  httplib::Client client(std::string("http://") + master_http);
  client.set_read_timeout(60, 0);
  json body;
  body["tasks"] = json::array();
  for (const auto& t : tasks) body["tasks"].push_back(t.to_json());
  auto res = client.Post("/jobs", body.dump(), "application/json");
  if (!res) throw io_error("master unreachable at " + master_http);
  if (res->status == 409) throw conflict_error(json::parse(res->body).value("error", "conflict"));
  if (res->status != 200) throw io_error("job submission failed: http " + std::to_string(res->status));
  std::string job_id = json::parse(res->body).at("job_id").get<std::string>();

  auto deadline = std::chrono::steady_clock::now() + timeout;
  while (true) {
    auto status = client.Get(("/jobs/" + job_id).c_str());
    if (!status || status->status != 200) throw io_error("job status poll failed");
    JobSummary s = JobSummary::from_json(json::parse(status->body));
    if (s.done) return s;
    if (std::chrono::steady_clock::now() > deadline) {
      throw io_error("job " + job_id + " did not finish within the timeout");
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
}

JobSummary run_processing_job(const PipelineConfig& config, std::chrono::milliseconds timeout) {
  store::Store store(config.store_root);
  auto model_key = ml::current_model_key(store);
  if (!model_key) {
    throw validation_error("no current model; train one first (litmine train --data <ref>)");
  }

  std::vector<std::string> keys;
  std::vector<std::string> page;
  std::optional<std::string> after;
  do {
    page = store.list(store::BucketId::staging, 10000, after);
    keys.insert(keys.end(), page.begin(), page.end());
    if (!page.empty()) after = page.back();
  } while (!page.empty());

  auto tasks = sched::make_batches(keys, config.batch_size, sched::TaskKind::process, *model_key);
  return submit_and_wait(config.master_http, std::move(tasks), timeout);
}

std::string run_training_job(const PipelineConfig& config, const std::string& data_key,
                             const ml::TrainConfig& train, std::chrono::milliseconds timeout) {
  TaskSpec task;
  task.task_id = sched::new_uuid();
  task.kind = sched::TaskKind::train;
  task.keys = {data_key};
  task.params = json{{"l2", train.l2}, {"epochs", train.epochs}, {"seed", train.seed}}.dump();

  JobSummary summary = submit_and_wait(config.master_http, {task}, timeout);
  if (summary.failed_permanently > 0) {
    throw io_error("training task failed permanently");
  }
  store::Store store(config.store_root);
  auto key = ml::current_model_key(store);
  if (!key) throw io_error("training completed but no model became current");
  return *key;
}

ingest::IngestReport check_update(store::Store& store, const std::string& metadata_location,
                                  const std::filesystem::path& articles_dir,
                                  std::string_view source) {
  std::string csv_text;
  try {
    if (metadata_location.starts_with("http://") || metadata_location.starts_with("https://")) {
      auto slash = metadata_location.find('/', metadata_location.find("//") + 2);
      std::string base = metadata_location.substr(0, slash);
      std::string path = slash == std::string::npos ? "/" : metadata_location.substr(slash);
      httplib::Client client(base);
      auto res = client.Get(path.c_str());
      if (!res || res->status != 200) {
        throw io_error("metadata fetch failed: " + metadata_location);
      }
      csv_text = res->body;
    } else {
      std::ifstream in(metadata_location, std::ios::binary);
      if (!in) throw io_error("metadata file unreadable: " + metadata_location);
      csv_text.assign((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
  } catch (const Error& e) {
    ingest::IngestReport report;
    report.error = e.what();
    return report;
  }
  return ingest::run_ingest(store, csv_text, articles_dir, source);
}

}  // namespace litmine::pipeline
