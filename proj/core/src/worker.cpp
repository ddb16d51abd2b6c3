// SPDX-License-Identifier: Apache-2.0
#include <litmine/worker.hpp>

#include <sys/socket.h>

#include <litmine/errors.hpp>

namespace litmine::sched {

using nlohmann::json;

Worker::Worker(WorkerConfig config, TaskFn run)
    : config_(std::move(config)), run_(std::move(run)), worker_id_(new_uuid()) {}

Worker::~Worker() {
  stop();
}

void Worker::start() {
  fd_ = tcp_connect(config_.master_host, config_.master_port);
  running_ = true;
  send_frame(fd_, json{{"type", "REGISTER"}, {"worker_id", worker_id_}, {"slots", config_.slots}});
  reader_thread_ = std::thread([this] { reader_loop(); });
  heartbeat_thread_ = std::thread([this] { heartbeat_loop(); });
  for (std::uint32_t s = 0; s < config_.slots; ++s) {
    slot_threads_.emplace_back([this] { slot_loop(); });
  }
}

void Worker::stop() {
  if (!running_.exchange(false)) return;
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
  queue_cv_.notify_all();
  if (reader_thread_.joinable()) reader_thread_.join();
  if (heartbeat_thread_.joinable()) heartbeat_thread_.join();
  for (auto& t : slot_threads_) {
    if (t.joinable()) t.join();
  }
  slot_threads_.clear();
  tcp_close(fd_);
  fd_ = -1;
}

void Worker::join() {
  if (reader_thread_.joinable()) reader_thread_.join();
  running_ = false;
  queue_cv_.notify_all();
  if (heartbeat_thread_.joinable()) heartbeat_thread_.join();
  for (auto& t : slot_threads_) {
    if (t.joinable()) t.join();
  }
  slot_threads_.clear();
  tcp_close(fd_);
  fd_ = -1;
}

void Worker::reader_loop() {
  try {
    json msg;
    while (running_ && recv_frame(fd_, msg)) {
      std::string type = msg.value("type", "");
      if (type == "ASSIGN") {
        TaskSpec task = TaskSpec::from_json(msg.at("task"));
        std::lock_guard lock(queue_mu_);
        queue_.push_back(std::move(task));
        queue_cv_.notify_one();
      } else if (type == "SHUTDOWN") {
        break;
      }
    }
  } catch (const Error&) {
    // master gone; fall through to shutdown
  }
  running_ = false;
  queue_cv_.notify_all();
}

void Worker::heartbeat_loop() {
  while (running_) {
    try {
      std::lock_guard lock(send_mu_);
      send_frame(fd_, json{{"type", "HEARTBEAT"}, {"worker_id", worker_id_}});
    } catch (const Error&) {
      break;
    }
    for (int i = 0; i < 10 && running_; ++i) {
      std::this_thread::sleep_for(config_.heartbeat_period / 10);
    }
  }
}

void Worker::slot_loop() {
  while (true) {
    TaskSpec task;
    {
      std::unique_lock lock(queue_mu_);
      queue_cv_.wait(lock, [this] { return !running_ || !queue_.empty(); });
      if (queue_.empty()) {
        if (!running_) return;
        continue;
      }
      task = std::move(queue_.front());
      queue_.pop_front();
    }
    auto t0 = std::chrono::steady_clock::now();
    TaskResult result;
    try {
      result = run_(task);
    } catch (const std::exception& e) {
      result.per_key.clear();
      for (const auto& key : task.keys) {
        result.per_key.push_back({key, KeyOutcome::failed, e.what()});
      }
    }
    result.task_id = task.task_id;
    result.worker_id = worker_id_;
    result.elapsed_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - t0).count());
    try {
      std::lock_guard lock(send_mu_);
      send_frame(fd_, json{{"type", "RESULT"}, {"result", result.to_json()}});
    } catch (const Error&) {
      return;  // master will reschedule via failure detection
    }
  }
}

}  // namespace litmine::sched
