// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <litmine/wire.hpp>

namespace litmine::sched {

using TaskFn = std::function<TaskResult(const TaskSpec&)>;

struct WorkerConfig {
  std::string master_host = "127.0.0.1";
  std::uint16_t master_port = 7070;
  std::uint32_t slots = 1;
  std::chrono::milliseconds heartbeat_period{2000};
};

// Bag-of-tasks worker: registers with the master, runs one task per slot and
// streams RESULT frames back. Task execution shares no mutable state across
// slots; everything flows through the store/index contracts inside `run`.
class Worker {
public:
  Worker(WorkerConfig config, TaskFn run);
  ~Worker();

  Worker(const Worker&) = delete;
  Worker& operator=(const Worker&) = delete;

  /// Connects and registers; throws Io when the master is unreachable.
  void start();
  void stop();
  /// Blocks until the master shuts the connection down.
  void join();

  const std::string& worker_id() const { return worker_id_; }

private:
  void reader_loop();
  void heartbeat_loop();
  void slot_loop();

  WorkerConfig config_;
  TaskFn run_;
  std::string worker_id_;
  int fd_ = -1;
  std::mutex send_mu_;
  std::mutex queue_mu_;
  std::condition_variable queue_cv_;
  std::deque<TaskSpec> queue_;
  std::atomic<bool> running_{false};
  std::thread reader_thread_;
  std::thread heartbeat_thread_;
  std::vector<std::thread> slot_threads_;
};

}  // namespace litmine::sched
