// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <litmine/index.hpp>
#include <litmine/wire.hpp>

namespace litmine::sched {

/// Splits keys into order-preserving tasks of at most `batch_size` keys.
/// ceil(N / batch_size) tasks; the final one may be smaller.
std::vector<TaskSpec> make_batches(const std::vector<std::string>& keys,
                                   std::size_t batch_size = 1000,
                                   TaskKind kind = TaskKind::process,
                                   std::string_view model_key = "");

struct MasterConfig {
  std::string listen_host = "127.0.0.1";
  std::uint16_t port = 7070;       // 0 = ephemeral
  std::uint16_t http_port = 8080;  // 0 = ephemeral
  std::chrono::milliseconds heartbeat_period{2000};
  int missed_beats_to_death = 3;
  std::chrono::milliseconds task_timeout{600000};
  std::uint32_t max_attempts = 5;
};

// Bag-of-tasks master: FIFO task queue, greedy dispatch to any free worker
// slot, heartbeat-based failure detection and idempotent rescheduling.
//
// One logical state machine owns the ledger; network sessions feed it through
// a single mutex, so no two state mutations interleave. The optional Index is
// the single index writer; workers post analyzed docs to it over HTTP.
//
// HTTP surface: POST /jobs, GET /jobs/<id>, POST /internal/index, GET /stats.
class Master {
public:
  Master(MasterConfig config, idx::Index* index);
  ~Master();

  Master(const Master&) = delete;
  Master& operator=(const Master&) = delete;

  void start();
  void stop();

  std::uint16_t port() const { return bound_port_; }
  std::uint16_t http_port() const { return bound_http_port_; }

  /// Enqueues tasks FIFO and returns the new job id. A second train job while
  /// one is active is refused (Conflict).
  std::string submit(std::vector<TaskSpec> tasks);

  /// Throws NotFound for an unknown job id.
  JobSummary job_status(const std::string& job_id) const;

  /// Blocks until the job is done or the deadline passes; returns done-ness.
  bool wait_job(const std::string& job_id, std::chrono::milliseconds timeout) const;

  std::size_t live_worker_count() const;

private:
  struct WorkerConn {
    std::string worker_id;
    int fd = -1;
    std::uint32_t slots = 1;
    std::uint32_t in_flight = 0;
    std::chrono::steady_clock::time_point last_heartbeat;
    bool dead = false;
    std::vector<std::string> assigned;  // task ids
  };

  struct InFlight {
    TaskSpec spec;
    std::string worker_id;
    std::chrono::steady_clock::time_point deadline;
  };

  struct Job {
    JobSummary summary;
    std::chrono::steady_clock::time_point started;
    bool has_train = false;
  };

  void accept_loop();
  void session_loop(int fd);
  void monitor_loop();
  void dispatch_locked();
  void mark_worker_dead_locked(const std::string& worker_id, const char* why);
  void finish_task_locked(const TaskResult& result);

  MasterConfig config_;
  idx::Index* index_;
  std::uint16_t bound_port_ = 0;
  std::uint16_t bound_http_port_ = 0;

  mutable std::mutex mu_;
  mutable std::condition_variable job_cv_;
  std::deque<TaskSpec> queue_;
  std::unordered_map<std::string, std::shared_ptr<WorkerConn>> workers_;
  std::vector<std::string> worker_order_;
  std::unordered_map<std::string, InFlight> in_flight_;
  std::unordered_map<std::string, std::string> task_to_job_;
  std::unordered_map<std::string, Job> jobs_;
  bool training_active_ = false;

  std::atomic<bool> running_{false};
  int listen_fd_ = -1;
  std::thread accept_thread_;
  std::thread monitor_thread_;
  std::vector<std::thread> session_threads_;
  std::mutex session_mu_;
  std::unique_ptr<class MasterHttp> http_;
};

}  // namespace litmine::sched
