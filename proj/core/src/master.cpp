// SPDX-License-Identifier: Apache-2.0
#include <litmine/master.hpp>

#include <algorithm>

#include <httplib.h>

#include <litmine/errors.hpp>

namespace litmine::sched {

using nlohmann::json;

std::vector<TaskSpec> make_batches(const std::vector<std::string>& keys,
                                   std::size_t batch_size, TaskKind kind,
                                   std::string_view model_key) {
  if (batch_size < 1) throw validation_error("batch_size must be >= 1");
  std::uint64_t now = static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::milliseconds>(
          std::chrono::system_clock::now().time_since_epoch()).count());
  std::vector<TaskSpec> tasks;
  tasks.reserve((keys.size() + batch_size - 1) / batch_size);
  for (std::size_t start = 0; start < keys.size(); start += batch_size) {
    TaskSpec t;
    t.task_id = new_uuid();
    t.kind = kind;
    t.submitted_at = now;
    t.model_key = std::string(model_key);
    std::size_t end = std::min(start + batch_size, keys.size());
    t.keys.assign(keys.begin() + static_cast<std::ptrdiff_t>(start),
                  keys.begin() + static_cast<std::ptrdiff_t>(end));
    tasks.push_back(std::move(t));
  }
  return tasks;
}

// HTTP facade over the master ledger plus the single index writer.
class MasterHttp {
public:
  MasterHttp(Master& master, idx::Index* index, const std::string& host, std::uint16_t port)
      : master_(master), index_(index) {
    server_.Post("/jobs", [this](const httplib::Request& req, httplib::Response& res) {
      handle_submit(req, res);
    });
    server_.Get(R"(/jobs/([0-9a-f\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
      handle_status(req, res);
    });
    server_.Post("/internal/index", [this](const httplib::Request& req, httplib::Response& res) {
      handle_index(req, res);
    });
    server_.Get("/stats", [this](const httplib::Request&, httplib::Response& res) {
      json j{{"doc_count", index_ ? index_->doc_count() : 0}};
      res.set_content(j.dump(), "application/json");
    });
    if (port == 0) {
      bound_port_ = static_cast<std::uint16_t>(server_.bind_to_any_port(host));
    } else {
      if (!server_.bind_to_port(host, port)) {
        throw io_error("http bind failed on " + host + ":" + std::to_string(port));
      }
      bound_port_ = port;
    }
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MasterHttp() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  std::uint16_t port() const { return bound_port_; }

private:
  void handle_submit(const httplib::Request& req, httplib::Response& res) {
    try {
      json body = json::parse(req.body);
      std::vector<TaskSpec> tasks;
      for (const auto& t : body.at("tasks")) tasks.push_back(TaskSpec::from_json(t));
      std::string job_id = master_.submit(std::move(tasks));
      res.set_content(json{{"job_id", job_id}}.dump(), "application/json");
    } catch (const Error& e) {
      res.status = e.kind() == ErrorKind::Conflict ? 409 : 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  }

  void handle_status(const httplib::Request& req, httplib::Response& res) {
    try {
      JobSummary s = master_.job_status(req.matches[1]);
      res.set_content(s.to_json().dump(), "application/json");
    } catch (const Error&) {
      res.status = 404;
      res.set_content(json{{"error", "unknown job"}}.dump(), "application/json");
    }
  }

  void handle_index(const httplib::Request& req, httplib::Response& res) {
    if (!index_) {
      res.status = 503;
      res.set_content(json{{"error", "no index attached"}}.dump(), "application/json");
      return;
    }
    try {
      // body is ndjson: one analyzed doc per line, appended to the segment
      // verbatim so the hot path parses each doc exactly once
      std::lock_guard lock(write_mu_);  // single-writer index contract
      std::size_t start = 0;
      while (start < req.body.size()) {
        std::size_t end = req.body.find('\n', start);
        if (end == std::string::npos) end = req.body.size();
        std::string_view line(req.body.data() + start, end - start);
        if (!line.empty()) {
          index_->add(idx::AnalyzedDoc::from_json(line), line);
        }
        start = end + 1;
      }
      index_->commit();
      res.set_content(json{{"ok", true}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  }

  Master& master_;
  idx::Index* index_;
  std::mutex write_mu_;
  httplib::Server server_;
  std::thread thread_;
  std::uint16_t bound_port_ = 0;
};

Master::Master(MasterConfig config, idx::Index* index)
    : config_(std::move(config)), index_(index) {}

Master::~Master() { stop(); }

void Master::start() {
  listen_fd_ = tcp_listen(config_.listen_host, config_.port, bound_port_);
  http_ = std::make_unique<MasterHttp>(*this, index_, config_.listen_host, config_.http_port);
  bound_http_port_ = http_->port();
  running_ = true;
  accept_thread_ = std::thread([this] { accept_loop(); });
  monitor_thread_ = std::thread([this] { monitor_loop(); });
}

void Master::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  tcp_close(listen_fd_);
  listen_fd_ = -1;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, w] : workers_) {
      if (w->fd >= 0) {
        try { send_frame(w->fd, json{{"type", "SHUTDOWN"}}); } catch (const Error&) {}
        ::shutdown(w->fd, SHUT_RDWR);
      }
    }
  }
  if (accept_thread_.joinable()) accept_thread_.join();
  if (monitor_thread_.joinable()) monitor_thread_.join();
  {
    std::lock_guard lock(session_mu_);
    for (auto& t : session_threads_) {
      if (t.joinable()) t.join();
    }
    session_threads_.clear();
  }
  http_.reset();
}

void Master::accept_loop() {
  while (running_) {
    int fd = tcp_accept(listen_fd_);
    if (fd < 0) {
      if (!running_) break;
      continue;
    }
    std::lock_guard lock(session_mu_);
    session_threads_.emplace_back([this, fd] { session_loop(fd); });
  }
}

void Master::session_loop(int fd) {
  std::string worker_id;
  try {
    json msg;
    while (recv_frame(fd, msg)) {
      std::string type = msg.value("type", "");
      if (type == "REGISTER") {
        worker_id = msg.at("worker_id").get<std::string>();
        auto conn = std::make_shared<WorkerConn>();
        conn->worker_id = worker_id;
        conn->fd = fd;
        conn->slots = std::max(1u, msg.value("slots", 1u));
        conn->last_heartbeat = std::chrono::steady_clock::now();
        std::lock_guard lock(mu_);
        workers_[worker_id] = conn;
        worker_order_.push_back(worker_id);
        dispatch_locked();
      } else if (type == "HEARTBEAT") {
        std::lock_guard lock(mu_);
        auto it = workers_.find(msg.value("worker_id", worker_id));
        if (it != workers_.end() && !it->second->dead) {
          it->second->last_heartbeat = std::chrono::steady_clock::now();
        }
      } else if (type == "RESULT") {
        TaskResult result = TaskResult::from_json(msg.at("result"));
        std::lock_guard lock(mu_);
        finish_task_locked(result);
        dispatch_locked();
      }
    }
  } catch (const Error&) {
    // connection torn down below
  }
  tcp_close(fd);
  if (!worker_id.empty()) {
    std::lock_guard lock(mu_);
    mark_worker_dead_locked(worker_id, "connection lost");
    dispatch_locked();
  }
}

void Master::monitor_loop() {
  while (running_) {
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    auto now = std::chrono::steady_clock::now();
    auto death_after = config_.heartbeat_period * config_.missed_beats_to_death;
    std::lock_guard lock(mu_);
    for (auto& [id, w] : workers_) {
      if (!w->dead && now - w->last_heartbeat > death_after) {
        mark_worker_dead_locked(id, "missed heartbeats");
      }
    }
    // a timed-out task implies its holder is stuck; declare the worker dead
    std::vector<std::string> timed_out_workers;
    for (const auto& [task_id, inflight] : in_flight_) {
      if (now > inflight.deadline) timed_out_workers.push_back(inflight.worker_id);
    }
    for (const auto& wid : timed_out_workers) mark_worker_dead_locked(wid, "task timeout");
    dispatch_locked();
  }
}

void Master::mark_worker_dead_locked(const std::string& worker_id, const char* /*why*/) {
  auto it = workers_.find(worker_id);
  if (it == workers_.end() || it->second->dead) return;
  auto& w = *it->second;
  w.dead = true;
  if (w.fd >= 0) ::shutdown(w.fd, SHUT_RDWR);
  // re-enqueue everything it held, bumping attempts
  for (const auto& task_id : w.assigned) {
    auto inflight = in_flight_.find(task_id);
    if (inflight == in_flight_.end()) continue;
    TaskSpec spec = std::move(inflight->second.spec);
    in_flight_.erase(inflight);
    spec.attempt += 1;
    if (spec.attempt > config_.max_attempts) {
      auto job_it = jobs_.find(task_to_job_[spec.task_id]);
      if (job_it != jobs_.end()) {
        job_it->second.summary.failed_permanently += 1;
        auto& s = job_it->second.summary;
        if (s.completed + s.failed_permanently == s.total_tasks) {
          s.done = true;
          s.wall_ms = static_cast<std::uint64_t>(
              std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - job_it->second.started).count());
          if (jobs_[task_to_job_[spec.task_id]].has_train) training_active_ = false;
          job_cv_.notify_all();
        }
      }
    } else {
      queue_.push_front(std::move(spec));  // retries go to the head, preserving rough FIFO age order
    }
  }
  w.assigned.clear();
  w.in_flight = 0;
}

void Master::finish_task_locked(const TaskResult& result) {
  auto inflight = in_flight_.find(result.task_id);
  if (inflight == in_flight_.end()) return;  // stale result from a declared-dead worker
  if (!result.worker_id.empty() && inflight->second.worker_id != result.worker_id) {
    return;  // task was rescheduled elsewhere after this worker was declared dead
  }
  std::string worker_id = inflight->second.worker_id;
  in_flight_.erase(inflight);
  auto w_it = workers_.find(worker_id);
  if (w_it != workers_.end()) {
    auto& w = *w_it->second;
    if (w.in_flight > 0) --w.in_flight;
    std::erase(w.assigned, result.task_id);
  }
  auto job_id_it = task_to_job_.find(result.task_id);
  if (job_id_it == task_to_job_.end()) return;
  auto& job = jobs_[job_id_it->second];
  job.summary.completed += 1;
  auto& s = job.summary;
  if (s.completed + s.failed_permanently == s.total_tasks) {
    s.done = true;
    s.wall_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - job.started).count());
    if (job.has_train) training_active_ = false;
    job_cv_.notify_all();
  }
}

void Master::dispatch_locked() {
  while (!queue_.empty()) {
    std::shared_ptr<WorkerConn> target;
    for (const auto& id : worker_order_) {
      auto it = workers_.find(id);
      if (it == workers_.end()) continue;
      auto& w = it->second;
      if (!w->dead && w->in_flight < w->slots) {
        target = w;
        break;
      }
    }
    if (!target) return;
    TaskSpec task = std::move(queue_.front());
    queue_.pop_front();
    std::string task_id = task.task_id;
    target->assigned.push_back(task_id);
    target->in_flight += 1;
    in_flight_[task_id] = {task, target->worker_id,
                           std::chrono::steady_clock::now() + config_.task_timeout};
    try {
      send_frame(target->fd, json{{"type", "ASSIGN"}, {"task", task.to_json()}});
    } catch (const Error&) {
      mark_worker_dead_locked(target->worker_id, "send failed");
    }
  }
}

std::string Master::submit(std::vector<TaskSpec> tasks) {
  std::lock_guard lock(mu_);
  bool has_train = std::any_of(tasks.begin(), tasks.end(), [](const TaskSpec& t) {
    return t.kind == TaskKind::train;
  });
  if (has_train && training_active_) {
    throw conflict_error("a training job is already running");
  }
  std::string job_id = new_uuid();
  Job job;
  job.summary.job_id = job_id;
  job.summary.total_tasks = tasks.size();
  job.summary.done = tasks.empty();
  job.started = std::chrono::steady_clock::now();
  job.has_train = has_train;
  for (auto& t : tasks) {
    task_to_job_[t.task_id] = job_id;
    queue_.push_back(std::move(t));
  }
  jobs_[job_id] = std::move(job);
  if (has_train) training_active_ = true;
  dispatch_locked();
  if (tasks.empty()) job_cv_.notify_all();
  return job_id;
}

JobSummary Master::job_status(const std::string& job_id) const {
  std::lock_guard lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw not_found_error("unknown job: " + job_id);
  JobSummary s = it->second.summary;
  if (!s.done) {
    s.wall_ms = static_cast<std::uint64_t>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - it->second.started).count());
  }
  return s;
}

bool Master::wait_job(const std::string& job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw not_found_error("unknown job: " + job_id);
  return job_cv_.wait_for(lock, timeout, [&] {
    auto j = jobs_.find(job_id);
    return j != jobs_.end() && j->second.summary.done;
  });
}

std::size_t Master::live_worker_count() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [id, w] : workers_) {
    if (!w->dead) ++n;
  }
  return n;
}

}  // namespace litmine::sched
