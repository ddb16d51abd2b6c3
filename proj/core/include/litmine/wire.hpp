// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace litmine::sched {

// Task kinds of the bag-of-tasks engine.
enum class TaskKind { process, train, extract_stub };

std::string_view task_kind_name(TaskKind k);
std::optional<TaskKind> task_kind_from_name(std::string_view name);

struct TaskSpec {
  std::string task_id;  // UUID
  TaskKind kind = TaskKind::process;
  std::vector<std::string> keys;  // 1..1000 object keys
  std::uint64_t submitted_at = 0;  // unix millis UTC
  std::uint32_t attempt = 1;
  std::string model_key;  // pinned at submit time for process tasks
  std::string params;     // kind-specific options as a JSON object, may be empty

  nlohmann::json to_json() const;
  static TaskSpec from_json(const nlohmann::json& j);
};

enum class KeyOutcome { ok, skipped, failed };

std::string_view key_outcome_name(KeyOutcome o);

struct KeyResult {
  std::string key;
  KeyOutcome outcome = KeyOutcome::ok;
  std::string reason;  // set for failed/skipped
};

struct TaskResult {
  std::string task_id;
  std::vector<KeyResult> per_key;
  std::uint64_t elapsed_ms = 0;
  std::string worker_id;

  nlohmann::json to_json() const;
  static TaskResult from_json(const nlohmann::json& j);
};

struct JobSummary {
  std::string job_id;
  std::uint64_t total_tasks = 0;
  std::uint64_t completed = 0;
  std::uint64_t failed_permanently = 0;
  std::uint64_t wall_ms = 0;
  bool done = false;

  nlohmann::json to_json() const;
  static JobSummary from_json(const nlohmann::json& j);
};

std::string new_uuid();

// --- framed TCP transport: 4-byte big-endian length prefix + UTF-8 JSON ---
// Message types: REGISTER, HEARTBEAT, ASSIGN, RESULT, SHUTDOWN.

int tcp_listen(const std::string& host, std::uint16_t port, std::uint16_t& bound_port);
int tcp_connect(const std::string& host, std::uint16_t port);
int tcp_accept(int listen_fd);
void tcp_close(int fd);

void send_frame(int fd, const nlohmann::json& msg);
/// False on clean EOF; throws Io on a broken or oversized frame.
bool recv_frame(int fd, nlohmann::json& msg);

/// "host:port" -> pair; throws Validation.
std::pair<std::string, std::uint16_t> split_host_port(std::string_view addr);

}  // namespace litmine::sched
