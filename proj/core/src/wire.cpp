// SPDX-License-Identifier: Apache-2.0
#include <litmine/wire.hpp>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <random>

#include <litmine/errors.hpp>

namespace litmine::sched {

using nlohmann::json;

std::string_view task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::process: return "process";
    case TaskKind::train: return "train";
    case TaskKind::extract_stub: return "extract_stub";
  }
  return "";
}

std::optional<TaskKind> task_kind_from_name(std::string_view name) {
  if (name == "process") return TaskKind::process;
  if (name == "train") return TaskKind::train;
  if (name == "extract_stub") return TaskKind::extract_stub;
  return std::nullopt;
}

std::string_view key_outcome_name(KeyOutcome o) {
  switch (o) {
    case KeyOutcome::ok: return "ok";
    case KeyOutcome::skipped: return "skipped";
    case KeyOutcome::failed: return "failed";
  }
  return "";
}

json TaskSpec::to_json() const {
  return json{{"task_id", task_id},
              {"kind", std::string(task_kind_name(kind))},
              {"keys", keys},
              {"submitted_at", submitted_at},
              {"attempt", attempt},
              {"model_key", model_key},
              {"params", params}};
}

TaskSpec TaskSpec::from_json(const json& j) {
  TaskSpec t;
  t.task_id = j.at("task_id").get<std::string>();
  auto kind = task_kind_from_name(j.at("kind").get<std::string>());
  if (!kind) throw validation_error("unknown task kind");
  t.kind = *kind;
  t.keys = j.at("keys").get<std::vector<std::string>>();
  t.submitted_at = j.value("submitted_at", std::uint64_t{0});
  t.attempt = j.value("attempt", 1u);
  t.model_key = j.value("model_key", "");
  t.params = j.value("params", "");
  return t;
}

json TaskResult::to_json() const {
  json per = json::array();
  for (const auto& k : per_key) {
    per.push_back({{"key", k.key},
                   {"outcome", std::string(key_outcome_name(k.outcome))},
                   {"reason", k.reason}});
  }
  return json{{"task_id", task_id}, {"per_key", std::move(per)},
              {"elapsed_ms", elapsed_ms}, {"worker_id", worker_id}};
}

TaskResult TaskResult::from_json(const json& j) {
  TaskResult r;
  r.task_id = j.at("task_id").get<std::string>();
  for (const auto& k : j.at("per_key")) {
    KeyResult kr;
    kr.key = k.at("key").get<std::string>();
    std::string outcome = k.at("outcome").get<std::string>();
    if (outcome == "ok") kr.outcome = KeyOutcome::ok;
    else if (outcome == "skipped") kr.outcome = KeyOutcome::skipped;
    else kr.outcome = KeyOutcome::failed;
    kr.reason = k.value("reason", "");
    r.per_key.push_back(std::move(kr));
  }
  r.elapsed_ms = j.value("elapsed_ms", std::uint64_t{0});
  r.worker_id = j.value("worker_id", "");
  return r;
}

json JobSummary::to_json() const {
  return json{{"job_id", job_id}, {"total_tasks", total_tasks}, {"completed", completed},
              {"failed_permanently", failed_permanently}, {"wall_ms", wall_ms}, {"done", done}};
}

JobSummary JobSummary::from_json(const json& j) {
  JobSummary s;
  s.job_id = j.at("job_id").get<std::string>();
  s.total_tasks = j.value("total_tasks", std::uint64_t{0});
  s.completed = j.value("completed", std::uint64_t{0});
  s.failed_permanently = j.value("failed_permanently", std::uint64_t{0});
  s.wall_ms = j.value("wall_ms", std::uint64_t{0});
  s.done = j.value("done", false);
  return s;
}

std::string new_uuid() {
  static thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uint64_t hi = rng(), lo = rng();
  hi = (hi & 0xffffffffffff0fffull) | 0x0000000000004000ull;  // version 4
  lo = (lo & 0x3fffffffffffffffull) | 0x8000000000000000ull;  // variant
  char buf[37];
  std::snprintf(buf, sizeof(buf), "%08x-%04x-%04x-%04x-%012llx",
                static_cast<unsigned>(hi >> 32), static_cast<unsigned>((hi >> 16) & 0xffff),
                static_cast<unsigned>(hi & 0xffff), static_cast<unsigned>(lo >> 48),
                static_cast<unsigned long long>(lo & 0xffffffffffffull));
  return buf;
}

int tcp_listen(const std::string& host, std::uint16_t port, std::uint16_t& bound_port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw io_error("socket: " + std::string(std::strerror(errno)));
  int one = 1;
  ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw validation_error("bad listen address: " + host);
  }
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int e = errno;
    ::close(fd);
    throw io_error("bind " + host + ":" + std::to_string(port) + ": " + std::strerror(e));
  }
  if (::listen(fd, 64) != 0) {
    int e = errno;
    ::close(fd);
    throw io_error("listen: " + std::string(std::strerror(e)));
  }
  sockaddr_in actual{};
  socklen_t len = sizeof(actual);
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&actual), &len);
  bound_port = ntohs(actual.sin_port);
  return fd;
}

int tcp_connect(const std::string& host, std::uint16_t port) {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw io_error("socket: " + std::string(std::strerror(errno)));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd);
    throw validation_error("bad address: " + host);
  }
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    int e = errno;
    ::close(fd);
    throw io_error("connect " + host + ":" + std::to_string(port) + ": " + std::strerror(e));
  }
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  return fd;
}

int tcp_accept(int listen_fd) {
  int fd = ::accept(listen_fd, nullptr, nullptr);
  if (fd >= 0) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  return fd;
}

void tcp_close(int fd) {
  if (fd >= 0) ::close(fd);
}

namespace {

void write_all(int fd, const char* data, std::size_t len) {
  std::size_t sent = 0;
  while (sent < len) {
    ssize_t n = ::send(fd, data + sent, len - sent, MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      throw io_error("send failed: " + std::string(std::strerror(errno)));
    }
    sent += static_cast<std::size_t>(n);
  }
}

bool read_all(int fd, char* data, std::size_t len) {
  std::size_t got = 0;
  while (got < len) {
    ssize_t n = ::recv(fd, data + got, len - got, 0);
    if (n == 0) {
      if (got == 0) return false;
      throw io_error("connection closed mid-frame");
    }
    if (n < 0) {
      if (errno == EINTR) continue;
      throw io_error("recv failed: " + std::string(std::strerror(errno)));
    }
    got += static_cast<std::size_t>(n);
  }
  return true;
}

constexpr std::size_t kMaxFrame = 256u << 20;

}  // namespace

void send_frame(int fd, const json& msg) {
  std::string body = msg.dump();
  char header[4];
  std::uint32_t len = static_cast<std::uint32_t>(body.size());
  header[0] = static_cast<char>((len >> 24) & 0xff);
  header[1] = static_cast<char>((len >> 16) & 0xff);
  header[2] = static_cast<char>((len >> 8) & 0xff);
  header[3] = static_cast<char>(len & 0xff);
  write_all(fd, header, 4);
  write_all(fd, body.data(), body.size());
}

bool recv_frame(int fd, json& msg) {
  char header[4];
  if (!read_all(fd, header, 4)) return false;
  std::uint32_t len = (static_cast<std::uint32_t>(static_cast<unsigned char>(header[0])) << 24) |
                      (static_cast<std::uint32_t>(static_cast<unsigned char>(header[1])) << 16) |
                      (static_cast<std::uint32_t>(static_cast<unsigned char>(header[2])) << 8) |
                      static_cast<std::uint32_t>(static_cast<unsigned char>(header[3]));
  if (len > kMaxFrame) throw io_error("frame too large: " + std::to_string(len));
  std::string body(len, '\0');
  if (!read_all(fd, body.data(), len)) throw io_error("connection closed mid-frame");
  msg = json::parse(body, nullptr, false);
  if (msg.is_discarded()) throw io_error("frame is not valid JSON");
  return true;
}

std::pair<std::string, std::uint16_t> split_host_port(std::string_view addr) {
  auto colon = addr.rfind(':');
  if (colon == std::string_view::npos || colon + 1 >= addr.size()) {
    throw validation_error("expected host:port, got " + std::string(addr));
  }
  int port = 0;
  for (char c : addr.substr(colon + 1)) {
    if (c < '0' || c > '9' || port > 65535) {
      throw validation_error("bad port in " + std::string(addr));
    }
    port = port * 10 + (c - '0');
  }
  if (port < 1 || port > 65535) throw validation_error("bad port in " + std::string(addr));
  return {std::string(addr.substr(0, colon)), static_cast<std::uint16_t>(port)};
}

}  // namespace litmine::sched
