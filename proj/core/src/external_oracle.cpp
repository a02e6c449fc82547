// Copyright 2026 The symq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Subprocess oracle speaking newline-delimited JSON over the child's
// stdin/stdout:
//
//   adapter -> engine, first line: {"n": <int>, "name": <string>}
//   engine -> adapter:             {"id": <int>, "subset": [<ascending>]}
//   adapter -> engine:             {"id": <int>, "value": <finite float>}
//                               or {"id": <int>, "error": <string>}
//
// Requests are pipelined; responses may come back in any order.

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"
#include "symq/error.hpp"
#include "symq/oracle.hpp"

extern char** environ;

namespace symq {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

void SetNonBlocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

class ExternalBackend : public OracleBackend {
 public:
  explicit ExternalBackend(const ExternalOracleOptions& options)
      : command_(options.command), timeout_(options.timeout) {
    if (command_.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "oracle command is empty");
    }
    // A dead adapter must surface as a protocol error, not kill the engine.
    signal(SIGPIPE, SIG_IGN);
    Spawn();
    try {
      Handshake(options.expected_n);
    } catch (...) {
      Shutdown();
      throw;
    }
  }

  ~ExternalBackend() override { Shutdown(); }

  ExternalBackend(const ExternalBackend&) = delete;
  ExternalBackend& operator=(const ExternalBackend&) = delete;

  int n() const override { return n_; }
  std::string name() const override { return name_; }

  std::vector<double> RawValues(
      std::span<const std::uint64_t> subsets) override {
    std::string outgoing;
    std::unordered_map<std::int64_t, std::size_t> pending;
    pending.reserve(subsets.size());
    for (std::size_t i = 0; i < subsets.size(); ++i) {
      const std::int64_t id = next_id_++;
      pending.emplace(id, i);
      json indices = json::array();
      for (std::uint64_t b = subsets[i]; b != 0; b &= b - 1) {
        indices.push_back(std::countr_zero(b));
      }
      outgoing += json{{"id", id}, {"subset", std::move(indices)}}.dump();
      outgoing.push_back('\n');
    }

    std::vector<double> out(subsets.size(), 0.0);
    try {
      Exchange(outgoing, pending, out);
    } catch (...) {
      // Late answers to this batch are dropped by later exchanges.
      for (const auto& [id, slot] : pending) abandoned_.insert(id);
      throw;
    }
    return out;
  }

 private:
  void Exchange(const std::string& outgoing,
                std::unordered_map<std::int64_t, std::size_t>& pending,
                std::vector<double>& out) {
    std::size_t written = 0;
    auto deadline = Clock::now() + timeout_;
    while (!pending.empty()) {
      pollfd fds[2];
      nfds_t count = 0;
      fds[count++] = {from_child_, POLLIN, 0};
      if (written < outgoing.size()) fds[count++] = {to_child_, POLLOUT, 0};
      const int ready = PollUntil(fds, count, deadline);
      if (ready == 0) {
        throw Error(ErrorCode::kOracleTimeout,
                    "adapter \"" + command_ + "\" sent nothing for " +
                        std::to_string(timeout_.count()) + " ms");
      }
      if (count == 2 && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
        const ssize_t w = write(to_child_, outgoing.data() + written,
                                outgoing.size() - written);
        if (w < 0 && errno != EAGAIN && errno != EINTR) {
          throw Error(ErrorCode::kOracleProtocolError,
                      std::string("writing to adapter failed: ") +
                          std::strerror(errno));
        }
        if (w > 0) written += static_cast<std::size_t>(w);
      }
      if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
        if (!ReadAvailable()) {
          throw Error(ErrorCode::kOracleProtocolError,
                      "adapter closed its output with " +
                          std::to_string(pending.size()) +
                          " requests unanswered");
        }
        deadline = Clock::now() + timeout_;
        while (auto line = NextLine()) {
          HandleResponse(*line, pending, out);
        }
      }
    }
  }

  void Spawn() {
    int in_pipe[2];
    int out_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0) {
      throw Error(ErrorCode::kIoError,
                  std::string("pipe failed: ") + std::strerror(errno));
    }
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&actions, in_pipe[1]);
    posix_spawn_file_actions_addclose(&actions, out_pipe[0]);

    std::string shell = "/bin/sh";
    std::string flag = "-c";
    char* argv[] = {shell.data(), flag.data(), command_.data(), nullptr};
    const int rc =
        posix_spawn(&pid_, "/bin/sh", &actions, nullptr, argv, environ);
    posix_spawn_file_actions_destroy(&actions);
    close(in_pipe[0]);
    close(out_pipe[1]);
    if (rc != 0) {
      close(in_pipe[1]);
      close(out_pipe[0]);
      pid_ = -1;
      throw Error(ErrorCode::kIoError, std::string("cannot start adapter: ") +
                                           std::strerror(rc));
    }
    to_child_ = in_pipe[1];
    from_child_ = out_pipe[0];
    fcntl(to_child_, F_SETFD, FD_CLOEXEC);
    fcntl(from_child_, F_SETFD, FD_CLOEXEC);
    SetNonBlocking(to_child_);
    SetNonBlocking(from_child_);
  }

  void Handshake(std::optional<int> expected_n) {
    const auto deadline = Clock::now() + timeout_;
    std::optional<std::string> line;
    while (!(line = NextLine())) {
      pollfd fd{from_child_, POLLIN, 0};
      if (PollUntil(&fd, 1, deadline) == 0) {
        throw Error(ErrorCode::kOracleTimeout,
                    "adapter \"" + command_ + "\" sent no handshake within " +
                        std::to_string(timeout_.count()) + " ms");
      }
      if (!ReadAvailable()) {
        throw Error(ErrorCode::kOracleProtocolError,
                    "adapter \"" + command_ + "\" exited before handshake");
      }
    }
    json doc;
    try {
      doc = json::parse(*line);
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "malformed handshake: " + *line);
    }
    if (!doc.is_object() || !doc.contains("n") ||
        !doc["n"].is_number_integer()) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "handshake lacks integer \"n\": " + *line);
    }
    n_ = doc["n"].get<int>();
    if (n_ < 1 || n_ > kMaxFeatures) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "handshake announces n=" + std::to_string(n_) +
                      ", outside [1, 64]");
    }
    if (expected_n && *expected_n != n_) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "adapter announces n=" + std::to_string(n_) +
                      " but " + std::to_string(*expected_n) +
                      " features were requested");
    }
    name_ = doc.contains("name") && doc["name"].is_string()
                ? doc["name"].get<std::string>()
                : std::string("external");
  }

  void HandleResponse(const std::string& line,
                      std::unordered_map<std::int64_t, std::size_t>& pending,
                      std::vector<double>& out) {
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error&) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "malformed response: " + line);
    }
    if (!doc.is_object() || !doc.contains("id") ||
        !doc["id"].is_number_integer()) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "response lacks integer \"id\": " + line);
    }
    const auto id = doc["id"].get<std::int64_t>();
    if (abandoned_.erase(id) != 0) return;
    const auto it = pending.find(id);
    if (it == pending.end()) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "response for unknown id " + std::to_string(id));
    }
    if (doc.contains("error")) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "adapter reported an error for id " + std::to_string(id) +
                      ": " + doc["error"].dump());
    }
    if (!doc.contains("value") || !doc["value"].is_number() ||
        !std::isfinite(doc["value"].get<double>())) {
      throw Error(ErrorCode::kOracleProtocolError,
                  "response without a finite \"value\": " + line);
    }
    out[it->second] = doc["value"].get<double>();
    pending.erase(it);
  }

  // Returns the number of ready descriptors, 0 on deadline expiry.
  static int PollUntil(pollfd* fds, nfds_t count, Clock::time_point deadline) {
    while (true) {
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - Clock::now());
      if (left.count() <= 0) return 0;
      const int rc = poll(fds, count, static_cast<int>(left.count()));
      if (rc > 0) return rc;
      if (rc == 0) return 0;
      if (errno != EINTR) {
        throw Error(ErrorCode::kIoError,
                    std::string("poll failed: ") + std::strerror(errno));
      }
    }
  }

  // Drains the child's stdout into the buffer. False on end of stream.
  bool ReadAvailable() {
    char chunk[65536];
    bool got_any = false;
    while (true) {
      const ssize_t r = read(from_child_, chunk, sizeof(chunk));
      if (r > 0) {
        buffer_.append(chunk, static_cast<std::size_t>(r));
        got_any = true;
        continue;
      }
      if (r == 0) return got_any;
      if (errno == EINTR) continue;
      if (errno == EAGAIN || errno == EWOULDBLOCK) return true;
      throw Error(ErrorCode::kIoError,
                  std::string("reading from adapter failed: ") +
                      std::strerror(errno));
    }
  }

  std::optional<std::string> NextLine() {
    while (true) {
      const auto nl = buffer_.find('\n', scan_from_);
      if (nl == std::string::npos) {
        scan_from_ = buffer_.size();
        return std::nullopt;
      }
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      scan_from_ = 0;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      return line;
    }
  }

  void Shutdown() {
    if (to_child_ >= 0) close(to_child_);
    if (from_child_ >= 0) close(from_child_);
    to_child_ = from_child_ = -1;
    if (pid_ <= 0) return;
    int status = 0;
    for (int i = 0; i < 100; ++i) {
      if (waitpid(pid_, &status, WNOHANG) == pid_) {
        pid_ = -1;
        return;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid_, SIGKILL);
    waitpid(pid_, &status, 0);
    pid_ = -1;
  }

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  int n_ = 0;
  std::string name_;
  std::string buffer_;
  std::size_t scan_from_ = 0;
  std::int64_t next_id_ = 0;
  std::unordered_set<std::int64_t> abandoned_;
};

}  // namespace

std::unique_ptr<OracleBackend> MakeExternalBackend(
    const ExternalOracleOptions& options) {
  return std::make_unique<ExternalBackend>(options);
}

}  // namespace symq
