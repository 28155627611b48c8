// Copyright 2026 The Curator Authors
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

#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace curator::gateway {

enum class Role { kParsing, kExpert, kCheck, kOptimize, kWriteLikeHuman, kJudge };

std::string_view to_string(Role role);
Role parse_role(std::string_view s);

using SlotMap = std::map<std::string, std::string>;

struct HttpRequest {
  std::string url;
  std::string body;
  std::map<std::string, std::string> headers;
  std::chrono::milliseconds timeout{60000};
  // In-process context for stubs; never serialized onto the wire.
  Role role = Role::kExpert;
  std::string template_name;
  const SlotMap* slots = nullptr;
};

struct HttpResponse {
  int status = 0;  // 0 when the transport itself failed
  std::string body;
  std::string error;
  bool timed_out = false;
};

// Implementations must be safe to call concurrently.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const HttpRequest& request) = 0;
};

// Real network transport over cpp-httplib.
class HttpTransport final : public Transport {
 public:
  HttpResponse post(const HttpRequest& request) override;
};

// What a stub returns for one call; status 200 means `text` is the assistant
// content, anything else is returned as an HTTP error.
struct StubReply {
  int status = 200;
  std::string text;
  bool timeout = false;

  static StubReply ok(std::string text) { return {200, std::move(text), false}; }
  static StubReply http_error(int status) { return {status, {}, false}; }
  static StubReply timed_out() { return {0, {}, true}; }
};

using StubResponder =
    std::function<StubReply(const HttpRequest& request, std::uint64_t call_index)>;

// Offline transport. Wraps the responder's text in a chat-completion
// response body. Tracks concurrent in-flight calls so tests can observe the
// peak.
class StubTransport final : public Transport {
 public:
  explicit StubTransport(StubResponder responder,
                         std::chrono::milliseconds latency = std::chrono::milliseconds(0));

  static std::shared_ptr<StubTransport> fixed(std::string reply);
  // Call i gets schedule[i]; past the end the last entry repeats.
  static std::shared_ptr<StubTransport> scripted(std::vector<StubReply> schedule);
  // Role-aware deterministic replies derived from the seed and the request.
  static std::shared_ptr<StubTransport> seeded(std::uint64_t seed);

  HttpResponse post(const HttpRequest& request) override;

  std::uint64_t calls() const { return calls_.load(); }
  int peak_in_flight() const { return peak_.load(); }

 private:
  StubResponder responder_;
  std::chrono::milliseconds latency_;
  std::atomic<std::uint64_t> calls_{0};
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
};

// Replays responses captured in a transcript file, matched by request body.
// Repeated identical requests are answered in recorded order.
class ReplayTransport final : public Transport {
 public:
  static std::shared_ptr<ReplayTransport> from_file(const std::filesystem::path& path);
  static std::shared_ptr<ReplayTransport> from_lines(const std::vector<std::string>& lines);

  HttpResponse post(const HttpRequest& request) override;

 private:
  std::mutex mu_;
  std::map<std::string, std::vector<HttpResponse>> recorded_;
  std::map<std::string, std::size_t> cursor_;
};

// Deterministic role-aware reply used by StubTransport::seeded.
StubReply seeded_reply(std::uint64_t seed, const HttpRequest& request);

}  // namespace curator::gateway
