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

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "curator/gateway/transport.hpp"

namespace curator::gateway {

// A system/user message pair with {{slot}} placeholders.
struct PromptTemplate {
  std::string system;
  std::string user;

  std::vector<std::string> slots() const;
  // Throws Error(kTemplate) naming the first unfilled slot.
  std::pair<std::string, std::string> render(const SlotMap& slots) const;

  // Parses the "### system" / "### user" section format of the shipped files.
  static PromptTemplate parse(const std::string& text);
};

// Built-in templates, keyed by file stem (e.g. "check", "judge_a").
const std::map<std::string, std::string>& builtin_prompt_files();
// Templates for a role, keyed by name. Each role has "default"; the judge
// also has "a_score" and "e_score".
std::map<std::string, PromptTemplate> default_templates(
    Role role, const std::optional<std::filesystem::path>& prompt_dir = std::nullopt);

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{60000};
};

// Upper bound of the backoff before retry number `retry` (0-based):
// min(max_delay, base * factor^retry).
std::chrono::milliseconds scheduled_delay(const RetryPolicy& policy, int retry);

class InFlightLimiter {
 public:
  explicit InFlightLimiter(int limit);
  void acquire();
  void release();
  int limit() const { return limit_; }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int limit_;
  int active_ = 0;
};

struct AttemptRecord {
  int status = 0;
  std::string error;
  std::int64_t backoff_ms = 0;      // actual sleep before the next attempt
  std::int64_t scheduled_ms = 0;    // jitter upper bound for that sleep
};

struct Transcript {
  std::uint64_t call_id = 0;
  Role role = Role::kExpert;
  std::string model;
  std::string template_name;
  nlohmann::json request;
  nlohmann::json response;  // null on failure
  std::string started_at;
  std::string finished_at;
  int retry_count = 0;
  std::vector<AttemptRecord> attempts;
  std::optional<nlohmann::json> usage;
  bool ok = false;
  std::string error;
};

nlohmann::json to_json(const Transcript& t);

// Thread-safe collector; optionally appends each record to a JSONL file.
class TranscriptSink {
 public:
  TranscriptSink() = default;
  explicit TranscriptSink(std::filesystem::path path);

  void record(const Transcript& t);
  std::vector<Transcript> records() const;
  std::size_t size() const;
  std::uint64_t next_call_id();

 private:
  mutable std::mutex mu_;
  std::vector<Transcript> records_;
  std::optional<std::filesystem::path> path_;
  std::uint64_t next_id_ = 0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct AgentHandle {
  Role role = Role::kExpert;
  std::string endpoint;  // base URL, or "stub"
  std::string api_key;
  std::string model_name;
  std::map<std::string, PromptTemplate> templates;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  std::uint64_t jitter_seed = 0;

  std::shared_ptr<Transport> transport;
  std::shared_ptr<TranscriptSink> sink;
  std::shared_ptr<InFlightLimiter> limiter;
  Sleeper sleeper;
};

// Stub-backed handle: default templates, no real sleeping, fresh sink.
AgentHandle make_stub_handle(Role role, std::shared_ptr<Transport> transport,
                             std::string model_name = "stub");

enum class FailureKind {
  kNone,
  kTemplate,
  kClientError,       // non-retryable 4xx
  kMalformedResponse, // 2xx without assistant content
  kExhausted,         // retryable failures on every attempt
};

std::string_view to_string(FailureKind kind);

struct DispatchResult {
  bool ok = false;
  std::string text;
  FailureKind failure = FailureKind::kNone;
  std::string error;
  Transcript transcript;
};

struct RetriedPost {
  HttpResponse response;  // last response seen
  std::vector<AttemptRecord> attempts;
  FailureKind failure = FailureKind::kNone;
  std::string error;
};

// Sends `req`, retrying timeouts, 429 and 5xx with full-jitter exponential
// backoff. A 2xx response ends the loop with failure == kNone.
RetriedPost post_with_retry(Transport& transport, const HttpRequest& req,
                            const RetryPolicy& policy, const Sleeper& sleeper,
                            std::uint64_t jitter_seed);

// Renders the named template and sends it. Retries timeouts, 429 and 5xx
// with full-jitter exponential backoff. A missing slot throws
// Error(kTemplate) before any transport call.
DispatchResult dispatch(const AgentHandle& handle, const SlotMap& slots,
                        const std::string& template_name = "default");

// Runs at most `max_in_flight` dispatches concurrently. Results are aligned
// with `slot_maps`; per-item failures (including template errors) are
// reported in place.
std::vector<DispatchResult> dispatch_batch(const AgentHandle& handle,
                                           const std::vector<SlotMap>& slot_maps,
                                           int max_in_flight,
                                           const std::string& template_name = "default");

// Finds the first JSON object in an agent reply, tolerating prose and
// markdown code fences around it.
std::optional<nlohmann::json> extract_json_object(const std::string& text);

// Reads a judge reply: {"score": x, ...} or a bare number. Scores outside
// [0,10] or in any other shape ("8/10") are rejected.
std::optional<double> parse_score_reply(const std::string& text);

}  // namespace curator::gateway
