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

#include "curator/gateway/agent.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <fstream>
#include <thread>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/log.hpp"
#include "curator/core/random.hpp"

namespace curator::gateway {

using nlohmann::json;

namespace {

const std::map<std::string, std::string> kBuiltinPrompts = {
#include "builtin_prompts.inc"
};

bool is_retryable_status(int status) { return status == 429 || status >= 500; }

std::string chat_url(const std::string& endpoint) {
  std::string base = endpoint;
  while (!base.empty() && base.back() == '/') base.pop_back();
  return base + "/chat/completions";
}

std::vector<std::string> template_file_stems(Role role) {
  switch (role) {
    case Role::kParsing: return {"parsing"};
    case Role::kExpert: return {"expert"};
    case Role::kCheck: return {"check"};
    case Role::kOptimize: return {"optimize"};
    case Role::kWriteLikeHuman: return {"write_like_human"};
    case Role::kJudge: return {"judge_a", "judge_e"};
  }
  return {};
}

}  // namespace

std::vector<std::string> PromptTemplate::slots() const {
  std::vector<std::string> out;
  for (const std::string* part : {&system, &user}) {
    std::size_t pos = 0;
    while ((pos = part->find("{{", pos)) != std::string::npos) {
      auto end = part->find("}}", pos + 2);
      if (end == std::string::npos) break;
      std::string name = part->substr(pos + 2, end - pos - 2);
      if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(name);
      pos = end + 2;
    }
  }
  return out;
}

std::pair<std::string, std::string> PromptTemplate::render(const SlotMap& slots) const {
  auto fill = [&](const std::string& text) {
    std::string out;
    std::size_t pos = 0;
    while (true) {
      auto open = text.find("{{", pos);
      if (open == std::string::npos) break;
      auto close = text.find("}}", open + 2);
      if (close == std::string::npos) break;
      std::string name = text.substr(open + 2, close - open - 2);
      auto it = slots.find(name);
      if (it == slots.end()) {
        throw Error(ErrorCode::kTemplate, "unfilled template slot '" + name + "'");
      }
      out.append(text, pos, open - pos);
      out += it->second;
      pos = close + 2;
    }
    out.append(text, pos, std::string::npos);
    return out;
  };
  return {fill(system), fill(user)};
}

PromptTemplate PromptTemplate::parse(const std::string& text) {
  PromptTemplate t;
  std::string* current = nullptr;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    if (line == "### system") {
      current = &t.system;
    } else if (line == "### user") {
      current = &t.user;
    } else if (current) {
      if (!current->empty()) *current += '\n';
      *current += line;
    }
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  // Drop the trailing newline a text file usually ends with.
  for (std::string* s : {&t.system, &t.user}) {
    while (!s->empty() && s->back() == '\n') s->pop_back();
  }
  if (t.system.empty() && t.user.empty()) t.user = text;
  return t;
}

const std::map<std::string, std::string>& builtin_prompt_files() { return kBuiltinPrompts; }

std::map<std::string, PromptTemplate> default_templates(
    Role role, const std::optional<std::filesystem::path>& prompt_dir) {
  std::map<std::string, PromptTemplate> out;
  auto stems = template_file_stems(role);
  for (const auto& stem : stems) {
    std::string text;
    if (prompt_dir && std::filesystem::exists(*prompt_dir / (stem + ".txt"))) {
      text = read_file(*prompt_dir / (stem + ".txt"));
    } else {
      text = kBuiltinPrompts.at(stem);
    }
    auto tmpl = PromptTemplate::parse(text);
    if (stem == "judge_a") out["a_score"] = tmpl;
    if (stem == "judge_e") out["e_score"] = tmpl;
    if (!out.count("default")) out["default"] = tmpl;
  }
  return out;
}

std::chrono::milliseconds scheduled_delay(const RetryPolicy& policy, int retry) {
  double ms = static_cast<double>(policy.base_delay.count()) * std::pow(policy.factor, retry);
  ms = std::min(ms, static_cast<double>(policy.max_delay.count()));
  return std::chrono::milliseconds(static_cast<std::int64_t>(ms));
}

InFlightLimiter::InFlightLimiter(int limit) : limit_(std::max(1, limit)) {}

void InFlightLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [&] { return active_ < limit_; });
  ++active_;
}

void InFlightLimiter::release() {
  {
    std::lock_guard lock(mu_);
    --active_;
  }
  cv_.notify_one();
}

json to_json(const Transcript& t) {
  json attempts = json::array();
  for (const auto& a : t.attempts) {
    attempts.push_back({{"status", a.status},
                        {"error", a.error},
                        {"backoff_ms", a.backoff_ms},
                        {"scheduled_ms", a.scheduled_ms}});
  }
  json j = {{"call_id", t.call_id},
            {"role", to_string(t.role)},
            {"model", t.model},
            {"template", t.template_name},
            {"request", t.request},
            {"response", t.response},
            {"started_at", t.started_at},
            {"finished_at", t.finished_at},
            {"retry_count", t.retry_count},
            {"attempts", attempts},
            {"ok", t.ok},
            {"error", t.error}};
  if (t.usage) j["usage"] = *t.usage;
  return j;
}

TranscriptSink::TranscriptSink(std::filesystem::path path) : path_(std::move(path)) {}

void TranscriptSink::record(const Transcript& t) {
  std::lock_guard lock(mu_);
  records_.push_back(t);
  if (path_) {
    std::ofstream out(*path_, std::ios::app | std::ios::binary);
    out << to_json(t).dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
}

std::vector<Transcript> TranscriptSink::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t TranscriptSink::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

std::uint64_t TranscriptSink::next_call_id() {
  std::lock_guard lock(mu_);
  return next_id_++;
}

AgentHandle make_stub_handle(Role role, std::shared_ptr<Transport> transport,
                             std::string model_name) {
  AgentHandle h;
  h.role = role;
  h.endpoint = "stub";
  h.model_name = std::move(model_name);
  h.templates = default_templates(role);
  h.transport = std::move(transport);
  h.sink = std::make_shared<TranscriptSink>();
  h.sleeper = [](std::chrono::milliseconds) {};
  return h;
}

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone: return "none";
    case FailureKind::kTemplate: return "template";
    case FailureKind::kClientError: return "client_error";
    case FailureKind::kMalformedResponse: return "malformed_response";
    case FailureKind::kExhausted: return "exhausted";
  }
  return "?";
}

RetriedPost post_with_retry(Transport& transport, const HttpRequest& req,
                            const RetryPolicy& policy, const Sleeper& sleeper,
                            std::uint64_t jitter_seed) {
  RetriedPost out;
  Rng jitter(mix64(jitter_seed ^ fnv1a64(req.body)));
  const int max_attempts = std::max(1, policy.max_attempts);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    HttpResponse resp = transport.post(req);
    AttemptRecord rec;
    rec.status = resp.status;
    rec.error = resp.timed_out ? "timeout" : resp.error;

    if (resp.status >= 200 && resp.status < 300) {
      out.attempts.push_back(rec);
      out.response = std::move(resp);
      return out;
    }
    const bool retryable = resp.timed_out || resp.status == 0 || is_retryable_status(resp.status);
    if (!retryable) {
      out.attempts.push_back(rec);
      out.failure = FailureKind::kClientError;
      out.error = "HTTP " + std::to_string(resp.status) +
                  (resp.body.empty() ? "" : ": " + resp.body.substr(0, 200));
      out.response = std::move(resp);
      return out;
    }
    if (attempt + 1 == max_attempts) {
      out.attempts.push_back(rec);
      out.failure = FailureKind::kExhausted;
      out.error = "gave up after " + std::to_string(max_attempts) + " attempts; last: " +
                  (resp.timed_out ? std::string("timeout")
                                  : resp.status ? "HTTP " + std::to_string(resp.status)
                                                : resp.error);
      out.response = std::move(resp);
      return out;
    }
    auto cap = scheduled_delay(policy, attempt);
    auto delay = std::chrono::milliseconds(static_cast<std::int64_t>(
        std::floor(uniform_unit(jitter) * static_cast<double>(cap.count()))));
    rec.scheduled_ms = cap.count();
    rec.backoff_ms = delay.count();
    out.attempts.push_back(rec);
    if (sleeper) {
      sleeper(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
  }
  return out;
}

DispatchResult dispatch(const AgentHandle& handle, const SlotMap& slots,
                        const std::string& template_name) {
  auto tmpl_it = handle.templates.find(template_name);
  if (tmpl_it == handle.templates.end()) {
    throw Error(ErrorCode::kTemplate, "no template named '" + template_name + "' for role " +
                                          std::string(to_string(handle.role)));
  }
  auto [system_text, user_text] = tmpl_it->second.render(slots);
  if (!handle.transport) {
    throw Error(ErrorCode::kConfig, "agent handle for role " +
                                        std::string(to_string(handle.role)) +
                                        " has no transport");
  }

  json payload = {{"model", handle.model_name},
                  {"messages", json::array({{{"role", "system"}, {"content", system_text}},
                                            {{"role", "user"}, {"content", user_text}}})},
                  {"temperature", handle.temperature},
                  {"max_tokens", handle.max_tokens}};

  HttpRequest req;
  req.url = chat_url(handle.endpoint);
  req.body = payload.dump();
  req.headers["Content-Type"] = "application/json";
  if (!handle.api_key.empty()) req.headers["Authorization"] = "Bearer " + handle.api_key;
  req.timeout = handle.timeout;
  req.role = handle.role;
  req.template_name = template_name;
  req.slots = &slots;

  DispatchResult result;
  Transcript& t = result.transcript;
  t.call_id = handle.sink ? handle.sink->next_call_id() : 0;
  t.role = handle.role;
  t.model = handle.model_name;
  t.template_name = template_name;
  t.request = payload;
  t.started_at = log::utc_timestamp();

  if (handle.limiter) handle.limiter->acquire();
  RetriedPost sent = post_with_retry(*handle.transport, req, handle.retry, handle.sleeper,
                                     handle.jitter_seed);
  t.attempts = std::move(sent.attempts);
  t.retry_count = static_cast<int>(t.attempts.size()) - 1;
  const HttpResponse& resp = sent.response;
  if (sent.failure != FailureKind::kNone) {
    result.failure = sent.failure;
    result.error = std::move(sent.error);
  } else {
    json body = json::parse(resp.body, nullptr, false);
    std::string content;
    bool have = false;
    if (body.is_object() && body.contains("choices") && body["choices"].is_array() &&
        !body["choices"].empty()) {
      const auto& msg = body["choices"][0]["message"];
      if (msg.is_object() && msg.contains("content") && msg["content"].is_string()) {
        content = msg["content"].get<std::string>();
        have = true;
      }
    }
    if (have) {
      result.ok = true;
      result.text = std::move(content);
      t.response = body;
      if (body.contains("usage")) t.usage = body["usage"];
    } else {
      result.failure = FailureKind::kMalformedResponse;
      result.error = "response has no assistant content";
      t.response = body.is_discarded() ? json(resp.body) : body;
    }
  }
  if (handle.limiter) handle.limiter->release();

  t.ok = result.ok;
  t.error = result.error;
  t.finished_at = log::utc_timestamp();
  if (handle.sink) handle.sink->record(t);
  return result;
}

std::vector<DispatchResult> dispatch_batch(const AgentHandle& handle,
                                           const std::vector<SlotMap>& slot_maps,
                                           int max_in_flight,
                                           const std::string& template_name) {
  require(max_in_flight >= 1, "max_in_flight must be >= 1", ErrorCode::kInvalidArgument);
  std::vector<DispatchResult> results(slot_maps.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < slot_maps.size(); i = next++) {
      try {
        results[i] = dispatch(handle, slot_maps[i], template_name);
      } catch (const Error& e) {
        results[i].ok = false;
        results[i].failure = FailureKind::kTemplate;
        results[i].error = e.what();
      }
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), slot_maps.size());
  if (workers <= 1) {
    worker();
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  return results;
}

std::optional<json> extract_json_object(const std::string& text) {
  for (std::size_t start = text.find('{'); start != std::string::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escape = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      char c = text[i];
      if (in_string) {
        if (escape) {
          escape = false;
        } else if (c == '\\') {
          escape = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          json j = json::parse(text.substr(start, i - start + 1), nullptr, false);
          if (!j.is_discarded() && j.is_object()) return j;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

namespace {

std::optional<double> in_range(double x) {
  if (!std::isfinite(x) || x < 0.0 || x > 10.0) return std::nullopt;
  return x;
}

std::optional<double> strict_number(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return std::nullopt;
  const auto e = s.find_last_not_of(" \t\r\n");
  const std::string t = s.substr(b, e - b + 1);
  char* end = nullptr;
  double x = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) return std::nullopt;
  return x;
}

}  // namespace

std::optional<double> parse_score_reply(const std::string& text) {
  if (auto bare = strict_number(text)) return in_range(*bare);
  auto obj = extract_json_object(text);
  if (!obj || !obj->contains("score")) return std::nullopt;
  const auto& v = (*obj)["score"];
  if (v.is_number()) return in_range(v.get<double>());
  if (v.is_string()) {
    if (auto x = strict_number(v.get<std::string>())) return in_range(*x);
  }
  return std::nullopt;
}

}  // namespace curator::gateway
