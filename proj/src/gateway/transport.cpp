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

#include "curator/gateway/transport.hpp"

#include <cstdio>
#include <thread>

#include <json.hpp>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/random.hpp"

namespace curator::gateway {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Role, std::string_view>, 6> kRoleNames = {{
    {Role::kParsing, "parsing"},
    {Role::kExpert, "expert"},
    {Role::kCheck, "check"},
    {Role::kOptimize, "optimize"},
    {Role::kWriteLikeHuman, "write_like_human"},
    {Role::kJudge, "judge"},
}};

std::string chat_completion_body(const std::string& text) {
  json body = {{"id", "stub"},
               {"object", "chat.completion"},
               {"choices", json::array({{{"index", 0},
                                         {"message", {{"role", "assistant"}, {"content", text}}},
                                         {"finish_reason", "stop"}}})}};
  return body.dump();
}

std::string slot(const HttpRequest& req, const char* name) {
  if (!req.slots) return {};
  auto it = req.slots->find(name);
  return it == req.slots->end() ? std::string{} : it->second;
}

std::string one_decimal(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", v);
  return buf;
}

}  // namespace

std::string_view to_string(Role role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "?";
}

Role parse_role(std::string_view s) {
  for (const auto& [r, name] : kRoleNames) {
    if (name == s) return r;
  }
  throw Error(ErrorCode::kConfig, "unknown agent role '" + std::string(s) + "'");
}

StubTransport::StubTransport(StubResponder responder, std::chrono::milliseconds latency)
    : responder_(std::move(responder)), latency_(latency) {}

std::shared_ptr<StubTransport> StubTransport::fixed(std::string reply) {
  return std::make_shared<StubTransport>(
      [reply = std::move(reply)](const HttpRequest&, std::uint64_t) { return StubReply::ok(reply); });
}

std::shared_ptr<StubTransport> StubTransport::scripted(std::vector<StubReply> schedule) {
  require(!schedule.empty(), "scripted stub needs at least one reply", ErrorCode::kInvalidArgument);
  return std::make_shared<StubTransport>(
      [schedule = std::move(schedule)](const HttpRequest&, std::uint64_t i) {
        return schedule[std::min<std::uint64_t>(i, schedule.size() - 1)];
      });
}

std::shared_ptr<StubTransport> StubTransport::seeded(std::uint64_t seed) {
  return std::make_shared<StubTransport>(
      [seed](const HttpRequest& req, std::uint64_t) { return seeded_reply(seed, req); });
}

HttpResponse StubTransport::post(const HttpRequest& request) {
  const std::uint64_t index = calls_++;
  const int now = ++in_flight_;
  int peak = peak_.load();
  while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
  }
  if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
  StubReply reply = responder_(request, index);
  --in_flight_;

  HttpResponse resp;
  if (reply.timeout) {
    resp.timed_out = true;
    resp.error = "timeout";
    return resp;
  }
  resp.status = reply.status;
  if (reply.status >= 200 && reply.status < 300) {
    resp.body = chat_completion_body(reply.text);
  } else {
    resp.body = reply.text.empty() ? json{{"error", {{"code", reply.status}}}}.dump() : reply.text;
  }
  return resp;
}

std::shared_ptr<ReplayTransport> ReplayTransport::from_lines(const std::vector<std::string>& lines) {
  auto t = std::make_shared<ReplayTransport>();
  for (const auto& line : lines) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    require(!rec.is_discarded() && rec.is_object(), "malformed transcript line");
    std::string key = rec.at("request").dump();
    HttpResponse resp;
    if (rec.value("ok", false) && !rec["response"].is_null()) {
      resp.status = 200;
      resp.body = rec["response"].dump();
    } else {
      int status = 0;
      if (rec.contains("attempts") && !rec["attempts"].empty()) {
        status = rec["attempts"].back().value("status", 0);
      }
      resp.status = status;
      if (status == 0) resp.timed_out = true;
    }
    t->recorded_[key].push_back(std::move(resp));
  }
  return t;
}

std::shared_ptr<ReplayTransport> ReplayTransport::from_file(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  std::string contents = read_file(path);
  std::size_t pos = 0;
  while (pos < contents.size()) {
    auto eol = contents.find('\n', pos);
    lines.push_back(contents.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos));
    if (eol == std::string::npos) break;
    pos = eol + 1;
  }
  return from_lines(lines);
}

HttpResponse ReplayTransport::post(const HttpRequest& request) {
  std::lock_guard lock(mu_);
  auto it = recorded_.find(request.body);
  if (it == recorded_.end() || it->second.empty()) {
    HttpResponse resp;
    resp.status = 404;
    resp.body = "no recorded response for request";
    return resp;
  }
  std::size_t& cursor = cursor_[request.body];
  const HttpResponse& resp = it->second[std::min(cursor, it->second.size() - 1)];
  ++cursor;
  return resp;
}

StubReply seeded_reply(std::uint64_t seed, const HttpRequest& req) {
  const std::uint64_t h = mix64(seed ^ fnv1a64(req.body));
  switch (req.role) {
    case Role::kCheck: {
      json scores = json::object();
      json reasons = json::object();
      const char* dims[] = {"accuracy", "completeness", "relevance", "usefulness"};
      std::uint64_t x = h;
      for (const char* d : dims) {
        x = mix64(x);
        scores[d] = 5.0 + static_cast<double>(x % 51) / 10.0;
        reasons[d] = std::string("stub assessment of ") + d;
      }
      return StubReply::ok(json{{"scores", scores}, {"reasons", reasons}}.dump());
    }
    case Role::kOptimize: {
      char tag[24];
      std::snprintf(tag, sizeof(tag), "%04x", static_cast<unsigned>(h & 0xffff));
      std::string out = slot(req, "output");
      out += "\n\nFurther detail: the answer above is extended with supporting reasoning (rev " +
             std::string(tag) + ").";
      return StubReply::ok(json{{"input", slot(req, "input")}, {"output", out}}.dump());
    }
    case Role::kJudge: {
      double score = 4.0 + static_cast<double>(h % 61) / 10.0;
      return StubReply::ok(
          json{{"score", std::stod(one_decimal(score))}, {"reason", "stub judgement"}}.dump());
    }
    case Role::kWriteLikeHuman: {
      std::string ref = slot(req, "reference");
      auto cut = ref.find('.');
      return StubReply::ok("In my experience, " +
                           (cut == std::string::npos ? ref : ref.substr(0, cut + 1)));
    }
    case Role::kParsing:
      return StubReply::ok(slot(req, "text"));
    case Role::kExpert:
      break;
  }
  char tag[24];
  std::snprintf(tag, sizeof(tag), "%016llx", static_cast<unsigned long long>(h));
  return StubReply::ok("Answer [" + std::string(tag) + "]: " + slot(req, "question"));
}

}  // namespace curator::gateway
