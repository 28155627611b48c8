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

#include "curator/gateway/embeddings.hpp"

#include <algorithm>

#include "curator/core/error.hpp"

namespace curator::gateway {

using nlohmann::json;

std::vector<std::vector<double>> embed_texts(const EmbeddingEndpoint& endpoint,
                                             const std::vector<std::string>& texts) {
  require(endpoint.transport != nullptr, "embedding endpoint has no transport",
          ErrorCode::kConfig);
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  std::string base = endpoint.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const std::size_t batch = std::max<std::size_t>(1, endpoint.batch_size);

  for (std::size_t start = 0; start < texts.size(); start += batch) {
    const std::size_t end = std::min(texts.size(), start + batch);
    json payload = {{"model", endpoint.model_name},
                    {"input", std::vector<std::string>(texts.begin() + start, texts.begin() + end)}};
    HttpRequest req;
    req.url = base + "/embeddings";
    req.body = payload.dump();
    req.headers["Content-Type"] = "application/json";
    if (!endpoint.api_key.empty()) req.headers["Authorization"] = "Bearer " + endpoint.api_key;
    req.timeout = endpoint.timeout;

    RetriedPost sent = post_with_retry(*endpoint.transport, req, endpoint.retry,
                                       endpoint.sleeper, 0);
    Transcript t;
    t.call_id = endpoint.sink ? endpoint.sink->next_call_id() : 0;
    t.model = endpoint.model_name;
    t.template_name = "embeddings";
    t.request = payload;
    t.attempts = sent.attempts;
    t.retry_count = static_cast<int>(sent.attempts.size()) - 1;

    auto fail = [&](const std::string& why) {
      t.ok = false;
      t.error = why;
      if (endpoint.sink) endpoint.sink->record(t);
      throw Error(ErrorCode::kAgent, "embedding request for items " + std::to_string(start) +
                                         ".." + std::to_string(end - 1) + " failed: " + why);
    };
    if (sent.failure != FailureKind::kNone) fail(sent.error);

    json body = json::parse(sent.response.body, nullptr, false);
    if (body.is_discarded() || !body.contains("data") || !body["data"].is_array() ||
        body["data"].size() != end - start) {
      fail("malformed embeddings response");
    }
    std::vector<std::vector<double>> rows(end - start);
    for (std::size_t i = 0; i < body["data"].size(); ++i) {
      const auto& item = body["data"][i];
      std::size_t index = item.value("index", i);
      if (index >= rows.size() || !item.contains("embedding")) fail("malformed embeddings item");
      rows[index] = item["embedding"].get<std::vector<double>>();
    }
    t.ok = true;
    t.response = body;
    if (endpoint.sink) endpoint.sink->record(t);
    for (auto& r : rows) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace curator::gateway
