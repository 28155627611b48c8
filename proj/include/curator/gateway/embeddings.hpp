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

#include <memory>
#include <string>
#include <vector>

#include "curator/gateway/agent.hpp"

namespace curator::gateway {

// Client for an OpenAI-compatible `/embeddings` endpoint. Holds the only
// endpoint configuration the embedding path ever sees.
struct EmbeddingEndpoint {
  std::string base_url;
  std::string api_key;
  std::string model_name;
  std::chrono::milliseconds timeout{60000};
  RetryPolicy retry;
  std::size_t batch_size = 32;
  std::shared_ptr<Transport> transport;
  std::shared_ptr<TranscriptSink> sink;
  Sleeper sleeper;
};

// One vector per input text, in order. Throws Error(kAgent) when a batch
// fails after retries or the response is malformed.
std::vector<std::vector<double>> embed_texts(const EmbeddingEndpoint& endpoint,
                                             const std::vector<std::string>& texts);

}  // namespace curator::gateway
