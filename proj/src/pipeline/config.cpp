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

#include "curator/pipeline/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/random.hpp"

extern char** environ;

namespace curator::pipeline {

namespace fs = std::filesystem;

namespace {

const char* const kProfiles[] = {"parsing", "expert", "check",  "optimize",
                                 "write_like_human", "judge", "strong", "weak"};

std::map<std::string, std::string> default_values() {
  std::map<std::string, std::string> d = {
      {"seed", "42"},
      {"ingest.source", "OAP"},
      {"ingest.subdomain", "general"},
      {"ingest.normalize", "true"},
      {"ingest.filter", "true"},
      {"ingest.filter_policy", ""},
      {"dedup.epsilon", "0.05"},
      {"dedup.k", ""},
      {"dedup.keep", "longest_text"},
      {"dedup.embedding", "hash"},
      {"dedup.dim", "512"},
      {"dedup.embedding_model", "text-embedding"},
      {"dedup.max_iterations", "100"},
      {"refine.percentile", "70"},
      {"refine.dbscan_epsilon", "0.7"},
      {"refine.min_pts", "5"},
      {"refine.m_k", "10"},
      {"refine.target_size", ""},
      {"refine.eps_mode", "distance"},
      {"check.threshold", "7"},
      {"check.threshold_mode", "all_dims"},
      {"check.max_rounds", "10"},
      {"check.max_in_flight", "8"},
      {"check.review_total", "1500"},
      {"tiers.max_in_flight", "4"},
      {"rs.k", "1"},
      {"eval.model", "model"},
      {"eval.judge", "true"},
      {"eval.max_in_flight", "4"},
      {"eval.h_grades", ""},
  };
  for (const char* p : kProfiles) {
    const std::string base = std::string("agent.") + p + ".";
    d[base + "model"] = std::string(p == std::string("strong")  ? "strong-model"
                                    : p == std::string("weak") ? "weak-model"
                                                               : "stub");
    d[base + "temperature"] = "0";
    d[base + "max_tokens"] = "1024";
    d[base + "timeout_ms"] = "60000";
    d[base + "max_attempts"] = "5";
    d[base + "base_delay_ms"] = "1000";
    d[base + "max_delay_ms"] = "60000";
    d[base + "max_in_flight"] = "8";
  }
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string env_name(const std::string& key) {
  std::string n = "CURATOR_";
  for (char c : key) n += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return n;
}

std::string upper(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

}  // namespace

Config Config::defaults() {
  Config c;
  c.values_ = default_values();
  return c;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  it->second = value;
}

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw Error(ErrorCode::kConfig, "unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (v.empty() || end != v.c_str() + v.size() || !std::isfinite(x)) {
    throw Error(ErrorCode::kConfig, key + ": expected a number, got '" + v + "'");
  }
  return x;
}

long long Config::get_int(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || end != v.c_str() + v.size()) {
    throw Error(ErrorCode::kConfig, key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

bool Config::get_bool(const std::string& key) const {
  std::string v = get(key);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kConfig, key + ": expected a boolean, got '" + get(key) + "'");
}

std::uint64_t Config::seed() const {
  const long long s = get_int("seed");
  require(s >= 0, "seed must be non-negative", ErrorCode::kConfig);
  return static_cast<std::uint64_t>(s);
}

nlohmann::json Config::snapshot(const std::vector<std::string>& prefixes) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : values_) {
    bool take = k == "seed";
    for (const auto& p : prefixes) take = take || k.rfind(p, 0) == 0;
    if (take) j[k] = v;
  }
  return j;
}

std::map<std::string, std::string> parse_config_text(const std::string& text,
                                                     const std::string& origin) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      require(t.back() == ']', origin + ":" + std::to_string(lineno) + ": bad section header",
              ErrorCode::kConfig);
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    require(eq != std::string::npos, origin + ":" + std::to_string(lineno) + ": expected key = value",
            ErrorCode::kConfig);
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
      value = value.substr(1, value.size() - 2);
    }
    out[section.empty() ? key : section + "." + key] = value;
  }
  return out;
}

Config Config::layered(const std::optional<fs::path>& file,
                       const std::map<std::string, std::string>& flags,
                       const std::map<std::string, std::string>& env) {
  Config c = defaults();
  if (file) {
    std::string text;
    try {
      text = read_file(*file);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, std::string("cannot read config file: ") + e.what());
    }
    for (const auto& [k, v] : parse_config_text(text, file->string())) c.set(k, v);
  }
  for (const auto& [k, v] : flags) c.set(k, v);
  for (const auto& [k, v] : c.values_) {
    auto it = env.find(env_name(k));
    if (it != env.end()) c.values_[k] = it->second;
  }
  c.validate();
  return c;
}

std::map<std::string, std::string> curator_environment() {
  std::map<std::string, std::string> out;
  for (char** e = environ; e && *e; ++e) {
    std::string kv(*e);
    if (kv.rfind("CURATOR_", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string::npos) continue;
    out[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return out;
}

distiller::DedupConfig dedup_config(const Config& c) {
  distiller::DedupConfig d;
  if (c.has_value("dedup.k")) {
    const long long k = c.get_int("dedup.k");
    require(k >= 1, "dedup.k must be >= 1", ErrorCode::kConfig);
    d.k_clusters = static_cast<int>(k);
  }
  d.epsilon = c.get_double("dedup.epsilon");
  try {
    d.keep_rule = distiller::parse_keep_rule(c.get("dedup.keep"));
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("dedup.keep: ") + e.what());
  }
  d.max_iterations = static_cast<int>(c.get_int("dedup.max_iterations"));
  try {
    d.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  return d;
}

litref::RefineConfig refine_config(const Config& c) {
  litref::RefineConfig r;
  r.percentile = c.get_double("refine.percentile");
  r.dbscan_epsilon = c.get_double("refine.dbscan_epsilon");
  r.min_pts = static_cast<int>(c.get_int("refine.min_pts"));
  r.m_k = static_cast<int>(c.get_int("refine.m_k"));
  if (c.has_value("refine.target_size")) r.target_size = c.get_int("refine.target_size");
  r.eps_mode = litref::parse_eps_mode(c.get("refine.eps_mode"));
  r.validate();
  return r;
}

quality::LoopConfig loop_config(const Config& c) {
  quality::LoopConfig l;
  l.threshold = c.get_double("check.threshold");
  l.threshold_mode = quality::parse_threshold_mode(c.get("check.threshold_mode"));
  l.max_rounds = static_cast<int>(c.get_int("check.max_rounds"));
  l.max_in_flight = static_cast<int>(c.get_int("check.max_in_flight"));
  l.validate();
  return l;
}

ingest::FilterPolicy filter_policy(const Config& c) {
  if (!c.has_value("ingest.filter_policy")) return ingest::FilterPolicy::defaults();
  const fs::path p = c.get("ingest.filter_policy");
  std::string text;
  try {
    text = read_file(p);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("ingest.filter_policy: ") + e.what());
  }
  auto j = nlohmann::json::parse(text, nullptr, false);
  require(!j.is_discarded() && j.is_object(), "ingest.filter_policy: not a JSON object",
          ErrorCode::kConfig);
  return ingest::policy_from_json(j);
}

void Config::validate() const {
  try {
    validate_keys();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, e.what());
  }
}

void Config::validate_keys() const {
  seed();
  parse_source(get("ingest.source"));
  get_bool("ingest.normalize");
  get_bool("ingest.filter");
  dedup_config(*this);
  const std::string emb = get("dedup.embedding");
  require(emb == "hash" || emb == "remote", "dedup.embedding must be hash or remote",
          ErrorCode::kConfig);
  require(get_int("dedup.dim") >= 1, "dedup.dim must be >= 1", ErrorCode::kConfig);
  refine_config(*this);
  loop_config(*this);
  require(get_int("check.review_total") >= 0, "check.review_total must be >= 0", ErrorCode::kConfig);
  require(get_int("tiers.max_in_flight") >= 1, "tiers.max_in_flight must be >= 1", ErrorCode::kConfig);
  require(get_int("rs.k") >= 1, "rs.k must be >= 1", ErrorCode::kConfig);
  get_bool("eval.judge");
  require(get_int("eval.max_in_flight") >= 1, "eval.max_in_flight must be >= 1", ErrorCode::kConfig);
  if (has_value("eval.h_grades")) {
    std::istringstream in(get("eval.h_grades"));
    std::string part;
    while (std::getline(in, part, ',')) {
      const auto colon = part.find(':');
      require(colon != std::string::npos, "eval.h_grades: expected KIND:GRADE pairs",
              ErrorCode::kConfig);
      parse_bench_kind(trim(part.substr(0, colon)));
    }
  }
  for (const char* p : kProfiles) {
    const std::string base = std::string("agent.") + p + ".";
    require(!get(base + "model").empty(), base + "model is empty", ErrorCode::kConfig);
    const double t = get_double(base + "temperature");
    require(t >= 0.0 && t <= 2.0, base + "temperature must be in [0,2]", ErrorCode::kConfig);
    require(get_int(base + "max_tokens") >= 1, base + "max_tokens must be >= 1", ErrorCode::kConfig);
    require(get_int(base + "timeout_ms") >= 1, base + "timeout_ms must be >= 1", ErrorCode::kConfig);
    require(get_int(base + "max_attempts") >= 1, base + "max_attempts must be >= 1",
            ErrorCode::kConfig);
    require(get_int(base + "base_delay_ms") >= 0, base + "base_delay_ms must be >= 0",
            ErrorCode::kConfig);
    require(get_int(base + "max_delay_ms") >= get_int(base + "base_delay_ms"),
            base + "max_delay_ms must be >= base_delay_ms", ErrorCode::kConfig);
    require(get_int(base + "max_in_flight") >= 1, base + "max_in_flight must be >= 1",
            ErrorCode::kConfig);
  }
}

namespace {

std::string env_lookup(const std::map<std::string, std::string>& env, const std::string& profile,
                       const std::string& suffix) {
  auto it = env.find("CURATOR_" + upper(profile) + "_" + suffix);
  if (it != env.end()) return it->second;
  it = env.find("CURATOR_" + suffix);
  return it == env.end() ? std::string() : it->second;
}

}  // namespace

gateway::AgentHandle make_agent(const std::string& profile, const Config& c,
                                const std::map<std::string, std::string>& env,
                                std::shared_ptr<gateway::TranscriptSink> sink) {
  const std::string base = "agent." + profile + ".";
  c.get(base + "model");  // rejects unknown profiles
  gateway::AgentHandle h;
  h.role = (profile == "strong" || profile == "weak") ? gateway::Role::kExpert
                                                      : gateway::parse_role(profile);
  h.model_name = c.get(base + "model");
  h.templates = gateway::default_templates(h.role);
  h.temperature = c.get_double(base + "temperature");
  h.max_tokens = static_cast<int>(c.get_int(base + "max_tokens"));
  h.timeout = std::chrono::milliseconds(c.get_int(base + "timeout_ms"));
  h.retry.max_attempts = static_cast<int>(c.get_int(base + "max_attempts"));
  h.retry.base_delay = std::chrono::milliseconds(c.get_int(base + "base_delay_ms"));
  h.retry.max_delay = std::chrono::milliseconds(c.get_int(base + "max_delay_ms"));
  h.jitter_seed = mix64(c.seed() ^ fnv1a64(profile));
  h.limiter = std::make_shared<gateway::InFlightLimiter>(
      static_cast<int>(c.get_int(base + "max_in_flight")));
  h.sink = std::move(sink);

  const std::string endpoint = env_lookup(env, profile, "BASE_URL");
  if (endpoint.empty() || endpoint == "stub") {
    h.endpoint = "stub";
    h.transport = gateway::StubTransport::seeded(c.seed());
    h.sleeper = [](std::chrono::milliseconds) {};
  } else if (endpoint.rfind("replay:", 0) == 0) {
    h.endpoint = endpoint;
    h.transport = gateway::ReplayTransport::from_file(endpoint.substr(7));
    h.sleeper = [](std::chrono::milliseconds) {};
  } else {
    h.endpoint = endpoint;
    h.api_key = env_lookup(env, profile, "API_KEY");
    h.transport = std::make_shared<gateway::HttpTransport>();
  }
  return h;
}

gateway::EmbeddingEndpoint make_embedding_endpoint(const Config& c,
                                                   const std::map<std::string, std::string>& env,
                                                   std::shared_ptr<gateway::TranscriptSink> sink) {
  gateway::EmbeddingEndpoint e;
  auto it = env.find("CURATOR_EMBEDDING_BASE_URL");
  require(it != env.end() && !it->second.empty(),
          "dedup.embedding = remote needs CURATOR_EMBEDDING_BASE_URL", ErrorCode::kConfig);
  e.base_url = it->second;
  auto key = env.find("CURATOR_EMBEDDING_API_KEY");
  if (key != env.end()) e.api_key = key->second;
  e.model_name = c.get("dedup.embedding_model");
  e.transport = std::make_shared<gateway::HttpTransport>();
  e.sink = std::move(sink);
  return e;
}

}  // namespace curator::pipeline
