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

#include "curator/pipeline/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <memory>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"

namespace curator::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) {
      throw Error(ErrorCode::kIo, "SHA-256 unavailable");
    }
  }
  void update(const char* data, std::size_t n) { EVP_DigestUpdate(ctx_.get(), data, n); }
  std::string hex() {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_.get(), md, &len);
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
      out += digits[md[i] >> 4];
      out += digits[md[i] & 0xF];
    }
    return out;
  }

 private:
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

std::string file_sha256(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + p.string());
  Sha256 h;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    h.update(buf, static_cast<std::size_t>(in.gcount()));
  }
  return h.hex();
}

json refs_to_json(const std::vector<FileRef>& refs) {
  json a = json::array();
  for (const auto& r : refs) a.push_back({{"name", r.name}, {"path", r.path}, {"sha256", r.sha256}});
  return a;
}

std::vector<FileRef> refs_from_json(const json& a) {
  std::vector<FileRef> out;
  for (const auto& r : a) {
    out.push_back({r.at("name").get<std::string>(), r.at("path").get<std::string>(),
                   r.at("sha256").get<std::string>()});
  }
  return out;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  Sha256 h;
  h.update(bytes.data(), bytes.size());
  return h.hex();
}

std::string path_digest(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    std::vector<std::pair<std::string, fs::path>> files;
    for (const auto& e : fs::recursive_directory_iterator(p)) {
      if (e.is_regular_file()) files.emplace_back(fs::relative(e.path(), p).generic_string(), e.path());
    }
    std::sort(files.begin(), files.end());
    std::string listing;
    for (const auto& [rel, full] : files) listing += rel + "\t" + file_sha256(full) + "\n";
    return sha256_hex(listing);
  }
  if (!fs::is_regular_file(p, ec)) throw Error(ErrorCode::kIo, "no such input: " + p.string());
  return file_sha256(p);
}

json to_json(const RunManifest& m) {
  return {{"run_id", m.run_id},
          {"stage", m.stage},
          {"inputs", refs_to_json(m.inputs)},
          {"outputs", refs_to_json(m.outputs)},
          {"config", m.config},
          {"started_at", m.started_at},
          {"finished_at", m.finished_at},
          {"counts",
           {{"in", m.counts.in}, {"out", m.counts.out}, {"dropped", m.counts.dropped},
            {"parked", m.counts.parked}}},
          {"noop", m.noop}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest m;
  try {
    m.run_id = j.at("run_id").get<std::string>();
    m.stage = j.at("stage").get<std::string>();
    m.inputs = refs_from_json(j.at("inputs"));
    m.outputs = refs_from_json(j.at("outputs"));
    m.config = j.at("config");
    m.started_at = j.at("started_at").get<std::string>();
    m.finished_at = j.at("finished_at").get<std::string>();
    const auto& c = j.at("counts");
    m.counts = {c.at("in").get<std::size_t>(), c.at("out").get<std::size_t>(),
                c.at("dropped").get<std::size_t>(), c.at("parked").get<std::size_t>()};
    m.noop = j.value("noop", false);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kValidation, std::string("run manifest: ") + e.what());
  }
  return m;
}

std::string make_run_id(const std::string& stage, const std::vector<FileRef>& inputs,
                        const json& config) {
  json key = {{"stage", stage}, {"inputs", refs_to_json(inputs)}, {"config", config}};
  return sha256_hex(key.dump()).substr(0, 16);
}

RunLog::RunLog(fs::path file) : file_(std::move(file)) {}

std::vector<RunManifest> RunLog::load() const {
  std::vector<RunManifest> out;
  if (!fs::exists(file_)) return out;
  for (const auto& j : read_jsonl(file_)) out.push_back(manifest_from_json(j));
  return out;
}

void RunLog::append(const RunManifest& m) const {
  if (file_.has_parent_path()) fs::create_directories(file_.parent_path());
  std::ofstream out(file_, std::ios::app | std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + file_.string());
  out << to_json(m).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + file_.string());
}

std::optional<RunManifest> RunLog::find_reusable(const std::string& stage,
                                                 const std::vector<FileRef>& inputs,
                                                 const json& config,
                                                 const std::vector<std::string>& output_paths) const {
  const auto all = load();
  for (auto it = all.rbegin(); it != all.rend(); ++it) {
    const RunManifest& m = *it;
    if (m.stage != stage || m.inputs != inputs || m.config != config) continue;
    std::vector<std::string> paths;
    for (const auto& o : m.outputs) paths.push_back(o.path);
    if (paths != output_paths) continue;
    bool intact = true;
    for (const auto& o : m.outputs) {
      std::error_code ec;
      if (!fs::is_regular_file(o.path, ec) || path_digest(o.path) != o.sha256) {
        intact = false;
        break;
      }
    }
    if (intact) return m;
    return std::nullopt;  // the newest matching run was disturbed; recompute
  }
  return std::nullopt;
}

}  // namespace curator::pipeline
