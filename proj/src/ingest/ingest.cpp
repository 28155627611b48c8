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

#include "curator/ingest/ingest.hpp"

#include <algorithm>

#include "curator/core/error.hpp"
#include "curator/core/jsonl.hpp"
#include "curator/core/log.hpp"
#include "curator/core/parallel.hpp"
#include "curator/core/utf8.hpp"

namespace curator::ingest {

namespace fs = std::filesystem;

namespace {

bool is_text_file(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".md" || ext == ".txt" || ext == ".markdown";
}

struct Sidecar {
  std::map<std::string, std::string> meta;
  Bibliography bibliography;
};

Sidecar read_sidecar(const fs::path& file) {
  Sidecar sc;
  fs::path side = file;
  side += ".meta.json";
  if (!fs::exists(side)) return sc;
  auto j = nlohmann::json::parse(read_file(side), nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    log::warn("ignoring malformed sidecar " + side.string());
    return sc;
  }
  auto as_string = [](const nlohmann::json& v) {
    return v.is_string() ? v.get<std::string>() : v.dump();
  };
  for (const auto& [k, v] : j.items()) {
    if (k == "meta" && v.is_object()) {
      for (const auto& [mk, mv] : v.items()) sc.meta[mk] = as_string(mv);
    } else if (k == "bibliography" && v.is_object()) {
      for (const auto& [bk, bv] : v.items()) sc.bibliography[bk] = as_string(bv);
    } else if (!v.is_object() && !v.is_array()) {
      sc.meta[k] = as_string(v);
    }
  }
  return sc;
}

struct Loaded {
  std::optional<Document> doc;
  NormalizationReport report;
  std::string skip_reason;
};

}  // namespace

IngestResult ingest_directory(const fs::path& root, Source source, const std::string& subdomain,
                              const IngestOptions& options) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) {
    throw Error(ErrorCode::kIo, "ingest root is not a readable directory: " + root.string());
  }
  std::vector<fs::path> files;
  fs::recursive_directory_iterator it(root, fs::directory_options::skip_permission_denied, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot read " + root.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.is_regular_file() && is_text_file(entry.path())) files.push_back(entry.path());
  }
  std::vector<std::string> rel(files.size());
  for (std::size_t i = 0; i < files.size(); ++i) {
    rel[i] = fs::relative(files[i], root).generic_string();
  }
  std::vector<std::size_t> order(files.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return rel[a] < rel[b]; });

  const TokenCounter& counter = options.tokens ? *options.tokens : default_token_counter();
  std::vector<Loaded> loaded(files.size());
  parallel_for(order.size(), [&](std::size_t k) {
    const std::size_t i = order[k];
    Loaded& out = loaded[k];
    std::string raw;
    try {
      raw = read_file(files[i]);
    } catch (const Error& e) {
      out.skip_reason = e.what();
      return;
    }
    if (raw.find('\0') != std::string::npos) {
      out.skip_reason = "contains NUL bytes";
      return;
    }
    if (!is_valid_utf8(raw)) {
      out.skip_reason = "not valid UTF-8";
      return;
    }
    Sidecar sc = read_sidecar(files[i]);
    Document doc;
    doc.id = rel[i];
    doc.source = source;
    doc.subdomain = subdomain;
    doc.meta = std::move(sc.meta);
    if (options.normalize) {
      auto norm = normalize_markdown(raw, sc.bibliography.empty() ? nullptr : &sc.bibliography);
      doc.text = std::move(norm.text);
      out.report = norm.report;
    } else {
      doc.text = std::move(raw);
    }
    doc.token_count = counter.count(doc.text);
    out.doc = std::move(doc);
  });

  IngestResult result;
  for (std::size_t k = 0; k < order.size(); ++k) {
    Loaded& l = loaded[k];
    if (!l.doc) {
      log::warn("skipping " + rel[order[k]] + ": " + l.skip_reason);
      result.skipped.push_back({rel[order[k]], l.skip_reason});
      continue;
    }
    result.reports.push_back({l.doc->id, l.report});
    result.corpus.documents.push_back(std::move(*l.doc));
  }
  result.corpus = recompute_stats(std::move(result.corpus));
  return result;
}

FilteredCorpus apply_filter(const Corpus& corpus, const std::vector<DocumentReport>& reports,
                            const FilterPolicy& policy) {
  std::vector<FilterDecision> decisions(corpus.documents.size());
  parallel_for(corpus.documents.size(),
               [&](std::size_t i) { decisions[i] = filter_content(corpus.documents[i], policy); });
  FilteredCorpus out;
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    const Document& doc = corpus.documents[i];
    DocumentReport rep{doc.id, {}};
    if (i < reports.size() && reports[i].doc_id == doc.id) rep = reports[i];
    if (decisions[i].keep) {
      out.kept.documents.push_back(doc);
    } else {
      rep.report.dropped_reason = decisions[i].reason;
      out.dropped.emplace_back(doc.id, decisions[i]);
    }
    out.reports.push_back(std::move(rep));
  }
  out.kept = recompute_stats(std::move(out.kept));
  return out;
}

nlohmann::json to_json(const DocumentReport& r) {
  nlohmann::json j = {{"doc_id", r.doc_id},
                      {"images_reduced", r.report.images_reduced},
                      {"tables_converted", r.report.tables_converted},
                      {"formulas_converted", r.report.formulas_converted},
                      {"citations_annotated", r.report.citations_annotated}};
  j["dropped_reason"] = r.report.dropped_reason
                            ? nlohmann::json(std::string(to_string(*r.report.dropped_reason)))
                            : nlohmann::json(nullptr);
  return j;
}

}  // namespace curator::ingest
