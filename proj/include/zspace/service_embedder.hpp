#pragma once

#include <memory>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "zspace/embedder.hpp"
#include "zspace/errors.hpp"

namespace zspace {

// Client for an external embedding service:
//   POST {endpoint}  {"text": "..."}  ->  {"embedding": [f, ...]}
// A fresh connection per call keeps concurrent embed calls independent.
class ServiceEmbedder final : public TextEmbedder {
 public:
  ServiceEmbedder(std::string endpoint, size_t dim, int timeout_sec = 10)
      : dim_(dim), timeout_sec_(timeout_sec) {
    const auto scheme_end = endpoint.find("://");
    const size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = endpoint.find('/', host_start);
    if (path_start == std::string::npos) {
      base_ = endpoint;
      path_ = "/";
    } else {
      base_ = endpoint.substr(0, path_start);
      path_ = endpoint.substr(path_start);
    }
  }

  size_t dim() const override { return dim_; }

  Vector embed(std::string_view text) const override {
    std::string trimmed(text);
    if (tokenize(trimmed).empty()) throw EmptyTextError();

    httplib::Client client(base_);
    client.set_connection_timeout(timeout_sec_, 0);
    client.set_read_timeout(timeout_sec_, 0);

    const nlohmann::json body = {{"text", trimmed}};
    const auto res = client.Post(path_, body.dump(), "application/json");
    if (!res) throw ServiceError("no response from " + base_ + path_);
    if (res->status < 200 || res->status >= 300) {
      throw ServiceError("status " + std::to_string(res->status));
    }
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("bad response body: ") + e.what());
    }
    if (!j.contains("embedding") || !j["embedding"].is_array()) {
      throw ServiceError("response missing 'embedding' array");
    }
    Vector v;
    for (const auto& e : j["embedding"]) {
      if (!e.is_number()) throw ServiceError("non-numeric embedding entry");
      v.push_back(e.get<double>());
    }
    if (v.size() != dim_) {
      throw ServiceError("expected dim " + std::to_string(dim_) + ", got " +
                         std::to_string(v.size()));
    }
    return normalize(v);
  }

 private:
  size_t dim_;
  int timeout_sec_;
  std::string base_;
  std::string path_;
};

inline std::unique_ptr<TextEmbedder> make_embedder(const EmbedderSpec& spec) {
  if (spec.kind == EmbedderKind::external_service) {
    return std::make_unique<ServiceEmbedder>(spec.endpoint, spec.dim);
  }
  return std::make_unique<DeterministicEmbedder>(spec.dim, spec.seed);
}

inline Vector embed_text(const EmbedderSpec& spec, std::string_view text) {
  return make_embedder(spec)->embed(text);
}

}  // namespace zspace
