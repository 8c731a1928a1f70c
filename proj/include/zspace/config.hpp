#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "zspace/embedder.hpp"
#include "zspace/errors.hpp"
#include "zspace/orchestrator.hpp"
#include "zspace/retrieval.hpp"

namespace zspace {

struct AppConfig {
  RetrievalConfig retrieval;      // carries the FsswConfig
  OrchestratorConfig orchestrator;
  EmbedderSpec embedder;
};

// Flat key-value JSON document; keys mirror the config struct fields.
inline AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(1, e.what());
  }

  AppConfig cfg;
  auto num = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = j[key].get<double>();
  };
  auto integer = [&](const char* key, int& slot) {
    if (j.contains(key)) slot = j[key].get<int>();
  };

  FsswConfig& f = cfg.retrieval.fsww;
  num("alpha", f.alpha);
  num("beta", f.beta);
  num("gamma", f.gamma);
  num("lambda", f.lambda);
  num("epsilon", f.epsilon);
  num("delta", f.delta);
  integer("max_guard_iters", f.max_guard_iters);
  num("shrink", f.shrink);

  integer("top_k", cfg.retrieval.top_k);
  num("heuristic_weight", cfg.retrieval.heuristic_weight);
  if (j.contains("use_fsww")) cfg.retrieval.use_fsww = j["use_fsww"].get<bool>();

  integer("retry_limit", cfg.orchestrator.retry_limit);
  integer("max_parallel", cfg.orchestrator.max_parallel);
  if (j.contains("step_timeout")) cfg.orchestrator.step_timeout = j["step_timeout"].get<long>();

  if (j.contains("dim")) cfg.embedder.dim = j["dim"].get<size_t>();
  if (j.contains("seed")) cfg.embedder.seed = j["seed"].get<uint64_t>();
  if (j.contains("endpoint")) {
    cfg.embedder.endpoint = j["endpoint"].get<std::string>();
    cfg.embedder.kind = EmbedderKind::external_service;
  }
  return cfg;
}

}  // namespace zspace
