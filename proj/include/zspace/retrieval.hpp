#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "zspace/embedder.hpp"
#include "zspace/errors.hpp"
#include "zspace/fsww.hpp"
#include "zspace/intent.hpp"
#include "zspace/registry.hpp"
#include "zspace/vec.hpp"

namespace zspace {

struct RankedTool {
  std::string name;
  double semantic_score = 0.0;   // cosine in [-1, 1]
  double heuristic_score = 0.0;  // raw tag/name score, >= 0
  double combined_score = 0.0;
  int rank = 0;
};

struct RetrievalConfig {
  int top_k = 5;
  double heuristic_weight = 0.2;
  FsswConfig fsww;
  bool use_fsww = true;
};

// Exact cosine against every tool embedding; no approximation. Results
// follow registry (name) order.
inline std::vector<std::pair<std::string, double>> score_semantic(
    const Vector& query_vec, const ToolRegistry& reg) {
  if (reg.empty()) throw EmptyRegistryError();
  std::vector<std::pair<std::string, double>> out;
  out.reserve(reg.size());
  for (const auto& [name, rec] : reg.tools()) {
    out.emplace_back(name, cosine(query_vec, rec.embedding));
  }
  return out;
}

// Tag-overlap heuristic: +1 per intent keyword found in entityTags, +1
// per keyword in capabilityTags, +2 when the target object occurs in the
// tool name. Everything compares in normalized (lowercase) form.
inline std::vector<std::pair<std::string, double>> score_heuristic(
    const ParsedIntent& intent, const ToolRegistry& reg) {
  const std::string target = normalize_tag(intent.target_object);
  std::vector<std::pair<std::string, double>> out;
  out.reserve(reg.size());
  for (const auto& [name, rec] : reg.tools()) {
    double score = 0.0;
    for (const auto& kw : intent.keywords) {
      if (std::find(rec.entity_tags.begin(), rec.entity_tags.end(), kw) !=
          rec.entity_tags.end()) {
        score += 1.0;
      }
      if (std::find(rec.capability_tags.begin(), rec.capability_tags.end(), kw) !=
          rec.capability_tags.end()) {
        score += 1.0;
      }
    }
    if (!target.empty() && normalize_tag(name).find(target) != std::string::npos) {
      score += 2.0;
    }
    out.emplace_back(name, score);
  }
  return out;
}

namespace detail {

inline void sort_and_rank(std::vector<RankedTool>& ranked, int top_k) {
  std::sort(ranked.begin(), ranked.end(), [](const RankedTool& a, const RankedTool& b) {
    if (a.combined_score != b.combined_score) return a.combined_score > b.combined_score;
    return a.name < b.name;
  });
  if (top_k >= 0 && ranked.size() > size_t(top_k)) ranked.resize(size_t(top_k));
  for (size_t i = 0; i < ranked.size(); ++i) ranked[i].rank = int(i) + 1;
}

// Narrow a whole-query intent down to one plan step. The heuristic track
// then scores against the step's own keywords and target.
inline ParsedIntent step_view(const ParsedIntent& intent, const PlanStep& step) {
  ParsedIntent view = intent;
  if (!step.keywords.empty()) view.keywords = step.keywords;
  if (!step.target.empty()) view.target_object = step.target;
  view.query_text = step.description;
  return view;
}

}  // namespace detail

// Heuristic-only ranking over the whole registry. This is the selection
// rule of the full-injection baseline in the eval harness.
inline std::vector<RankedTool> rank_by_heuristic(const ParsedIntent& intent,
                                                 const ToolRegistry& reg, int top_k) {
  const auto heur = score_heuristic(intent, reg);
  std::vector<RankedTool> ranked;
  ranked.reserve(heur.size());
  for (const auto& [name, h] : heur) {
    RankedTool rt;
    rt.name = name;
    rt.heuristic_score = h;
    rt.combined_score = h;
    ranked.push_back(std::move(rt));
  }
  detail::sort_and_rank(ranked, top_k);
  return ranked;
}

// Dual-track retrieval for one plan step (or the whole query when `step`
// is null). The statement vector comes from the step description; with
// use_fsww it is replaced by the keyword-enhanced vector before scoring.
inline std::vector<RankedTool> retrieve(const ParsedIntent& intent, const PlanStep* step,
                                        const ToolRegistry& reg, const RetrievalConfig& cfg,
                                        const TextEmbedder& embedder) {
  if (cfg.top_k < 1) throw Error("retrieval: top_k must be >= 1");
  if (reg.empty()) throw EmptyRegistryError();
  if (reg.dim() != embedder.dim()) throw DimMismatchError(reg.dim(), embedder.dim());

  const ParsedIntent view = step ? detail::step_view(intent, *step) : intent;
  Vector statement = embedder.embed(view.query_text);
  if (cfg.use_fsww && !view.keywords.empty()) {
    std::vector<Vector> kw_vecs;
    kw_vecs.reserve(view.keywords.size());
    for (const auto& kw : view.keywords) kw_vecs.push_back(embedder.embed(kw));
    statement = fsww_enhance(statement, kw_vecs, cfg.fsww).output;
  }

  const auto sem = score_semantic(statement, reg);
  const auto heur = score_heuristic(view, reg);

  double hmax = 0.0;
  for (const auto& [name, h] : heur) hmax = std::max(hmax, h);
  const double hdenom = hmax > 0.0 ? hmax : 1.0;

  std::vector<RankedTool> ranked;
  ranked.reserve(sem.size());
  for (size_t i = 0; i < sem.size(); ++i) {
    RankedTool rt;
    rt.name = sem[i].first;
    rt.semantic_score = sem[i].second;
    rt.heuristic_score = heur[i].second;
    rt.combined_score = (1.0 - cfg.heuristic_weight) * rt.semantic_score +
                        cfg.heuristic_weight * (rt.heuristic_score / hdenom);
    ranked.push_back(std::move(rt));
  }
  detail::sort_and_rank(ranked, cfg.top_k);
  return ranked;
}

// JSON-lines rendering used by the `query` subcommand.
inline std::string ranked_to_json_lines(const std::vector<RankedTool>& ranked) {
  std::string out;
  for (const auto& rt : ranked) {
    out += "{\"rank\":" + std::to_string(rt.rank) + ",\"name\":";
    out += nlohmann::json(rt.name).dump();
    out += ",\"semantic\":" + format_double17(rt.semantic_score);
    out += ",\"heuristic\":" + format_double17(rt.heuristic_score);
    out += ",\"combined\":" + format_double17(rt.combined_score);
    out += "}\n";
  }
  return out;
}

}  // namespace zspace
