#pragma once

#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "zspace/embedder.hpp"
#include "zspace/errors.hpp"
#include "zspace/hash.hpp"
#include "zspace/intent.hpp"
#include "zspace/registry.hpp"
#include "zspace/retrieval.hpp"

namespace zspace {

inline constexpr uint64_t kDefaultEvalSeed = 23;

struct Instruction {
  std::string text;
  std::vector<std::string> expected_tools;  // one per step, in order
};

struct SyntheticScenario {
  ToolRegistry tools;
  std::vector<Instruction> instructions;
  uint64_t seed = 0;
  EmbedderSpec espec;
};

// Whitespace token count; the deterministic stand-in for a tokenizer.
inline int token_cost(std::string_view text) {
  int count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool ws = c == ' ' || c == '\t' || c == '\n' || c == '\r';
    if (!ws && !in_token) ++count;
    in_token = !ws;
  }
  return count;
}

// Largest-remainder allocation of `n` items over percentage proportions.
inline std::vector<int> step_count_allocation(int n, const std::vector<double>& props) {
  double total = 0.0;
  for (double p : props) total += p;
  std::vector<int> counts(props.size(), 0);
  std::vector<std::pair<double, size_t>> remainders;
  int assigned = 0;
  for (size_t i = 0; i < props.size(); ++i) {
    const double exact = n * props[i] / total;
    counts[i] = int(std::floor(exact));
    assigned += counts[i];
    remainders.emplace_back(-(exact - counts[i]), i);
  }
  std::sort(remainders.begin(), remainders.end());
  for (int r = 0; r < n - assigned; ++r) {
    counts[remainders[size_t(r) % remainders.size()].second] += 1;
  }
  return counts;
}

namespace gen {

struct Entity {
  const char* canonical;
  const char* variant;  // lexical variant used in instruction text
};

inline const std::vector<Entity>& entities() {
  static const std::vector<Entity> v = {
      {"coupon", "voucher"},       {"order", "purchase"},
      {"product", "item"},         {"account", "profile"},
      {"invoice", "bill"},         {"shipment", "parcel"},
      {"inventory", "stock"},      {"refund", "reimbursement"},
      {"campaign", "promotion"},   {"customer", "client"},
      {"subscription", "membership"}, {"warehouse", "depot"},
      {"wallet", "wallet"},        {"review", "rating"},
      {"catalog", "listing"},      {"cart", "basket"}};
  return v;
}

struct Capability {
  const char* canonical;
  const char* variant;
};

inline const std::vector<Capability>& capabilities() {
  static const std::vector<Capability> v = {
      {"create", "generate"}, {"query", "pull"},      {"update", "tweak"},
      {"delete", "remove"},   {"validate", "verify"}, {"export", "extract"}};
  return v;
}

inline const std::vector<std::string>& qualifiers() {
  static const std::vector<std::string> v = {"batch",   "draft",    "bulk",
                                             "express", "archived", "priority"};
  return v;
}

inline const std::vector<std::string>& environments() {
  static const std::vector<std::string> v = {"staging", "production", "sandbox", "qa"};
  return v;
}

// Filler drawn from the parser's stopword list, so the keyword track
// never sees it while the raw statement embedding does.
inline const std::vector<std::string>& padding() {
  static const std::vector<std::string> v = {"please", "kindly", "now",  "just",
                                             "simply", "also",   "soon", "really"};
  return v;
}

// Per-step-index noise schedule. Later steps lose qualifiers, swap more
// surface forms and pick up more filler, which is what produces the
// accuracy decay over instruction depth. Rates are applied stratified:
// round(rate * bucket size) instructions get the mutation at that step.
inline double verb_swap_rate(int s) { return 0.10 + 0.11 * s; }
inline double entity_swap_rate(int s) { return 0.08 + 0.15 * s; }
inline double qualifier_drop_rate(int s) { return 0.05 + 0.16 * s; }
inline double context_mention_rate(int s) { return s == 0 ? 0.0 : std::min(0.9, 0.05 + 0.07 * s); }
inline int padding_count(int s) { return 3 + 2 * s; }

}  // namespace gen

// Deterministic synthetic corpus: tools enumerate shuffled
// (capability, entity, qualifier) combinations; instructions are
// clause-joined templates whose ground-truth tools are known by
// construction. Step-count mix follows 40/30/15/10/3/2 percent.
inline SyntheticScenario generate_scenario(int n_tools, int n_instructions, uint64_t seed,
                                           const EmbedderSpec& espec = {}) {
  if (n_tools < 1 || n_instructions < 1) {
    throw Error("scenario needs at least one tool and one instruction");
  }
  SyntheticScenario scn;
  scn.seed = seed;
  scn.espec = espec;
  const DeterministicEmbedder embedder(espec.dim, espec.seed);

  Rng rng(seed);
  struct Combo {
    size_t cap, ent, qual;
  };
  std::vector<Combo> combos;
  for (size_t c = 0; c < gen::capabilities().size(); ++c) {
    for (size_t e = 0; e < gen::entities().size(); ++e) {
      for (size_t q = 0; q < gen::qualifiers().size(); ++q) {
        combos.push_back({c, e, q});
      }
    }
  }
  rng.shuffle(combos);

  std::vector<std::string> tool_names;
  for (int i = 0; i < n_tools; ++i) {
    const Combo& combo = combos[size_t(i) % combos.size()];
    const std::string cap = gen::capabilities()[combo.cap].canonical;
    const std::string ent = gen::entities()[combo.ent].canonical;
    const std::string qual = gen::qualifiers()[combo.qual];

    ToolRecord rec;
    rec.name = cap + "_" + ent + "_" + qual;
    if (size_t(i) >= combos.size()) {
      rec.name += "_" + std::to_string(i / combos.size() + 1);
    }
    rec.environment = rng.pick(gen::environments());
    rec.summary = cap + " " + qual + " " + ent + " records for " + qual + " " + ent + " workflows";
    rec.description = "Provides " + cap + " operations for " + qual + " " + ent +
                      " data in the " + rec.environment + " environment";
    rec.entity_tags = {ent};
    if (rng.chance(0.7)) {
      const std::string assoc = gen::entities()[rng.below(gen::entities().size())].canonical;
      if (assoc != ent) rec.entity_tags.push_back(assoc);
    }
    rec.capability_tags = {cap};
    if (rng.chance(0.8)) rec.capability_tags.push_back(qual);
    if (rng.chance(0.4)) rec.capability_tags.push_back(rng.chance(0.5) ? "automation" : "testdata");
    rec.embedding = embedder.embed(tool_embedding_text(rec));

    tool_names.push_back(rec.name);
    scn.tools.register_tool(std::move(rec));
  }

  // Reverse lookup from name to combo for clause construction.
  std::map<std::string, Combo> combo_of;
  for (int i = 0; i < n_tools; ++i) {
    combo_of[tool_names[size_t(i)]] = combos[size_t(i) % combos.size()];
  }

  const std::vector<int> counts = step_count_allocation(n_instructions, {40, 30, 15, 10, 3, 2});
  for (size_t bucket = 0; bucket < counts.size(); ++bucket) {
    const int steps = int(bucket) + 1;
    const int n_inst = counts[bucket];
    if (n_inst == 0) continue;

    std::vector<Instruction> batch(static_cast<size_t>(n_inst));
    for (auto& ins : batch) {
      std::set<size_t> used;
      for (int s = 0; s < steps; ++s) {
        size_t pick = rng.below(tool_names.size());
        for (int probe = 0; probe < 64 && used.count(pick); ++probe) {
          pick = rng.below(tool_names.size());
        }
        used.insert(pick);
        ins.expected_tools.push_back(tool_names[pick]);
      }
    }

    // Stratified mutation masks: exactly round(rate * n) instructions of
    // this bucket mutate at step s.
    auto mask = [&](double rate) {
      std::vector<char> m(size_t(n_inst), 0);
      const int hits = int(std::lround(rate * n_inst));
      std::vector<size_t> order(static_cast<size_t>(n_inst));
      for (size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(order);
      for (int h = 0; h < hits && h < n_inst; ++h) m[order[size_t(h)]] = 1;
      return m;
    };

    for (int s = 0; s < steps; ++s) {
      const auto vmask = mask(gen::verb_swap_rate(s));
      const auto emask = mask(gen::entity_swap_rate(s));
      const auto qmask = mask(gen::qualifier_drop_rate(s));
      const auto cmask = mask(gen::context_mention_rate(s));
      for (int i = 0; i < n_inst; ++i) {
        Instruction& ins = batch[size_t(i)];
        const Combo& combo = combo_of.at(ins.expected_tools[size_t(s)]);
        const auto& cap = gen::capabilities()[combo.cap];
        const auto& ent = gen::entities()[combo.ent];

        std::string clause = vmask[size_t(i)] ? cap.variant : cap.canonical;
        clause += rng.chance(0.5) ? " a " : " the ";
        if (!qmask[size_t(i)]) clause += gen::qualifiers()[combo.qual] + " ";
        clause += emask[size_t(i)] ? ent.variant : ent.canonical;
        if (s > 0 && cmask[size_t(i)]) {
          // Reference an earlier step's object, the way composite
          // instructions lean on prior context.
          const Combo& prev = combo_of.at(ins.expected_tools[size_t(rng.below(size_t(s)))]);
          const std::string prev_ent = gen::entities()[prev.ent].canonical;
          if (prev_ent != std::string(ent.canonical)) {
            clause += " of the " + gen::qualifiers()[prev.qual] + " " + prev_ent;
          }
        }
        for (int p = 0; p < gen::padding_count(s); ++p) {
          clause += " " + rng.pick(gen::padding());
        }

        if (s == 0) {
          clause[0] = char(std::toupper(static_cast<unsigned char>(clause[0])));
          ins.text = clause;
        } else {
          const int joiner = int(rng.below(3));
          if (joiner == 0) ins.text += ", " + clause;
          else if (joiner == 1) ins.text += " and then " + clause;
          else ins.text += ", then " + clause;
        }
      }
    }
    for (auto& ins : batch) scn.instructions.push_back(std::move(ins));
  }
  return scn;
}

enum class EvalMode { full_injection, plain_rag, fsww };

inline std::string to_string(EvalMode m) {
  switch (m) {
    case EvalMode::full_injection: return "full-injection";
    case EvalMode::plain_rag: return "plain-rag";
    case EvalMode::fsww: return "fsww";
  }
  return "fsww";
}

struct StepRecord {
  int instruction = 0;
  int step = 0;
  int step_count = 0;  // instruction bucket
  std::string expected;
  std::string predicted;
  bool correct = false;
};

struct EvalResult {
  double accuracy = 0.0;
  std::map<int, double> per_step_accuracy;  // bucket -> fraction correct
  std::map<std::string, double> token_cost;  // mode -> mean per instruction
  std::vector<StepRecord> records;
};

// Scores one mode over the scenario. Instructions run concurrently up to
// a worker bound; per-instruction slots keep the result order-independent.
inline EvalResult run_accuracy_eval(const SyntheticScenario& scn, const RetrievalConfig& cfg,
                                    EvalMode mode, int workers = 0) {
  const RuleBasedParser parser;
  const DeterministicEmbedder embedder(scn.espec.dim, scn.espec.seed);
  const size_t n = scn.instructions.size();

  double full_injection_cost = 0.0;
  if (mode == EvalMode::full_injection) {
    for (const auto& [name, rec] : scn.tools.tools()) {
      full_injection_cost += token_cost(rec.description);
    }
  }

  struct Slot {
    std::vector<StepRecord> records;
    double cost = 0.0;
  };
  std::vector<Slot> slots(n);

  auto eval_instruction = [&](size_t i) {
    const Instruction& ins = scn.instructions[i];
    Slot& slot = slots[i];
    const ParsedIntent intent = parser.parse(ins.text);
    const auto& steps = intent.plan.steps;
    const int bucket = int(ins.expected_tools.size());

    if (mode == EvalMode::full_injection) slot.cost = full_injection_cost;

    for (size_t s = 0; s < ins.expected_tools.size(); ++s) {
      StepRecord rec;
      rec.instruction = int(i);
      rec.step = int(s);
      rec.step_count = bucket;
      rec.expected = ins.expected_tools[s];
      if (s < steps.size()) {
        if (mode == EvalMode::full_injection) {
          const auto ranked =
              rank_by_heuristic(detail::step_view(intent, steps[s]), scn.tools, 1);
          if (!ranked.empty()) rec.predicted = ranked.front().name;
        } else {
          RetrievalConfig mode_cfg = cfg;
          mode_cfg.use_fsww = mode == EvalMode::fsww;
          const auto ranked = retrieve(intent, &steps[s], scn.tools, mode_cfg, embedder);
          if (!ranked.empty()) rec.predicted = ranked.front().name;
          for (const auto& rt : ranked) {
            slot.cost += token_cost(scn.tools.find(rt.name)->description);
          }
        }
      }
      rec.correct = rec.predicted == rec.expected;
      slot.records.push_back(std::move(rec));
    }
  };

  int pool = workers > 0 ? workers : int(std::min<unsigned>(8, std::thread::hardware_concurrency()));
  pool = std::max(pool, 1);
  if (pool == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) eval_instruction(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) {
      threads.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          eval_instruction(i);
        }
      });
    }
    for (auto& th : threads) th.join();
  }

  EvalResult result;
  std::map<int, std::pair<int, int>> bucket_counts;  // bucket -> (correct, total)
  int correct = 0;
  int total = 0;
  double cost = 0.0;
  for (const auto& slot : slots) {
    for (const auto& rec : slot.records) {
      ++total;
      correct += rec.correct ? 1 : 0;
      auto& bc = bucket_counts[rec.step_count];
      bc.first += rec.correct ? 1 : 0;
      bc.second += 1;
      result.records.push_back(rec);
    }
    cost += slot.cost;
  }
  result.accuracy = total == 0 ? 0.0 : double(correct) / double(total);
  for (const auto& [bucket, bc] : bucket_counts) {
    result.per_step_accuracy[bucket] = bc.second == 0 ? 0.0 : double(bc.first) / double(bc.second);
  }
  result.token_cost[to_string(mode)] = n == 0 ? 0.0 : cost / double(n);
  return result;
}

inline nlohmann::json trace_to_json(const FsswTrace& trace) {
  nlohmann::ordered_json j;
  j["weights"] = trace.weights;
  j["mean_weight"] = trace.mean_weight;
  j["projection"] = trace.projection ? nlohmann::json(*trace.projection) : nlohmann::json();
  j["centroid"] = trace.centroid ? nlohmann::json(*trace.centroid) : nlohmann::json();
  j["differential"] =
      trace.differential ? nlohmann::json(*trace.differential) : nlohmann::json();
  j["fused"] = trace.fused;
  j["gate"] = trace.gate;
  j["output"] = trace.output;
  j["guard_iterations"] = trace.guard_iterations;
  j["guard_satisfied"] = trace.guard_satisfied;
  j["fusion_degenerate"] = trace.fusion_degenerate;
  return j;
}

// JSONL export for external dimensionality-reduction plotting: one plan
// record per execution (raw and enhanced vectors plus the fusion trace),
// then each referenced tool once.
inline void export_vectors(const SyntheticScenario& scn, const RetrievalConfig& cfg,
                           const std::string& path, int limit = 100) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  const RuleBasedParser parser;
  const DeterministicEmbedder embedder(scn.espec.dim, scn.espec.seed);
  std::vector<std::string> referenced;
  int exported = 0;

  for (size_t i = 0; i < scn.instructions.size() && exported < limit; ++i) {
    const Instruction& ins = scn.instructions[i];
    const ParsedIntent intent = parser.parse(ins.text);
    const auto& steps = intent.plan.steps;
    for (size_t s = 0; s < ins.expected_tools.size() && exported < limit; ++s) {
      if (s >= steps.size()) break;
      const Vector raw = embedder.embed(steps[s].description);
      std::vector<Vector> kw_vecs;
      for (const auto& kw : steps[s].keywords) kw_vecs.push_back(embedder.embed(kw));
      const FsswResult enhanced = fsww_enhance(raw, kw_vecs, cfg.fsww);

      nlohmann::ordered_json j;
      j["kind"] = "plan";
      j["id"] = "p" + std::to_string(i) + "s" + std::to_string(s);
      j["vector"] = raw;
      j["vector_fsww"] = enhanced.output;
      j["matched_id"] = ins.expected_tools[s];
      j["trace"] = trace_to_json(enhanced.trace);
      out << j.dump() << '\n';

      if (std::find(referenced.begin(), referenced.end(), ins.expected_tools[s]) ==
          referenced.end()) {
        referenced.push_back(ins.expected_tools[s]);
      }
      ++exported;
    }
  }

  std::sort(referenced.begin(), referenced.end());
  for (const auto& name : referenced) {
    const ToolRecord* rec = scn.tools.find(name);
    if (!rec) continue;
    nlohmann::ordered_json j;
    j["kind"] = "tool";
    j["id"] = name;
    j["vector"] = rec->embedding;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

struct SweepPoint {
  int n_tools = 0;
  double full_cost = 0.0;
  double fsww_cost = 0.0;
};

// Token-cost scaling across registry sizes (full injection vs selection).
inline std::vector<SweepPoint> token_scaling_sweep(const std::vector<int>& sizes,
                                                   int n_instructions, uint64_t seed,
                                                   const RetrievalConfig& cfg) {
  std::vector<SweepPoint> points;
  for (int n : sizes) {
    const SyntheticScenario scn = generate_scenario(n, n_instructions, seed);
    SweepPoint p;
    p.n_tools = n;
    p.full_cost =
        run_accuracy_eval(scn, cfg, EvalMode::full_injection).token_cost.at("full-injection");
    p.fsww_cost = run_accuracy_eval(scn, cfg, EvalMode::fsww).token_cost.at("fsww");
    points.push_back(p);
  }
  return points;
}

// R^2 of the least-squares line through (x, y).
inline double linear_fit_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = double(n) * sxx - sx * sx;
  if (denom == 0.0) return 0.0;
  const double slope = (double(n) * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / double(n);
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / double(n);
  for (size_t i = 0; i < n; ++i) {
    const double fit = slope * x[i] + intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0.0) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

inline nlohmann::ordered_json eval_summary_json(const SyntheticScenario& scn,
                                                const std::map<std::string, EvalResult>& modes) {
  nlohmann::ordered_json j;
  j["seed"] = scn.seed;
  j["tools"] = scn.tools.size();
  j["instructions"] = scn.instructions.size();
  j["modes"] = nlohmann::ordered_json::object();
  for (const auto& [name, res] : modes) {
    nlohmann::ordered_json m;
    m["accuracy"] = res.accuracy;
    m["token_cost"] = res.token_cost.at(name);
    m["per_step_accuracy"] = nlohmann::ordered_json::object();
    for (const auto& [bucket, acc] : res.per_step_accuracy) {
      m["per_step_accuracy"][std::to_string(bucket)] = acc;
    }
    j["modes"][name] = std::move(m);
  }
  return j;
}

// Accuracy/token table plus per-step decay table, markdown style.
inline std::string eval_summary_markdown(const SyntheticScenario& scn,
                                         const std::map<std::string, EvalResult>& modes) {
  char buf[64];
  auto pct = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.2f", v * 100.0);
    return std::string(buf);
  };
  auto num = [&](double v) {
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::string out = "## Accuracy and token cost (" + std::to_string(scn.tools.size()) +
                    " tools, " + std::to_string(scn.instructions.size()) +
                    " instructions, seed " + std::to_string(scn.seed) + ")\n\n";
  out += "| Method | Accuracy (%) | Token Cost |\n|---|---|---|\n";
  for (const auto& [name, res] : modes) {
    out += "| " + name + " | " + pct(res.accuracy) + " | " + num(res.token_cost.at(name)) +
           " |\n";
  }
  out += "\n## Accuracy by instruction step count\n\n| Steps |";
  for (const auto& [name, res] : modes) out += " " + name + " |";
  out += "\n|---|";
  for (size_t i = 0; i < modes.size(); ++i) out += "---|";
  out += "\n";
  std::set<int> buckets;
  for (const auto& [name, res] : modes) {
    for (const auto& [b, acc] : res.per_step_accuracy) buckets.insert(b);
  }
  for (int b : buckets) {
    out += "| " + std::to_string(b) + " |";
    for (const auto& [name, res] : modes) {
      const auto it = res.per_step_accuracy.find(b);
      out += it == res.per_step_accuracy.end() ? " - |" : " " + pct(it->second) + " |";
    }
    out += "\n";
  }
  return out;
}

}  // namespace zspace
