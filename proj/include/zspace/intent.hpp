#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "zspace/embedder.hpp"
#include "zspace/errors.hpp"

namespace zspace {

enum class Operation { create, query, update, del };

inline std::string to_string(Operation op) {
  switch (op) {
    case Operation::create: return "create";
    case Operation::query: return "query";
    case Operation::update: return "update";
    case Operation::del: return "delete";
  }
  return "query";
}

enum class StepRole { core, auxiliary };

inline std::string to_string(StepRole r) {
  return r == StepRole::core ? "core" : "auxiliary";
}

struct PlanStep {
  std::string id;
  std::string description;
  std::vector<std::string> depends_on;
  StepRole role = StepRole::core;
  std::vector<std::string> keywords;
  std::string target;  // first noun of the step, when one exists
};

struct ExecutionPlan {
  std::vector<PlanStep> steps;
};

struct ParsedIntent {
  std::string category;
  Operation operation = Operation::query;
  std::string target_object;
  std::vector<std::string> keywords;
  ExecutionPlan plan;
  std::string query_text;
};

struct IntentNode {
  ParsedIntent intent;
  StepRole role = StepRole::core;
  std::vector<IntentNode> children;
};

struct IntentTree {
  IntentNode root;
};

// term -> canonical term. Chains are collapsed on insert so the mapping
// is idempotent by construction.
class SynonymDictionary {
 public:
  SynonymDictionary() = default;

  void insert(std::string term, std::string target) {
    canonical_[lower(term)] = canonical(lower(target));
    // Re-point older entries that led to `term`.
    for (auto& [k, v] : canonical_) v = resolve(v);
  }

  std::string canonical(const std::string& term) const { return resolve(lower(term)); }

  const std::map<std::string, std::string>& entries() const { return canonical_; }

  static SynonymDictionary from_json(const nlohmann::json& j) {
    SynonymDictionary dict;
    for (const auto& [k, v] : j.items()) {
      dict.insert(k, v.get<std::string>());
    }
    return dict;
  }

  static SynonymDictionary load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open synonym dictionary '" + path + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(1, e.what());
    }
    return from_json(j);
  }

 private:
  static std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  std::string resolve(std::string term) const {
    for (int hops = 0; hops < 8; ++hops) {
      const auto it = canonical_.find(term);
      if (it == canonical_.end() || it->second == term) return term;
      term = it->second;
    }
    return term;
  }

  std::map<std::string, std::string> canonical_;
};

// Lowercase, map through the dictionary, deduplicate keeping first occurrence.
inline std::vector<std::string> normalize_terms(const SynonymDictionary& dict,
                                                const std::vector<std::string>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) {
    std::string c = dict.canonical(t);
    if (c.empty()) continue;
    if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(std::move(c));
  }
  return out;
}

struct Lexicons {
  std::set<std::string> stopwords;
  std::map<std::string, Operation> verbs;
  std::set<std::string> nouns;
};

inline Lexicons default_lexicons() {
  Lexicons lex;
  lex.stopwords = {
      "a", "an", "the", "this", "that", "these", "those", "to", "for", "of",
      "in", "on", "at", "by", "with", "from", "as", "is", "are", "was",
      "were", "be", "been", "being", "it", "its", "and", "then", "please",
      "kindly", "now", "just", "simply", "also", "really", "soon", "do",
      "does", "did", "can", "could", "should", "would", "will", "shall",
      "may", "might", "must", "i", "we", "you", "they", "me", "us", "them",
      "my", "our", "your", "their", "up", "some", "any", "new"};
  const std::pair<const char*, Operation> verbs[] = {
      {"create", Operation::create}, {"generate", Operation::create},
      {"make", Operation::create},   {"build", Operation::create},
      {"issue", Operation::create},  {"place", Operation::create},
      {"add", Operation::create},    {"register", Operation::create},
      {"query", Operation::query},   {"get", Operation::query},
      {"find", Operation::query},    {"fetch", Operation::query},
      {"look", Operation::query},    {"lookup", Operation::query},
      {"list", Operation::query},    {"retrieve", Operation::query},
      {"check", Operation::query},   {"validate", Operation::query},
      {"verify", Operation::query},  {"export", Operation::query},
      {"pull", Operation::query},    {"extract", Operation::query},
      {"tweak", Operation::update},
      {"update", Operation::update}, {"advance", Operation::update},
      {"set", Operation::update},    {"modify", Operation::update},
      {"change", Operation::update}, {"assign", Operation::update},
      {"delete", Operation::del},    {"remove", Operation::del},
      {"cancel", Operation::del},    {"drop", Operation::del}};
  for (const auto& [v, op] : verbs) lex.verbs[v] = op;
  lex.nouns = {"product",  "order",    "coupon",   "user",        "account",
               "customer", "inventory", "shipment", "invoice",     "refund",
               "campaign", "subscription", "warehouse", "wallet",  "review",
               "catalog",  "cart",     "ticket",   "address"};
  return lex;
}

inline SynonymDictionary default_synonyms() {
  SynonymDictionary dict;
  const std::pair<const char*, const char*> pairs[] = {
      {"voucher", "coupon"},        {"purchase", "order"},
      {"item", "product"},          {"profile", "account"},
      {"bill", "invoice"},          {"parcel", "shipment"},
      {"stock", "inventory"},       {"reimbursement", "refund"},
      {"promotion", "campaign"},    {"client", "customer"},
      {"membership", "subscription"}, {"depot", "warehouse"},
      {"rating", "review"},         {"listing", "catalog"},
      {"basket", "cart"},           {"generate", "create"},
      {"make", "create"},           {"build", "create"},
      {"issue", "create"},          {"place", "create"},
      {"add", "create"},            {"register", "create"},
      {"fetch", "query"},           {"get", "query"},
      {"find", "query"},            {"retrieve", "query"},
      {"lookup", "query"},          {"list", "query"},
      {"check", "query"},           {"modify", "update"},
      {"advance", "update"},        {"change", "update"},
      {"set", "update"},            {"assign", "update"},
      {"remove", "delete"},         {"cancel", "delete"},
      {"drop", "delete"}};
  for (const auto& [a, b] : pairs) dict.insert(a, b);
  return dict;
}

inline std::set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon '" + path + "'");
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const auto toks = tokenize(line);
    if (!toks.empty()) out.insert(toks.front());
  }
  return out;
}

// One entry per line: "<verb> <operation>".
inline std::map<std::string, Operation> load_verb_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open verb lexicon '" + path + "'");
  std::map<std::string, Operation> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError(line_no, "expected '<verb> <operation>'");
    Operation op;
    if (toks[1] == "create") op = Operation::create;
    else if (toks[1] == "query") op = Operation::query;
    else if (toks[1] == "update") op = Operation::update;
    else if (toks[1] == "delete") op = Operation::del;
    else throw ParseError(line_no, "unknown operation '" + toks[1] + "'");
    out[toks[0]] = op;
  }
  return out;
}

// Plan sanity shared by the parser, the tree builder and the provider
// fallback: unique ids, dependencies only on earlier-declared steps.
inline void validate_plan(const ExecutionPlan& plan) {
  std::set<std::string> seen;
  for (const auto& step : plan.steps) {
    if (step.id.empty()) throw CyclicPlanError("step with empty id");
    if (!seen.insert(step.id).second) {
      throw CyclicPlanError("duplicate step id '" + step.id + "'");
    }
    for (const auto& dep : step.depends_on) {
      if (dep == step.id) throw CyclicPlanError("step '" + step.id + "' depends on itself");
      if (!seen.count(dep)) {
        throw CyclicPlanError("step '" + step.id + "' depends on '" + dep +
                              "' which is not declared earlier");
      }
    }
  }
}

inline void validate_intent(const ParsedIntent& intent) {
  for (const auto& kw : intent.keywords) {
    if (kw.empty()) throw Error("intent keyword must be non-empty");
    for (char c : kw) {
      if (std::isupper(static_cast<unsigned char>(c))) {
        throw Error("intent keyword '" + kw + "' is not lowercase");
      }
    }
  }
  validate_plan(intent.plan);
}

// Deterministic rule-based parser: verb lexicon picks the operation,
// noun lexicon the target object, clauses split on sequence markers
// become plan steps chained linearly. A dative/instrumental marker
// ("to|for|using" + entity noun) injects an auxiliary lookup step ahead
// of the clause's own step.
class RuleBasedParser {
 public:
  RuleBasedParser() : RuleBasedParser(default_lexicons(), default_synonyms()) {}
  RuleBasedParser(Lexicons lex, SynonymDictionary dict)
      : lex_(std::move(lex)), dict_(std::move(dict)) {}

  const Lexicons& lexicons() const { return lex_; }
  const SynonymDictionary& synonyms() const { return dict_; }

  ParsedIntent parse(std::string_view query) const {
    const std::string text = trim(query);
    if (text.empty()) throw EmptyQueryError();
    const auto all_tokens = tokenize(text);
    if (all_tokens.empty()) throw EmptyQueryError();

    ParsedIntent intent;
    intent.query_text = text;
    intent.operation = pick_operation(all_tokens);
    intent.target_object = pick_target(all_tokens);
    intent.keywords = keywords_of(all_tokens);
    intent.category = intent.operation == Operation::query ? "query" : "data generation";

    const auto clauses = split_clauses(text);
    int next_id = 1;
    std::string prev_id;
    for (size_t ci = 0; ci < clauses.size(); ++ci) {
      const auto& clause = clauses[ci];
      const auto tokens = tokenize(clause);
      if (tokens.empty()) continue;
      const std::string target = pick_target(tokens);

      for (const auto& noun : lookup_triggers(tokens, target)) {
        PlanStep aux;
        aux.id = "s" + std::to_string(next_id++);
        aux.description = "query " + noun + " information";
        aux.role = StepRole::auxiliary;
        aux.keywords = keywords_of(tokenize(aux.description));
        aux.target = noun;
        if (!prev_id.empty()) aux.depends_on.push_back(prev_id);
        prev_id = aux.id;
        intent.plan.steps.push_back(std::move(aux));
      }

      PlanStep step;
      step.id = "s" + std::to_string(next_id++);
      step.description = clause;
      step.keywords = keywords_of(tokens);
      step.target = target;
      const Operation op = pick_operation(tokens);
      const bool lookup_feeding_later =
          op == Operation::query && ci + 1 < clauses.size();
      step.role = lookup_feeding_later ? StepRole::auxiliary : StepRole::core;
      if (!prev_id.empty()) step.depends_on.push_back(prev_id);
      prev_id = step.id;
      intent.plan.steps.push_back(std::move(step));
    }

    validate_plan(intent.plan);
    return intent;
  }

  // Raw-text clause segmentation on commas/semicolons, numbered list
  // markers, and "and"/"then" followed by a verb.
  std::vector<std::string> split_clauses(const std::string& text) const {
    std::vector<std::string> words;
    {
      std::istringstream in(text);
      std::string w;
      while (in >> w) words.push_back(w);
    }
    std::vector<std::string> clauses;
    std::vector<std::string> cur;
    auto flush = [&]() {
      if (cur.empty()) return;
      std::string joined;
      for (size_t i = 0; i < cur.size(); ++i) {
        if (i) joined += ' ';
        joined += cur[i];
      }
      clauses.push_back(joined);
      cur.clear();
    };

    for (size_t i = 0; i < words.size(); ++i) {
      std::string w = words[i];
      const bool ends_clause = !w.empty() && (w.back() == ',' || w.back() == ';');
      while (!w.empty() && (w.back() == ',' || w.back() == ';')) w.pop_back();

      if (is_number_marker(w)) {
        flush();
        continue;
      }
      const auto toks = tokenize(w);
      const std::string low = toks.empty() ? std::string() : toks.front();
      if ((low == "and" || low == "then") && verb_follows(words, i + 1)) {
        flush();
        continue;
      }
      if (!w.empty()) cur.push_back(w);
      if (ends_clause) flush();
    }
    flush();
    return clauses;
  }

 private:
  static std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
  }

  static bool is_number_marker(const std::string& w) {
    // "1." "2)" "(3)"
    size_t i = 0;
    if (i < w.size() && w[i] == '(') ++i;
    size_t digits = 0;
    while (i < w.size() && std::isdigit(static_cast<unsigned char>(w[i]))) {
      ++i;
      ++digits;
    }
    if (digits == 0 || i >= w.size()) return false;
    return w[i] == '.' || w[i] == ')';
  }

  bool verb_follows(const std::vector<std::string>& words, size_t from) const {
    for (size_t i = from; i < words.size() && i < from + 3; ++i) {
      const auto toks = tokenize(words[i]);
      if (toks.empty()) continue;
      const std::string& t = toks.front();
      if (t == "and" || t == "then") continue;
      if (lex_.stopwords.count(t) && !lex_.verbs.count(t)) continue;
      return lex_.verbs.count(t) > 0;
    }
    return false;
  }

  Operation pick_operation(const std::vector<std::string>& tokens) const {
    for (const auto& t : tokens) {
      auto it = lex_.verbs.find(t);
      if (it == lex_.verbs.end()) it = lex_.verbs.find(dict_.canonical(t));
      if (it != lex_.verbs.end()) return it->second;
    }
    return Operation::query;
  }

  std::string pick_target(const std::vector<std::string>& tokens) const {
    for (const auto& t : tokens) {
      const std::string c = dict_.canonical(t);
      if (lex_.nouns.count(c)) return c;
    }
    return {};
  }

  std::vector<std::string> keywords_of(const std::vector<std::string>& tokens) const {
    std::vector<std::string> filtered;
    for (const auto& t : tokens) {
      if (!lex_.stopwords.count(t)) filtered.push_back(t);
    }
    return normalize_terms(dict_, filtered);
  }

  // Entity nouns reached through "to|for|using", skipping articles.
  std::vector<std::string> lookup_triggers(const std::vector<std::string>& tokens,
                                           const std::string& clause_target) const {
    static const std::set<std::string> markers{"to", "for", "using"};
    static const std::set<std::string> articles{"the", "a", "an", "this", "that"};
    std::vector<std::string> out;
    for (size_t i = 0; i + 1 < tokens.size(); ++i) {
      if (!markers.count(tokens[i])) continue;
      size_t j = i + 1;
      while (j < tokens.size() && articles.count(tokens[j])) ++j;
      if (j >= tokens.size()) continue;
      const std::string c = dict_.canonical(tokens[j]);
      if (!lex_.nouns.count(c) || c == clause_target) continue;
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
    return out;
  }

  Lexicons lex_;
  SynonymDictionary dict_;
};

// External implementations (an LLM-backed service, say) plug in here.
class IntentProvider {
 public:
  virtual ~IntentProvider() = default;
  virtual ParsedIntent parse(std::string_view query) = 0;
};

// Providers that fail or return invariant-violating intents fall back
// to the rule-based parser.
inline ParsedIntent parse_with_fallback(IntentProvider* provider, std::string_view query,
                                        const RuleBasedParser& fallback) {
  if (provider) {
    try {
      ParsedIntent intent = provider->parse(query);
      validate_intent(intent);
      return intent;
    } catch (const std::exception&) {
      // fall through
    }
  }
  return fallback.parse(query);
}

inline IntentTree build_tree(const ParsedIntent& intent) {
  validate_plan(intent.plan);
  IntentTree tree;
  tree.root.intent = intent;
  tree.root.role = StepRole::core;
  for (const auto& step : intent.plan.steps) {
    IntentNode child;
    child.role = step.role;
    child.intent.category = intent.category;
    child.intent.operation = intent.operation;
    child.intent.target_object = step.target.empty() ? intent.target_object : step.target;
    child.intent.keywords = step.keywords;
    child.intent.query_text = step.description;
    tree.root.children.push_back(std::move(child));
  }
  return tree;
}

}  // namespace zspace
