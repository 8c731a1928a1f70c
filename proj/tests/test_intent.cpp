#include <catch2/catch_amalgamated.hpp>

#include "zspace/intent.hpp"

using namespace zspace;

TEST_CASE("normalize_terms collapses synonyms and deduplicates") {
  SynonymDictionary dict;
  dict.insert("voucher", "coupon");
  CHECK(normalize_terms(dict, {"Voucher", "coupon"}) == std::vector<std::string>{"coupon"});
  CHECK(normalize_terms(dict, {}).empty());
  CHECK(normalize_terms(dict, {"widget"}) == std::vector<std::string>{"widget"});
}

TEST_CASE("normalize_terms is idempotent") {
  const SynonymDictionary dict = default_synonyms();
  Rng rng(63);
  std::vector<std::string> pool{"Voucher", "coupon", "ORDER", "purchase", "widget",
                                "Item",    "stock",  "stock", "generate", "thing"};
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> terms;
    for (size_t t = 0; t < rng.below(8); ++t) terms.push_back(rng.pick(pool));
    const auto once = normalize_terms(dict, terms);
    CHECK(normalize_terms(dict, once) == once);
  }
}

TEST_CASE("synonym dictionary is idempotent, chains included") {
  SynonymDictionary dict;
  dict.insert("a", "b");
  dict.insert("b", "c");
  CHECK(dict.canonical("a") == "c");
  CHECK(dict.canonical(dict.canonical("a")) == dict.canonical("a"));
  const SynonymDictionary defaults = default_synonyms();
  for (const auto& [term, target] : defaults.entries()) {
    CHECK(defaults.canonical(target) == target);
  }
}

TEST_CASE("single clause parse") {
  const RuleBasedParser parser;
  const ParsedIntent intent = parser.parse("create a test coupon");
  CHECK(intent.operation == Operation::create);
  CHECK(intent.target_object == "coupon");
  CHECK(intent.category == "data generation");
  REQUIRE(intent.plan.steps.size() == 1);
  CHECK(intent.plan.steps[0].role == StepRole::core);
  CHECK(intent.plan.steps[0].depends_on.empty());
}

TEST_CASE("golden multi-step sentence splits into four chained steps") {
  const RuleBasedParser parser;
  const ParsedIntent intent = parser.parse(
      "Create a test product, place an order using account 123456, and advance the "
      "order status to pending payment");
  CHECK(intent.operation == Operation::create);
  CHECK(intent.target_object == "product");

  const auto& steps = intent.plan.steps;
  REQUIRE(steps.size() == 4);
  CHECK(steps[0].description == "Create a test product");
  CHECK(steps[0].role == StepRole::core);
  CHECK(steps[1].description == "query account information");
  CHECK(steps[1].role == StepRole::auxiliary);
  CHECK(steps[2].description == "place an order using account 123456");
  CHECK(steps[2].role == StepRole::core);
  CHECK(steps[3].description == "advance the order status to pending payment");
  CHECK(steps[3].role == StepRole::core);

  // Linear dependency chain.
  CHECK(steps[0].depends_on.empty());
  for (size_t i = 1; i < steps.size(); ++i) {
    REQUIRE(steps[i].depends_on.size() == 1);
    CHECK(steps[i].depends_on[0] == steps[i - 1].id);
  }
}

TEST_CASE("dative object injects an auxiliary lookup ahead of the core step") {
  const RuleBasedParser parser;
  const ParsedIntent intent = parser.parse("issue a coupon to the user");
  REQUIRE(intent.plan.steps.size() == 2);
  CHECK(intent.plan.steps[0].role == StepRole::auxiliary);
  CHECK(intent.plan.steps[0].target == "user");
  CHECK(intent.plan.steps[1].role == StepRole::core);
  CHECK(intent.plan.steps[1].target == "coupon");
  CHECK(intent.operation == Operation::create);
}

TEST_CASE("lookup verbs in non-final clauses become auxiliary") {
  const RuleBasedParser parser;
  const ParsedIntent intent =
      parser.parse("query the order status, then update the order");
  REQUIRE(intent.plan.steps.size() == 2);
  CHECK(intent.plan.steps[0].role == StepRole::auxiliary);
  CHECK(intent.plan.steps[1].role == StepRole::core);

  // A trailing lookup stays core.
  const ParsedIntent single = parser.parse("query the order status");
  REQUIRE(single.plan.steps.size() == 1);
  CHECK(single.plan.steps[0].role == StepRole::core);
}

TEST_CASE("keywords are normalized, stopword free and deduplicated") {
  const RuleBasedParser parser;
  const ParsedIntent intent = parser.parse("Create the voucher and the voucher again");
  for (const auto& kw : intent.keywords) {
    CHECK(default_lexicons().stopwords.count(kw) == 0);
  }
  CHECK(std::count(intent.keywords.begin(), intent.keywords.end(), "coupon") == 1);
  CHECK(std::count(intent.keywords.begin(), intent.keywords.end(), "voucher") == 0);
}

TEST_CASE("empty queries are rejected") {
  const RuleBasedParser parser;
  CHECK_THROWS_AS(parser.parse(""), EmptyQueryError);
  CHECK_THROWS_AS(parser.parse("   \t "), EmptyQueryError);
}

TEST_CASE("parser determinism") {
  const RuleBasedParser parser;
  const std::string query = "create a draft coupon, then verify the coupon of the order";
  const ParsedIntent a = parser.parse(query);
  const ParsedIntent b = parser.parse(query);
  REQUIRE(a.plan.steps.size() == b.plan.steps.size());
  for (size_t i = 0; i < a.plan.steps.size(); ++i) {
    CHECK(a.plan.steps[i].description == b.plan.steps[i].description);
    CHECK(a.plan.steps[i].keywords == b.plan.steps[i].keywords);
  }
  CHECK(a.keywords == b.keywords);
}

TEST_CASE("build_tree mirrors the plan") {
  const RuleBasedParser parser;
  const ParsedIntent one = parser.parse("create a test coupon");
  const IntentTree t1 = build_tree(one);
  REQUIRE(t1.root.children.size() == 1);

  const ParsedIntent chain =
      parser.parse("create a product, update the product, delete the product");
  const IntentTree t3 = build_tree(chain);
  REQUIRE(t3.root.children.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(t3.root.children[i].intent.query_text == chain.plan.steps[i].description);
    CHECK(t3.root.children[i].role == chain.plan.steps[i].role);
  }
}

TEST_CASE("cyclic or malformed plans are rejected") {
  ParsedIntent intent;
  intent.query_text = "x";
  PlanStep a;
  a.id = "s1";
  a.depends_on = {"s1"};
  intent.plan.steps = {a};
  CHECK_THROWS_AS(build_tree(intent), CyclicPlanError);

  PlanStep fwd;
  fwd.id = "s1";
  fwd.depends_on = {"s2"};
  PlanStep later;
  later.id = "s2";
  intent.plan.steps = {fwd, later};
  CHECK_THROWS_AS(validate_plan(intent.plan), CyclicPlanError);
}

namespace {

class BrokenProvider final : public IntentProvider {
 public:
  explicit BrokenProvider(bool throws) : throws_(throws) {}
  ParsedIntent parse(std::string_view query) override {
    if (throws_) throw ProviderError("timeout");
    ParsedIntent intent;
    intent.query_text = std::string(query);
    PlanStep s;
    s.id = "s1";
    s.depends_on = {"s1"};  // violates acyclicity
    intent.plan.steps = {s};
    return intent;
  }

 private:
  bool throws_;
};

class AgreeingProvider final : public IntentProvider {
 public:
  ParsedIntent parse(std::string_view query) override {
    return RuleBasedParser().parse(query);
  }
};

}  // namespace

TEST_CASE("provider fallback engages on errors and invariant violations") {
  const RuleBasedParser fallback;

  BrokenProvider throwing(true);
  const ParsedIntent a = parse_with_fallback(&throwing, "query order status", fallback);
  CHECK(a.operation == Operation::query);

  BrokenProvider cyclic(false);
  const ParsedIntent b = parse_with_fallback(&cyclic, "query order status", fallback);
  CHECK(b.plan.steps.size() == 1);
  CHECK(b.plan.steps[0].depends_on.empty());

  AgreeingProvider fine;
  const ParsedIntent c = parse_with_fallback(&fine, "query order status", fallback);
  CHECK(c.operation == Operation::query);
}

TEST_CASE("plan acyclicity holds over random clause permutations") {
  const RuleBasedParser parser;
  const std::vector<std::string> clauses = {
      "create a draft coupon", "query the order status", "update the product",
      "issue a coupon to the user", "delete the archived invoice"};
  std::vector<size_t> order{0, 1, 2, 3, 4};
  do {
    std::string query;
    for (size_t i : order) {
      if (!query.empty()) query += ", ";
      query += clauses[i];
    }
    const ParsedIntent intent = parser.parse(query);
    CHECK_NOTHROW(validate_plan(intent.plan));
    CHECK(intent.plan.steps.size() >= clauses.size());
  } while (std::next_permutation(order.begin(), order.end()));
}

TEST_CASE("lexicon files round trip against the built-in defaults") {
  const std::string dir = ZSPACE_DATA_DIR;
  const Lexicons defaults = default_lexicons();
  CHECK(load_word_list(dir + "/stopwords.txt") == defaults.stopwords);
  CHECK(load_verb_lexicon(dir + "/verbs.txt") == defaults.verbs);
  CHECK(load_word_list(dir + "/nouns.txt") == defaults.nouns);

  const SynonymDictionary dict = SynonymDictionary::load(dir + "/synonyms.json");
  CHECK(dict.entries() == default_synonyms().entries());
}
