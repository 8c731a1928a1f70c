#include <cstdio>
#include <fstream>

#include <catch2/catch_amalgamated.hpp>

#include "zspace/eval.hpp"

using namespace zspace;

TEST_CASE("token_cost counts whitespace-delimited tokens") {
  CHECK(token_cost("") == 0);
  CHECK(token_cost("a b  c") == 3);
  CHECK(token_cost("  leading and trailing  ") == 3);

  const std::string desc = "one two three four";
  std::string joined;
  for (int i = 0; i < 7; ++i) joined += (i ? " " : "") + desc;
  CHECK(token_cost(joined) == 7 * token_cost(desc));
}

TEST_CASE("token_cost is additive over concatenation") {
  Rng rng(8);
  for (int i = 0; i < 200; ++i) {
    std::string a, b;
    for (size_t w = 0; w < 1 + rng.below(6); ++w) a += (w ? " " : "") + std::string("w");
    for (size_t w = 0; w < 1 + rng.below(6); ++w) b += (w ? " " : "") + std::string("v");
    CHECK(token_cost(a + " " + b) == token_cost(a) + token_cost(b));
  }
}

TEST_CASE("step count allocation follows the 40/30/15/10/3/2 mix") {
  const auto counts = step_count_allocation(100, {40, 30, 15, 10, 3, 2});
  CHECK(counts == std::vector<int>{40, 30, 15, 10, 3, 2});

  const auto small = step_count_allocation(10, {40, 30, 15, 10, 3, 2});
  int total = 0;
  for (int c : small) total += c;
  CHECK(total == 10);
  CHECK(small[0] == 4);
  CHECK(small[1] == 3);
}

TEST_CASE("scenario generation is deterministic and sized as requested") {
  const auto a = generate_scenario(10, 10, 1);
  const auto b = generate_scenario(10, 10, 1);
  REQUIRE(a.tools.size() == 10);
  REQUIRE(a.instructions.size() == 10);
  REQUIRE(b.instructions.size() == a.instructions.size());
  for (size_t i = 0; i < a.instructions.size(); ++i) {
    CHECK(a.instructions[i].text == b.instructions[i].text);
    CHECK(a.instructions[i].expected_tools == b.instructions[i].expected_tools);
  }
  const std::string line_a = registry_line(a.tools.tools().begin()->second);
  const std::string line_b = registry_line(b.tools.tools().begin()->second);
  CHECK(line_a == line_b);
}

TEST_CASE("paper-scale counts work") {
  const auto scn = generate_scenario(541, 280, 7);
  CHECK(scn.tools.size() == 541);
  CHECK(scn.instructions.size() == 280);
}

TEST_CASE("expected tools exist and parsed steps align") {
  const RuleBasedParser parser;
  for (uint64_t seed : {1, 23, 77}) {
    const auto scn = generate_scenario(150, 60, seed);
    for (const auto& ins : scn.instructions) {
      for (const auto& name : ins.expected_tools) {
        REQUIRE(scn.tools.find(name) != nullptr);
      }
      const ParsedIntent intent = parser.parse(ins.text);
      REQUIRE(intent.plan.steps.size() == ins.expected_tools.size());
    }
  }
}

TEST_CASE("step-count histogram matches the configured proportions") {
  const auto scn = generate_scenario(50, 100, 5);
  std::map<size_t, int> hist;
  for (const auto& ins : scn.instructions) hist[ins.expected_tools.size()]++;
  CHECK(hist[1] == 40);
  CHECK(hist[2] == 30);
  CHECK(hist[3] == 15);
  CHECK(hist[4] == 10);
  CHECK(hist[5] == 3);
  CHECK(hist[6] == 2);
}

TEST_CASE("eval results are deterministic and order-independent over workers") {
  const auto scn = generate_scenario(60, 30, 9);
  RetrievalConfig cfg;
  const auto serial = run_accuracy_eval(scn, cfg, EvalMode::fsww, 1);
  const auto parallel = run_accuracy_eval(scn, cfg, EvalMode::fsww, 8);
  CHECK(serial.accuracy == parallel.accuracy);
  CHECK(serial.per_step_accuracy == parallel.per_step_accuracy);
  CHECK(serial.token_cost == parallel.token_cost);
  REQUIRE(serial.records.size() == parallel.records.size());
  for (size_t i = 0; i < serial.records.size(); ++i) {
    CHECK(serial.records[i].predicted == parallel.records[i].predicted);
  }
}

TEST_CASE("accuracy bounds and per-step keys cover present step counts") {
  const auto scn = generate_scenario(80, 50, 11);
  RetrievalConfig cfg;
  for (EvalMode mode : {EvalMode::full_injection, EvalMode::plain_rag, EvalMode::fsww}) {
    const auto res = run_accuracy_eval(scn, cfg, mode);
    CHECK(res.accuracy >= 0.0);
    CHECK(res.accuracy <= 1.0);
    std::set<int> present;
    for (const auto& ins : scn.instructions) present.insert(int(ins.expected_tools.size()));
    std::set<int> keys;
    for (const auto& [k, v] : res.per_step_accuracy) keys.insert(k);
    CHECK(keys == present);

    int correct = 0;
    for (const auto& rec : res.records) correct += rec.correct ? 1 : 0;
    CHECK(res.accuracy == Catch::Approx(double(correct) / double(res.records.size())));
  }
}

TEST_CASE("export_vectors writes plan and tool records that parse back") {
  const auto scn = generate_scenario(60, 60, kDefaultEvalSeed);
  RetrievalConfig cfg;
  const std::string path = "zspace_test_export.jsonl";
  export_vectors(scn, cfg, path, 100);

  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  int plans = 0, tools = 0;
  std::set<std::string> tool_ids;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);  // lossless parse-back
    if (j.at("kind") == "plan") {
      ++plans;
      CHECK(j.at("vector").size() == scn.espec.dim);
      CHECK(j.at("vector_fsww").size() == scn.espec.dim);
      CHECK(scn.tools.find(j.at("matched_id").get<std::string>()) != nullptr);
      CHECK(j.at("trace").contains("gate"));
    } else {
      ++tools;
      tool_ids.insert(j.at("id").get<std::string>());
    }
  }
  CHECK(plans == 100);
  CHECK(tools == int(tool_ids.size()));
  CHECK(tools > 0);
  std::remove(path.c_str());
}

TEST_CASE("full-injection token cost grows with the registry, selection stays flat") {
  RetrievalConfig cfg;
  const auto points = token_scaling_sweep({20, 120, 220}, 30, 3, cfg);
  REQUIRE(points.size() == 3);
  CHECK(points[0].full_cost < points[1].full_cost);
  CHECK(points[1].full_cost < points[2].full_cost);
  const double flat = std::abs(points[2].fsww_cost - points[0].fsww_cost);
  CHECK(flat <= 0.10 * points[0].fsww_cost);
}

TEST_CASE("markdown summary renders both tables") {
  const auto scn = generate_scenario(40, 20, 2);
  RetrievalConfig cfg;
  std::map<std::string, EvalResult> modes;
  modes["plain-rag"] = run_accuracy_eval(scn, cfg, EvalMode::plain_rag);
  modes["fsww"] = run_accuracy_eval(scn, cfg, EvalMode::fsww);
  const std::string md = eval_summary_markdown(scn, modes);
  CHECK(md.find("| Method | Accuracy (%) | Token Cost |") != std::string::npos);
  CHECK(md.find("## Accuracy by instruction step count") != std::string::npos);

  const auto js = eval_summary_json(scn, modes);
  CHECK(js.at("modes").contains("fsww"));
  CHECK(js.at("tools") == 40);
}
