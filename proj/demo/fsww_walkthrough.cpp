// Walks one query through the whole pipeline: parse, enhance, retrieve,
// execute, report. Run it without arguments.

#include <cstdio>
#include <iostream>

#include "zspace/zspace.hpp"

int main() {
  using namespace zspace;

  const auto scenario = generate_scenario(120, 20, kDefaultEvalSeed);
  const DeterministicEmbedder embedder(scenario.espec.dim, scenario.espec.seed);
  const RuleBasedParser parser;
  const RetrievalConfig cfg;

  const std::string query = "Issue a voucher to the user, then verify the draft coupon";
  std::cout << "query: " << query << "\n\n";

  const ParsedIntent intent = parser.parse(query);
  std::cout << "operation: " << to_string(intent.operation)
            << "  target: " << intent.target_object << "\nsteps:\n";
  for (const auto& step : intent.plan.steps) {
    std::cout << "  [" << step.id << "] (" << to_string(step.role) << ") "
              << step.description << "\n";
  }

  std::cout << "\nper-step retrieval (semantic + heuristic, fsww on):\n";
  std::map<std::string, std::string> assignments;
  for (const auto& step : intent.plan.steps) {
    const auto ranked = retrieve(intent, &step, scenario.tools, cfg, embedder);
    assignments[step.id] = ranked.front().name;
    std::cout << "  " << step.id << " ->";
    for (const auto& rt : ranked) {
      std::printf(" %s(%.3f)", rt.name.c_str(), rt.combined_score);
    }
    std::cout << "\n";
  }

  // Show what the enhancement did to the first step's vector.
  const auto& first = intent.plan.steps.front();
  const Vector raw = embedder.embed(first.description);
  std::vector<Vector> kws;
  for (const auto& kw : first.keywords) kws.push_back(embedder.embed(kw));
  const FsswResult res = fsww_enhance(raw, kws, cfg.fsww);
  std::printf("\nfsww on step %s: gate=%.3f guard_iterations=%d cos(raw, enhanced)=%.4f\n",
              first.id.c_str(), res.trace.gate, res.trace.guard_iterations,
              cosine(raw, res.output));

  SimulatedExecutor executor;
  ExecutionEngine engine;
  const ExecutionReport report = engine.execute(intent.plan, assignments, executor);
  std::cout << "\n" << synthesize_report(report, intent, ReportFormat::markdown_table);
  return report.success ? 0 : 1;
}
