// Command-line entry point: registry management, ad-hoc queries, the
// evaluation harness, vector export and the SSE serve mode.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "zspace/config.hpp"
#include "zspace/eval.hpp"
#include "zspace/report.hpp"
#include "zspace/serve.hpp"
#include "zspace/service_embedder.hpp"
#include "zspace/zspace.hpp"

namespace {

struct GlobalOptions {
  std::string config_path;
  std::string registry_path = "registry.jsonl";
  std::string embedder_kind = "deterministic";
  size_t dim = 0;        // 0 = take from config/default
  uint64_t seed = 0;     // 0 = take from config/default
  std::string endpoint;
  std::string stopwords_path, verbs_path, nouns_path, synonyms_path;
};

zspace::AppConfig resolve_config(const GlobalOptions& opt) {
  zspace::AppConfig cfg;
  if (!opt.config_path.empty()) cfg = zspace::load_config(opt.config_path);
  if (opt.dim) cfg.embedder.dim = opt.dim;
  if (opt.seed) cfg.embedder.seed = opt.seed;
  if (!opt.endpoint.empty()) cfg.embedder.endpoint = opt.endpoint;
  cfg.embedder.kind = opt.embedder_kind == "service"
                          ? zspace::EmbedderKind::external_service
                          : zspace::EmbedderKind::deterministic_hash;
  if (cfg.embedder.kind == zspace::EmbedderKind::external_service &&
      cfg.embedder.endpoint.empty()) {
    throw zspace::Error("--embedder service requires --endpoint");
  }
  return cfg;
}

zspace::RuleBasedParser resolve_parser(const GlobalOptions& opt) {
  zspace::Lexicons lex = zspace::default_lexicons();
  if (!opt.stopwords_path.empty()) lex.stopwords = zspace::load_word_list(opt.stopwords_path);
  if (!opt.verbs_path.empty()) lex.verbs = zspace::load_verb_lexicon(opt.verbs_path);
  if (!opt.nouns_path.empty()) lex.nouns = zspace::load_word_list(opt.nouns_path);
  zspace::SynonymDictionary dict = zspace::default_synonyms();
  if (!opt.synonyms_path.empty()) dict = zspace::SynonymDictionary::load(opt.synonyms_path);
  return zspace::RuleBasedParser(std::move(lex), std::move(dict));
}

int cmd_register(const GlobalOptions& opt, const std::string& input) {
  const zspace::AppConfig cfg = resolve_config(opt);
  const auto embedder = zspace::make_embedder(cfg.embedder);

  zspace::ToolRegistry reg;
  if (std::filesystem::exists(opt.registry_path)) {
    reg = zspace::load_registry_jsonl(opt.registry_path);
  }

  std::ifstream in(input);
  if (!in) throw zspace::IoError("cannot open '" + input + "'");
  std::string line;
  int line_no = 0;
  int added = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    zspace::ToolRecord rec =
        zspace::record_from_json_line(line, line_no, /*require_embedding=*/false);
    if (rec.embedding.empty()) {
      rec.embedding = embedder->embed(zspace::tool_embedding_text(rec));
    }
    reg.register_tool(std::move(rec));
    ++added;
  }
  zspace::save_registry_jsonl(reg, opt.registry_path);
  std::cout << "registered " << added << " tools, registry now holds " << reg.size()
            << " (" << opt.registry_path << ")\n";
  return 0;
}

int cmd_query(const GlobalOptions& opt, const std::string& text, int top_k, bool no_fsww) {
  const zspace::AppConfig app = resolve_config(opt);
  zspace::RetrievalConfig cfg = app.retrieval;
  if (top_k > 0) cfg.top_k = top_k;
  if (no_fsww) cfg.use_fsww = false;

  const zspace::ToolRegistry reg = std::filesystem::exists(opt.registry_path)
                                       ? zspace::load_registry_jsonl(opt.registry_path)
                                       : zspace::ToolRegistry{};
  const auto embedder = zspace::make_embedder(app.embedder);
  const zspace::ParsedIntent intent = resolve_parser(opt).parse(text);
  const auto ranked = zspace::retrieve(intent, nullptr, reg, cfg, *embedder);
  std::cout << zspace::ranked_to_json_lines(ranked);
  return 0;
}

int cmd_eval(const GlobalOptions& opt, int tools, int instructions, uint64_t seed,
             const std::string& mode, const std::string& format) {
  const zspace::AppConfig app = resolve_config(opt);
  const auto scn = zspace::generate_scenario(tools, instructions, seed, app.embedder);

  std::map<std::string, zspace::EvalResult> results;
  auto run = [&](zspace::EvalMode m) {
    results[zspace::to_string(m)] = zspace::run_accuracy_eval(scn, app.retrieval, m);
  };
  if (mode == "all") {
    run(zspace::EvalMode::full_injection);
    run(zspace::EvalMode::plain_rag);
    run(zspace::EvalMode::fsww);
  } else if (mode == "full-injection") {
    run(zspace::EvalMode::full_injection);
  } else if (mode == "plain-rag") {
    run(zspace::EvalMode::plain_rag);
  } else if (mode == "fsww") {
    run(zspace::EvalMode::fsww);
  } else {
    throw CLI::ValidationError("--mode must be all|full-injection|plain-rag|fsww");
  }

  if (format == "markdown") {
    std::cout << zspace::eval_summary_markdown(scn, results);
  } else {
    std::cout << zspace::eval_summary_json(scn, results).dump(2) << "\n";
  }
  return 0;
}

int cmd_export(const GlobalOptions& opt, const std::string& path, int tools,
               int instructions, uint64_t seed, int limit) {
  const zspace::AppConfig app = resolve_config(opt);
  const auto scn = zspace::generate_scenario(tools, instructions, seed, app.embedder);
  zspace::export_vectors(scn, app.retrieval, path, limit);
  std::cout << "wrote vector export to " << path << "\n";
  return 0;
}

int cmd_serve(const GlobalOptions& opt, const std::string& host, int port) {
  const zspace::AppConfig app = resolve_config(opt);
  zspace::ToolRegistry reg = std::filesystem::exists(opt.registry_path)
                                 ? zspace::load_registry_jsonl(opt.registry_path)
                                 : zspace::ToolRegistry{};
  if (reg.empty()) throw zspace::EmptyRegistryError();
  zspace::ZspaceServer server(std::move(reg), app.retrieval, app.orchestrator, app.embedder);
  std::cout << "listening on http://" << host << ":" << port
            << "  (GET /execute?q=...)\n";
  if (!server.listen(host, port)) {
    throw zspace::Error("failed to listen on port " + std::to_string(port));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Z-Space tool filtering and orchestration CLI"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--config", opt.config_path, "flat JSON config file");
  app.add_option("--registry", opt.registry_path, "registry JSONL path")
      ->capture_default_str();
  app.add_option("--embedder", opt.embedder_kind, "deterministic|service")
      ->check(CLI::IsMember({"deterministic", "service"}))
      ->capture_default_str();
  app.add_option("--dim", opt.dim, "embedding dimension");
  app.add_option("--embed-seed", opt.seed, "deterministic embedder seed");
  app.add_option("--endpoint", opt.endpoint, "embedding service endpoint URL");
  app.add_option("--stopwords", opt.stopwords_path, "stopword list file");
  app.add_option("--verbs", opt.verbs_path, "verb lexicon file");
  app.add_option("--nouns", opt.nouns_path, "noun lexicon file");
  app.add_option("--synonyms", opt.synonyms_path, "synonym dictionary JSON");

  auto* reg_cmd = app.add_subcommand("register", "load tools from JSONL into the registry");
  std::string reg_input;
  reg_cmd->add_option("input", reg_input, "input JSONL file")->required();

  auto* query_cmd = app.add_subcommand("query", "rank tools for a query");
  std::string query_text;
  int top_k = 0;
  bool no_fsww = false;
  query_cmd->add_option("text", query_text, "query text")->required();
  query_cmd->add_option("--top-k", top_k, "result count");
  query_cmd->add_flag("--no-fsww", no_fsww, "disable semantic enhancement");

  auto* eval_cmd = app.add_subcommand("eval", "run the synthetic evaluation");
  int ev_tools = 200, ev_instructions = 100;
  uint64_t ev_seed = zspace::kDefaultEvalSeed;
  std::string ev_mode = "all", ev_format = "json";
  eval_cmd->add_option("--tools", ev_tools, "registry size")->capture_default_str();
  eval_cmd->add_option("--instructions", ev_instructions, "instruction count")
      ->capture_default_str();
  eval_cmd->add_option("--seed", ev_seed, "scenario seed")->capture_default_str();
  eval_cmd->add_option("--mode", ev_mode, "all|full-injection|plain-rag|fsww")
      ->capture_default_str();
  eval_cmd->add_option("--format", ev_format, "json|markdown")
      ->check(CLI::IsMember({"json", "markdown"}))
      ->capture_default_str();

  auto* export_cmd = app.add_subcommand("export-vectors", "export plan/tool vectors as JSONL");
  std::string export_path;
  int ex_tools = 200, ex_instructions = 100, ex_limit = 100;
  uint64_t ex_seed = zspace::kDefaultEvalSeed;
  export_cmd->add_option("path", export_path, "output path")->required();
  export_cmd->add_option("--tools", ex_tools, "registry size")->capture_default_str();
  export_cmd->add_option("--instructions", ex_instructions, "instruction count")
      ->capture_default_str();
  export_cmd->add_option("--seed", ex_seed, "scenario seed")->capture_default_str();
  export_cmd->add_option("--limit", ex_limit, "plan records to export")->capture_default_str();

  auto* serve_cmd = app.add_subcommand("serve", "run the SSE execution server");
  std::string host = "127.0.0.1";
  int port = 8080;
  serve_cmd->add_option("--host", host, "bind host")->capture_default_str();
  serve_cmd->add_option("--port", port, "bind port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    if (*reg_cmd) return cmd_register(opt, reg_input);
    if (*query_cmd) return cmd_query(opt, query_text, top_k, no_fsww);
    if (*eval_cmd) return cmd_eval(opt, ev_tools, ev_instructions, ev_seed, ev_mode, ev_format);
    if (*export_cmd)
      return cmd_export(opt, export_path, ex_tools, ex_instructions, ex_seed, ex_limit);
    if (*serve_cmd) return cmd_serve(opt, host, port);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
