#pragma once

#include <atomic>
#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "zspace/embedder.hpp"
#include "zspace/intent.hpp"
#include "zspace/orchestrator.hpp"
#include "zspace/registry.hpp"
#include "zspace/retrieval.hpp"

namespace zspace {

inline std::string event_json(const ProgressEvent& ev) {
  nlohmann::ordered_json j;
  j["type"] = to_string(ev.type);
  j["step_id"] = ev.step_id;
  j["attempt"] = ev.attempt;
  j["timestamp"] = ev.timestamp;
  return j.dump();
}

// One SSE frame: `event: <type>\ndata: <one-line JSON>\n\n`.
inline std::string sse_frame(const ProgressEvent& ev) {
  return "event: " + to_string(ev.type) + "\ndata: " + event_json(ev) + "\n\n";
}

namespace detail {

// Hand-off queue between the engine thread and the HTTP chunk provider.
struct SseQueue {
  std::mutex mutex;
  std::condition_variable cv;
  std::deque<std::string> frames;
  bool closed = false;

  void push(std::string frame) {
    {
      std::lock_guard<std::mutex> lock(mutex);
      frames.push_back(std::move(frame));
    }
    cv.notify_one();
  }

  void close() {
    {
      std::lock_guard<std::mutex> lock(mutex);
      closed = true;
    }
    cv.notify_one();
  }

  // Empty string means the stream is over.
  std::string pop() {
    std::unique_lock<std::mutex> lock(mutex);
    cv.wait(lock, [&] { return !frames.empty() || closed; });
    if (frames.empty()) return {};
    std::string f = std::move(frames.front());
    frames.pop_front();
    return f;
  }
};

}  // namespace detail

// `serve` mode: parses a submitted query, retrieves one tool per plan
// step, executes the plan with the simulated executor and streams the
// progress events over SSE. The stream ends after plan_finished.
class ZspaceServer {
 public:
  ZspaceServer(ToolRegistry registry, RetrievalConfig retrieval_cfg,
               OrchestratorConfig orch_cfg, EmbedderSpec espec)
      : registry_(std::move(registry)),
        retrieval_cfg_(retrieval_cfg),
        orch_cfg_(orch_cfg),
        espec_(espec) {
    bind_routes();
  }

  // Binds to an ephemeral port; returns the port or -1.
  int listen_on_any(const std::string& host = "127.0.0.1") {
    const int port = server_.bind_to_any_port(host);
    if (port <= 0) return -1;
    thread_ = std::thread([this, host] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port;
  }

  bool listen(const std::string& host, int port) {
    return server_.listen(host, port);
  }

  void stop() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

  ~ZspaceServer() { stop(); }

 private:
  void bind_routes() {
    server_.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok\n", "text/plain");
    });

    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
      std::string query = req.get_param_value("q");
      if (query.empty() && !req.body.empty()) {
        try {
          const auto j = nlohmann::json::parse(req.body);
          if (j.contains("query")) query = j["query"].get<std::string>();
        } catch (const nlohmann::json::exception&) {
        }
      }
      if (query.empty()) {
        res.status = 400;
        res.set_content("missing query: pass ?q=... or JSON body {\"query\": ...}\n",
                        "text/plain");
        return;
      }
      ParsedIntent intent;
      std::map<std::string, std::string> assignments;
      try {
        intent = parser_.parse(query);
        const DeterministicEmbedder embedder(espec_.dim, espec_.seed);
        for (const auto& step : intent.plan.steps) {
          const auto ranked = retrieve(intent, &step, registry_, retrieval_cfg_, embedder);
          assignments[step.id] = ranked.front().name;
        }
      } catch (const std::exception& e) {
        res.status = 422;
        res.set_content(std::string(e.what()) + "\n", "text/plain");
        return;
      }

      auto queue = std::make_shared<detail::SseQueue>();
      auto plan = std::make_shared<ExecutionPlan>(intent.plan);
      auto assigned = std::make_shared<std::map<std::string, std::string>>(std::move(assignments));
      const OrchestratorConfig orch_cfg = orch_cfg_;

      std::thread engine_thread([queue, plan, assigned, orch_cfg] {
        ExecutionEngine engine(orch_cfg);
        engine.add_sink([queue](const ProgressEvent& ev) { queue->push(sse_frame(ev)); });
        SimulatedExecutor executor;
        try {
          engine.execute(*plan, *assigned, executor);
        } catch (const std::exception&) {
        }
        queue->close();
      });
      engine_thread.detach();

      res.set_chunked_content_provider(
          "text/event-stream",
          [queue](size_t, httplib::DataSink& sink) {
            const std::string frame = queue->pop();
            if (frame.empty()) {
              sink.done();
              return false;
            }
            sink.write(frame.data(), frame.size());
            return true;
          });
    };

    server_.Get("/execute", handler);
    server_.Post("/execute", handler);
  }

  ToolRegistry registry_;
  RetrievalConfig retrieval_cfg_;
  OrchestratorConfig orch_cfg_;
  EmbedderSpec espec_;
  RuleBasedParser parser_;
  httplib::Server server_;
  std::thread thread_;
};

}  // namespace zspace
