#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "zspace/errors.hpp"
#include "zspace/hash.hpp"
#include "zspace/intent.hpp"

namespace zspace {

using KvMap = std::map<std::string, std::string>;

struct ToolResult {
  bool ok = true;
  KvMap outputs;
  std::string error;
  long duration = 1;  // logical ticks, >= 1
};

// Implementations must tolerate concurrent invocations. The engine adds
// reserved "_step" and "_attempt" keys to the inputs so simulated
// executors can behave as pure functions of (step, attempt).
class ToolExecutor {
 public:
  virtual ~ToolExecutor() = default;
  virtual ToolResult execute(const std::string& tool_name, const KvMap& inputs) = 0;
};

enum class StepStatus { ok, failed, skipped };

inline std::string to_string(StepStatus s) {
  switch (s) {
    case StepStatus::ok: return "ok";
    case StepStatus::failed: return "failed";
    case StepStatus::skipped: return "skipped";
  }
  return "failed";
}

struct StepOutcome {
  std::string step_id;
  std::string tool_name;
  StepStatus status = StepStatus::skipped;
  int attempts = 0;
  KvMap staged_outputs;
  long start_time = -1;  // logical tick of the first attempt
  long end_time = -1;    // logical tick the step settled
  std::string error;
};

enum class EventType { step_started, step_finished, step_failed, plan_finished };

inline std::string to_string(EventType t) {
  switch (t) {
    case EventType::step_started: return "step_started";
    case EventType::step_finished: return "step_finished";
    case EventType::step_failed: return "step_failed";
    case EventType::plan_finished: return "plan_finished";
  }
  return "step_started";
}

struct ProgressEvent {
  EventType type = EventType::step_started;
  std::string step_id;
  int attempt = 0;
  long timestamp = 0;
};

struct ExecutionReport {
  std::vector<StepOutcome> steps;  // plan declaration order
  bool success = false;
  long makespan = 0;
  std::vector<ProgressEvent> event_log;

  const StepOutcome* find(const std::string& step_id) const {
    for (const auto& s : steps) {
      if (s.step_id == step_id) return &s;
    }
    return nullptr;
  }
};

struct OrchestratorConfig {
  int retry_limit = 2;
  int max_parallel = 4;
  long step_timeout = 0;  // ticks; 0 disables; longer attempts fail
};

// Dependency-driven engine over a logical clock. Eligible steps are
// dispatched auxiliary-first up to the pool bound; each dispatch wave
// invokes the executor concurrently, while completions are processed in
// virtual-time order so reports and event streams are deterministic
// whenever the executor is.
class ExecutionEngine {
 public:
  using Sink = std::function<void(const ProgressEvent&)>;

  explicit ExecutionEngine(OrchestratorConfig cfg = {}) : cfg_(cfg) {
    if (cfg_.max_parallel < 1) throw Error("max_parallel must be >= 1");
  }

  // Observers may attach before or during execution; they receive every
  // event emitted after attachment, in order.
  int add_sink(Sink sink) {
    std::lock_guard<std::mutex> lock(sink_mutex_);
    sinks_.emplace_back(next_sink_id_, std::move(sink));
    return next_sink_id_++;
  }

  void remove_sink(int id) {
    std::lock_guard<std::mutex> lock(sink_mutex_);
    std::erase_if(sinks_, [id](const auto& p) { return p.first == id; });
  }

  ExecutionReport execute(const ExecutionPlan& plan,
                          const std::map<std::string, std::string>& assignments,
                          ToolExecutor& executor) {
    validate_plan(plan);
    const size_t n = plan.steps.size();
    std::map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) index[plan.steps[i].id] = i;
    for (const auto& step : plan.steps) {
      if (!assignments.count(step.id)) throw UnassignedStepError(step.id);
    }

    ExecutionReport report;
    report.steps.resize(n);
    enum class State { pending, running, ok, failed, skipped };
    std::vector<State> state(n, State::pending);
    for (size_t i = 0; i < n; ++i) {
      report.steps[i].step_id = plan.steps[i].id;
      report.steps[i].tool_name = assignments.at(plan.steps[i].id);
    }

    auto emit = [&](EventType type, const std::string& step_id, int attempt, long ts) {
      const ProgressEvent ev{type, step_id, attempt, ts};
      report.event_log.push_back(ev);
      std::lock_guard<std::mutex> lock(sink_mutex_);
      for (auto& [id, sink] : sinks_) sink(ev);
    };

    auto deps_ok = [&](size_t i) {
      for (const auto& dep : plan.steps[i].depends_on) {
        if (state[index.at(dep)] != State::ok) return false;
      }
      return true;
    };

    // Terminal failure skips every transitive dependent.
    std::function<void(size_t)> skip_dependents = [&](size_t failed_idx) {
      for (size_t i = 0; i < n; ++i) {
        if (state[i] != State::pending) continue;
        for (const auto& dep : plan.steps[i].depends_on) {
          const size_t d = index.at(dep);
          if (d == failed_idx || state[d] == State::failed || state[d] == State::skipped) {
            state[i] = State::skipped;
            report.steps[i].status = StepStatus::skipped;
            skip_dependents(i);
            break;
          }
        }
      }
    };

    struct Running {
      size_t idx;
      int attempt;
      long end;
      ToolResult result;
    };
    std::vector<Running> running;
    long clock = 0;

    for (;;) {
      // Dispatch wave: auxiliary steps first, then declaration order.
      std::vector<size_t> ready;
      for (size_t i = 0; i < n; ++i) {
        if (state[i] == State::pending && deps_ok(i)) ready.push_back(i);
      }
      std::stable_sort(ready.begin(), ready.end(), [&](size_t a, size_t b) {
        const bool aux_a = plan.steps[a].role == StepRole::auxiliary;
        const bool aux_b = plan.steps[b].role == StepRole::auxiliary;
        if (aux_a != aux_b) return aux_a;
        return a < b;
      });

      struct Dispatch {
        size_t idx;
        int attempt;
        KvMap inputs;
      };
      std::vector<Dispatch> wave;
      for (size_t i : ready) {
        if (running.size() + wave.size() >= size_t(cfg_.max_parallel)) break;
        StepOutcome& out = report.steps[i];
        const int attempt = ++out.attempts;
        if (attempt == 1) out.start_time = clock;
        state[i] = State::running;

        KvMap inputs;
        for (const auto& dep : plan.steps[i].depends_on) {
          const StepOutcome& d = report.steps[index.at(dep)];
          for (const auto& [k, v] : d.staged_outputs) inputs[dep + "." + k] = v;
        }
        inputs["_step"] = plan.steps[i].id;
        inputs["_attempt"] = std::to_string(attempt);
        emit(EventType::step_started, plan.steps[i].id, attempt, clock);
        wave.push_back({i, attempt, std::move(inputs)});
      }

      // Invoke the executor for the wave; calls run concurrently.
      if (wave.size() == 1) {
        auto& d = wave.front();
        ToolResult res = executor.execute(report.steps[d.idx].tool_name, d.inputs);
        running.push_back({d.idx, d.attempt, clock + std::max(1L, res.duration), std::move(res)});
      } else if (!wave.empty()) {
        std::vector<std::future<ToolResult>> futures;
        futures.reserve(wave.size());
        for (auto& d : wave) {
          futures.push_back(std::async(std::launch::async, [&executor, &d, this, &report] {
            return executor.execute(report.steps[d.idx].tool_name, d.inputs);
          }));
        }
        for (size_t w = 0; w < wave.size(); ++w) {
          ToolResult res = futures[w].get();
          running.push_back(
              {wave[w].idx, wave[w].attempt, clock + std::max(1L, res.duration), std::move(res)});
        }
      }

      if (running.empty()) break;

      // Advance the clock to the earliest completion and settle it.
      long t_next = running.front().end;
      for (const auto& r : running) t_next = std::min(t_next, r.end);
      clock = t_next;

      std::vector<Running> done;
      std::erase_if(running, [&](const Running& r) {
        if (r.end != t_next) return false;
        done.push_back(r);
        return true;
      });
      std::sort(done.begin(), done.end(),
                [](const Running& a, const Running& b) { return a.idx < b.idx; });

      for (auto& r : done) {
        StepOutcome& out = report.steps[r.idx];
        bool ok = r.result.ok;
        std::string error = r.result.error;
        if (ok && cfg_.step_timeout > 0 && r.result.duration > cfg_.step_timeout) {
          ok = false;
          error = "timeout after " + std::to_string(cfg_.step_timeout) + " ticks";
        }
        if (ok) {
          state[r.idx] = State::ok;
          out.status = StepStatus::ok;
          out.staged_outputs = std::move(r.result.outputs);
          out.end_time = clock;
          emit(EventType::step_finished, out.step_id, r.attempt, clock);
        } else {
          emit(EventType::step_failed, out.step_id, r.attempt, clock);
          if (r.attempt <= cfg_.retry_limit) {
            state[r.idx] = State::pending;  // staged inputs replayed next wave
          } else {
            state[r.idx] = State::failed;
            out.status = StepStatus::failed;
            out.error = error;
            out.end_time = clock;
            skip_dependents(r.idx);
          }
        }
      }
    }

    report.makespan = clock;
    report.success = true;
    for (size_t i = 0; i < n; ++i) {
      if (state[i] != State::ok) report.success = false;
    }
    emit(EventType::plan_finished, "", 0, clock);
    return report;
  }

 private:
  OrchestratorConfig cfg_;
  std::mutex sink_mutex_;
  std::vector<std::pair<int, Sink>> sinks_;
  int next_sink_id_ = 1;
};

// Deterministic stand-in executor. Failures come either from a script
// (step id -> number of failing attempts) or from a seeded hash of
// (step, attempt), so runs replay identically however they interleave.
class SimulatedExecutor final : public ToolExecutor {
 public:
  uint64_t seed = 0;
  double fail_prob = 0.0;
  std::map<std::string, int> scripted_failures;  // step id -> failing attempts
  std::map<std::string, long> durations;         // step id -> ticks (default 1)

  ToolResult execute(const std::string& tool_name, const KvMap& inputs) override {
    const std::string step = inputs.count("_step") ? inputs.at("_step") : tool_name;
    const int attempt = inputs.count("_attempt") ? std::stoi(inputs.at("_attempt")) : 1;

    const int now = ++in_flight_;
    int seen = max_in_flight_.load();
    while (now > seen && !max_in_flight_.compare_exchange_weak(seen, now)) {
    }

    ToolResult res;
    const auto dit = durations.find(step);
    if (dit != durations.end()) res.duration = dit->second;

    bool fail = false;
    const auto sit = scripted_failures.find(step);
    if (sit != scripted_failures.end() && attempt <= sit->second) {
      fail = true;
    } else if (fail_prob > 0.0) {
      const uint64_t key = mix64(seed ^ hash64(uint64_t(attempt), step));
      fail = unit_double(key) < fail_prob;
    }
    if (fail) {
      res.ok = false;
      res.error = "simulated failure (attempt " + std::to_string(attempt) + ")";
    } else {
      res.outputs["result"] = tool_name + ":" + step + ":ok";
    }
    --in_flight_;
    return res;
  }

  int max_in_flight() const { return max_in_flight_.load(); }

 private:
  std::atomic<int> in_flight_{0};
  std::atomic<int> max_in_flight_{0};
};

}  // namespace zspace
