#pragma once

// Multi-answer exact match, precision/recall/F1, and corpus runs with
// token accounting.

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "madam/baselines.hpp"

namespace madam {

/// strict: predicted set equals gold. lenient: predicted covers gold and
/// contains no forbidden answer.
enum class EmMode { strict, lenient };

inline std::string_view to_string(EmMode m) { return m == EmMode::strict ? "strict" : "lenient"; }

inline EmMode parse_em_mode(std::string_view s) {
  if (s == "strict") return EmMode::strict;
  if (s == "lenient") return EmMode::lenient;
  throw Error("unknown em mode '" + std::string(s) + "'");
}

struct InstanceMetrics {
  int em = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

namespace eval_detail {

inline std::set<std::string> canon(const std::vector<std::string>& xs) {
  std::set<std::string> out;
  for (const auto& x : xs) {
    auto c = canonicalize_answer(x);
    if (!c.empty()) out.insert(std::move(c));
  }
  return out;
}

}  // namespace eval_detail

/// Answers are compared after canonicalize_answer; throws EmptyGold.
inline InstanceMetrics judge_instance(const std::vector<std::string>& predicted, const std::vector<std::string>& gold,
                                      const std::vector<std::string>& forbidden, EmMode mode = EmMode::strict) {
  const auto p = eval_detail::canon(predicted);
  const auto g = eval_detail::canon(gold);
  const auto f = eval_detail::canon(forbidden);
  if (g.empty()) throw EmptyGold();

  std::size_t hit = 0;
  bool any_forbidden = false;
  for (const auto& x : p) {
    hit += g.count(x);
    any_forbidden = any_forbidden || f.count(x) > 0;
  }
  InstanceMetrics m;
  const bool covers_gold = hit == g.size();
  m.em = mode == EmMode::strict ? (covers_gold && hit == p.size()) : (covers_gold && !any_forbidden);
  m.precision = p.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(p.size());
  m.recall = static_cast<double>(hit) / static_cast<double>(g.size());
  m.f1 = (m.precision + m.recall) == 0.0 ? 0.0 : 2.0 * m.precision * m.recall / (m.precision + m.recall);
  return m;
}

struct InstanceJudgment {
  std::string instance_id;
  std::vector<std::string> predicted;
  InstanceMetrics metrics;
  bool degraded = false;
  UsageTotals usage;
  std::optional<std::string> error;
};

struct EvalReport {
  MethodKind method = MethodKind::madam_rag;
  EmMode em_mode = EmMode::strict;
  std::vector<InstanceJudgment> judgments;
  double em = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double mean_input_tokens = 0.0;
  double mean_output_tokens = 0.0;
  double degraded_rate = 0.0;
  UsageTotals totals;
  std::size_t errors = 0;
  json metadata = json::object();
};

/// Recomputes every corpus-level field from `report.judgments`.
inline void summarize(EvalReport& report) {
  const auto n = static_cast<double>(report.judgments.size());
  report.em = report.precision = report.recall = report.f1 = 0.0;
  report.totals = {};
  report.errors = 0;
  std::size_t degraded = 0;
  for (const auto& j : report.judgments) {
    report.em += j.metrics.em;
    report.precision += j.metrics.precision;
    report.recall += j.metrics.recall;
    report.f1 += j.metrics.f1;
    report.totals.input_tokens += j.usage.input_tokens;
    report.totals.output_tokens += j.usage.output_tokens;
    report.totals.calls += j.usage.calls;
    degraded += j.degraded;
    report.errors += j.error.has_value();
  }
  if (n > 0) {
    report.em /= n;
    report.precision /= n;
    report.recall /= n;
    report.f1 /= n;
    report.mean_input_tokens = static_cast<double>(report.totals.input_tokens) / n;
    report.mean_output_tokens = static_cast<double>(report.totals.output_tokens) / n;
    report.degraded_rate = static_cast<double>(degraded) / n;
  }
}

struct EvalOptions {
  EmMode em_mode = EmMode::strict;
  /// Instances evaluated at once.
  std::size_t concurrency = 8;
};

struct EvalRun {
  EvalReport report;
  /// Per-instance method traces in corpus order (partial on failure).
  std::vector<json> traces;
};

/// Runs `runner` on every instance and judges the result. A failing
/// instance scores zero and carries an error note; the run continues.
inline EvalRun evaluate_corpus(const Corpus& corpus, const MethodRunner& runner, const RunContext& ctx,
                               const EvalOptions& opt = {}) {
  if (corpus.empty()) throw EmptyCorpus();
  EvalRun run;
  run.report.method = runner.kind;
  run.report.em_mode = opt.em_mode;
  run.report.judgments.resize(corpus.size());
  run.traces.resize(corpus.size());

  auto evaluate_one = [&](std::size_t i) {
    const auto& inst = corpus[i];
    auto& j = run.report.judgments[i];
    j.instance_id = inst.query.id;
    try {
      auto outcome = runner(ctx, inst);
      j.predicted = outcome.final.answers;
      j.degraded = outcome.final.degraded;
      j.usage = total_usage(outcome.calls);
      j.metrics = judge_instance(j.predicted, inst.gold_answers, inst.forbidden_answers, opt.em_mode);
      run.traces[i] = std::move(outcome.trace);
    } catch (const PartialRunError& e) {
      j.metrics = {};
      j.usage = total_usage(e.calls());
      j.error = e.what();
      run.traces[i] = e.trace();
      run.traces[i]["error"] = e.what();
    } catch (const std::exception& e) {
      j.metrics = {};
      j.error = e.what();
      run.traces[i] = json{{"instance_id", inst.query.id}, {"error", e.what()}};
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(opt.concurrency, 1, corpus.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i) evaluate_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) evaluate_one(i);
      });
    }
  }
  summarize(run.report);
  return run;
}

// --- report encoding -----------------------------------------------------------

inline json to_json_value(const InstanceJudgment& j) {
  json out{{"type", "instance"},
           {"id", j.instance_id},
           {"predicted", j.predicted},
           {"em", j.metrics.em},
           {"precision", j.metrics.precision},
           {"recall", j.metrics.recall},
           {"f1", j.metrics.f1},
           {"degraded", j.degraded},
           {"usage", {{"input_tokens", j.usage.input_tokens},
                      {"output_tokens", j.usage.output_tokens},
                      {"backend_calls", j.usage.calls}}}};
  if (j.error) out["error"] = *j.error;
  return out;
}

inline json summary_json(const EvalReport& r) {
  return json{{"type", "summary"},
              {"method", std::string(to_string(r.method))},
              {"em_mode", std::string(to_string(r.em_mode))},
              {"instances", r.judgments.size()},
              {"em", r.em},
              {"precision", r.precision},
              {"recall", r.recall},
              {"f1", r.f1},
              {"mean_input_tokens", r.mean_input_tokens},
              {"mean_output_tokens", r.mean_output_tokens},
              {"total_input_tokens", r.totals.input_tokens},
              {"total_output_tokens", r.totals.output_tokens},
              {"backend_calls", r.totals.calls},
              {"degraded_rate", r.degraded_rate},
              {"errors", r.errors},
              {"metadata", r.metadata}};
}

/// Per-instance records followed by one summary record.
inline std::string report_to_jsonl(const EvalReport& r) {
  std::string out;
  for (const auto& j : r.judgments) out += to_json_value(j).dump() + '\n';
  out += summary_json(r).dump() + '\n';
  return out;
}

/// The machine-parseable one-line summary printed by the CLI.
inline std::string summary_line(const EvalReport& r) {
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "method=%s em_mode=%s instances=%zu em=%.4f precision=%.4f recall=%.4f f1=%.4f "
                "mean_input_tokens=%.2f mean_output_tokens=%.2f calls=%lld errors=%zu",
                std::string(to_string(r.method)).c_str(), std::string(to_string(r.em_mode)).c_str(),
                r.judgments.size(), r.em, r.precision, r.recall, r.f1, r.mean_input_tokens, r.mean_output_tokens,
                static_cast<long long>(r.totals.calls), r.errors);
  return buf;
}

}  // namespace madam
