#pragma once

// The multi-agent debate loop. One agent per document answers from its own
// document, an aggregator reads the shuffled agent replies, and from round 2
// on each agent also sees the previous round's aggregate. The debate stops
// early once every agent repeats its previous answer.

#include <future>
#include <string>
#include <vector>

#include "madam/backend.hpp"
#include "madam/corpus_io.hpp"
#include "madam/errors.hpp"
#include "madam/model.hpp"
#include "madam/parsing.hpp"
#include "madam/prompts.hpp"
#include "madam/rng.hpp"

namespace madam {

/// Shared by every call in a run: where to send prompts and how to build them.
struct RunContext {
  ChatBackend& backend;
  const TemplateSet& templates;
  ModelSettings model;
};

/// A failure partway through a multi-call method. Carries what was done so
/// far so it can be persisted for diagnosis.
class PartialRunError : public Error {
 public:
  PartialRunError(const std::string& what, json trace, std::vector<CallRecord> calls)
      : Error(what), trace_(std::move(trace)), calls_(std::move(calls)) {}
  const json& trace() const noexcept { return trace_; }
  const std::vector<CallRecord>& calls() const noexcept { return calls_; }

 private:
  json trace_;
  std::vector<CallRecord> calls_;
};

class DebateError : public PartialRunError {
 public:
  DebateError(const std::string& what, DebateTranscript partial)
      : PartialRunError(what, to_json_value(partial), partial.usage), partial_(std::move(partial)) {}
  const DebateTranscript& partial() const noexcept { return partial_; }

 private:
  DebateTranscript partial_;
};

/// Sends one prompt and books the call. Backend failures are rethrown with
/// `label` prefixed.
inline ChatReply call_labeled(const RunContext& ctx, std::string prompt, const std::string& label,
                              CallRecord& record) {
  try {
    auto reply = ctx.backend.complete(ctx.model.request(std::move(prompt)));
    record = CallRecord{label, reply.usage.input_tokens, reply.usage.output_tokens};
    return reply;
  } catch (const AuthError& e) {
    throw AuthError(label + ": " + e.detail(), e.fingerprint());
  } catch (const ScriptMiss& e) {
    throw ScriptMiss(label + ": " + e.detail(), e.fingerprint());
  } catch (const TransportError& e) {
    throw TransportError(label + ": " + e.reason(), e.status(), e.fingerprint());
  } catch (const BackendError& e) {
    throw BackendError(label + ": " + e.detail(), e.fingerprint());
  }
}

struct AgentHandle {
  int index = 1;  // 1-based
  const Document* document = nullptr;
};

struct AgentTurn {
  AgentResponse response;
  CallRecord call;
};

/// One agent's reply for `round`. `prior` must be given exactly when round > 1.
inline AgentTurn agent_turn(const RunContext& ctx, const AgentHandle& agent, const Query& query,
                            const AggregateResult* prior, int round) {
  if (round < 1) throw PreconditionError("agent_turn: round must be >= 1");
  if ((round == 1) != (prior == nullptr)) {
    throw PreconditionError("agent_turn: prior aggregate must be supplied exactly when round > 1 (round " +
                            std::to_string(round) + ")");
  }
  if (agent.document == nullptr) throw PreconditionError("agent_turn: agent has no document");

  SlotMap slots{{"question", query.text}, {"document", agent.document->text}};
  TemplateName tpl = TemplateName::agent_first_round;
  if (prior) {
    tpl = TemplateName::agent_later_round;
    slots["history"] = format_history(*prior);
  }
  const auto label = "agent " + std::to_string(agent.index) + ", round " + std::to_string(round);
  AgentTurn turn;
  auto reply = call_labeled(ctx, render(ctx.templates.get(tpl), slots), label, turn.call);
  auto parsed = parse_agent_reply(reply.text);
  turn.response.agent_index = agent.index;
  turn.response.round = round;
  turn.response.answer = std::move(parsed.answer);
  turn.response.surface_answer = std::move(parsed.surface_answer);
  turn.response.explanation = std::move(parsed.explanation);
  turn.response.raw = std::move(reply.text);
  turn.response.degraded = parsed.degraded;
  return turn;
}

struct AggregateRound {
  AggregateResult result;
  std::vector<int> permutation;  // agent indices in presentation order
  CallRecord call;
};

/// Shuffles `responses` with a Fisher-Yates pass driven by SplitMix64(seed),
/// renders them in that order and asks the aggregator once.
inline AggregateRound aggregate_round(const RunContext& ctx, const Query& query,
                                      const std::vector<AgentResponse>& responses, std::uint64_t seed, int round) {
  if (responses.empty()) throw PreconditionError("aggregate_round: no responses");
  for (const auto& r : responses) {
    if (r.round != round) {
      throw PreconditionError("aggregate_round: response from agent " + std::to_string(r.agent_index) +
                              " belongs to round " + std::to_string(r.round) + ", expected " + std::to_string(round));
    }
  }
  AggregateRound out;
  auto order = seeded_permutation(responses.size(), seed);
  std::vector<std::string> shown;
  shown.reserve(order.size());
  for (auto k : order) {
    out.permutation.push_back(responses[k].agent_index);
    shown.push_back(responses[k].raw);
  }
  SlotMap slots{{"question", query.text}, {"agent_responses_list", format_agent_responses(shown)}};
  auto reply = call_labeled(ctx, render(ctx.templates.get(TemplateName::aggregator), slots),
                            "aggregator, round " + std::to_string(round), out.call);
  auto parsed = parse_aggregate_reply(reply.text);
  out.result.round = round;
  out.result.answers = std::move(parsed.answers);
  out.result.surface_answers = std::move(parsed.surface_answers);
  out.result.explanation = std::move(parsed.explanation);
  out.result.raw = std::move(reply.text);
  out.result.degraded = parsed.degraded;
  return out;
}

/// Shuffle seed for `round` of a debate seeded with `debate_seed`.
inline std::uint64_t round_shuffle_seed(std::uint64_t debate_seed, int round) {
  return derive_seed(debate_seed, static_cast<std::uint64_t>(round));
}

inline bool same_answer(const AgentResponse& a, const AgentResponse& b, ConvergenceComparison mode) {
  if (mode == ConvergenceComparison::raw_answer) {
    return a.answer.is_unknown() == b.answer.is_unknown() && a.surface_answer == b.surface_answer;
  }
  return a.answer == b.answer;
}

/// Every agent repeated its previous-round answer.
inline bool converged(const std::vector<AgentResponse>& prev, const std::vector<AgentResponse>& cur,
                      ConvergenceComparison mode) {
  if (prev.size() != cur.size()) return false;
  for (std::size_t i = 0; i < cur.size(); ++i) {
    if (!same_answer(prev[i], cur[i], mode)) return false;
  }
  return true;
}

/// Runs up to config.max_rounds rounds. The final answer is the aggregate of
/// the stopping round. On any backend failure throws DebateError holding the
/// rounds completed so far.
inline DebateTranscript run_debate(const RunContext& ctx, const Query& query, const std::vector<Document>& docs,
                                   const DebateConfig& config, std::string instance_id = {}) {
  if (docs.empty()) throw PreconditionError("run_debate: no documents");
  if (config.max_rounds < 1) throw PreconditionError("run_debate: max_rounds must be >= 1");

  DebateTranscript t;
  t.instance_id = instance_id.empty() ? query.id : std::move(instance_id);
  const std::size_t n = docs.size();
  std::vector<AgentHandle> agents(n);
  for (std::size_t i = 0; i < n; ++i) agents[i] = AgentHandle{static_cast<int>(i + 1), &docs[i]};

  for (int round = 1; round <= config.max_rounds; ++round) {
    const AggregateResult* prior = round == 1 ? nullptr : &t.rounds.back().aggregate;

    std::vector<std::future<AgentTurn>> pending;
    pending.reserve(n);
    for (const auto& a : agents) {
      pending.push_back(std::async(n > 1 ? std::launch::async : std::launch::deferred,
                                   [&ctx, &query, a, prior, round] { return agent_turn(ctx, a, query, prior, round); }));
    }
    RoundRecord rec;
    std::string failure;
    for (auto& f : pending) {
      try {
        auto turn = f.get();
        rec.responses.push_back(std::move(turn.response));
        t.usage.push_back(std::move(turn.call));
      } catch (const std::exception& e) {
        if (failure.empty()) failure = e.what();
      }
    }
    if (!failure.empty()) {
      t.stop_round = round - 1;
      throw DebateError("debate '" + t.instance_id + "' aborted: " + failure, std::move(t));
    }

    rec.shuffle_seed = round_shuffle_seed(config.shuffle_seed, round);
    try {
      auto agg = aggregate_round(ctx, query, rec.responses, rec.shuffle_seed, round);
      rec.aggregate = std::move(agg.result);
      rec.shuffle_permutation = std::move(agg.permutation);
      t.usage.push_back(std::move(agg.call));
    } catch (const std::exception& e) {
      t.stop_round = round - 1;
      throw DebateError("debate '" + t.instance_id + "' aborted: " + e.what(), std::move(t));
    }

    const bool stop_now = round >= 2 && converged(t.rounds.back().responses, rec.responses, config.convergence);
    t.rounds.push_back(std::move(rec));
    t.stop_round = round;
    if (stop_now) {
      t.stop_reason = StopReason::converged;
      return t;
    }
  }
  t.stop_reason = StopReason::max_rounds;
  return t;
}

}  // namespace madam
