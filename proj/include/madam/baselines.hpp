#pragma once

// Comparison methods sharing the backend and parsers with the debate
// engine: closed-book, single concatenated prompt, and self-reflection.
// Every method yields a MethodOutcome so evaluation is method-agnostic.

#include <string>
#include <vector>

#include "madam/engine.hpp"

namespace madam {

enum class MethodKind { no_rag, concat_prompt, self_reflection, madam_rag };

/// CLI spelling: no-rag, concat, self-reflect, madam.
inline std::string_view to_string(MethodKind m) {
  switch (m) {
    case MethodKind::no_rag: return "no-rag";
    case MethodKind::concat_prompt: return "concat";
    case MethodKind::self_reflection: return "self-reflect";
    case MethodKind::madam_rag: return "madam";
  }
  return "";
}

inline MethodKind parse_method_kind(std::string_view s) {
  if (s == "no-rag") return MethodKind::no_rag;
  if (s == "concat") return MethodKind::concat_prompt;
  if (s == "self-reflect") return MethodKind::self_reflection;
  if (s == "madam") return MethodKind::madam_rag;
  throw Error("unknown method '" + std::string(s) + "'");
}

struct MethodOutcome {
  AggregateResult final;
  std::vector<CallRecord> calls;
  /// Method-specific record (a debate transcript for madam, the step chain
  /// for self-reflection).
  json trace;
};

namespace baseline_detail {

inline AggregateResult to_aggregate(ParsedAnswerList parsed, std::string raw, int round) {
  AggregateResult r;
  r.round = round;
  r.answers = std::move(parsed.answers);
  r.surface_answers = std::move(parsed.surface_answers);
  r.explanation = std::move(parsed.explanation);
  r.raw = std::move(raw);
  r.degraded = parsed.degraded;
  return r;
}

inline std::vector<std::string> document_texts(const RamDocsInstance& inst) {
  std::vector<std::string> texts;
  texts.reserve(inst.documents.size());
  for (const auto& d : inst.documents) texts.push_back(d.text);
  return texts;
}

}  // namespace baseline_detail

/// One call, question only.
inline MethodOutcome run_no_rag(const RunContext& ctx, const Query& query) {
  MethodOutcome out;
  CallRecord call;
  auto reply = call_labeled(ctx, render(ctx.templates.get(TemplateName::no_rag), {{"question", query.text}}),
                            "no-rag", call);
  out.calls.push_back(call);
  out.trace = json{{"instance_id", query.id}, {"method", "no-rag"}, {"reply", reply.text}};
  out.final = baseline_detail::to_aggregate(parse_answer_list(reply.text), reply.text, 1);
  return out;
}

/// One call with every document in instance order.
inline MethodOutcome run_concat(const RunContext& ctx, const RamDocsInstance& inst) {
  if (inst.documents.empty()) throw PreconditionError("run_concat: instance '" + inst.query.id + "' has no documents");
  MethodOutcome out;
  CallRecord call;
  SlotMap slots{{"question", inst.query.text},
                {"documents_list", format_documents_list(baseline_detail::document_texts(inst))}};
  auto reply = call_labeled(ctx, render(ctx.templates.get(TemplateName::concat_prompt), slots), "concat", call);
  out.calls.push_back(call);
  out.trace = json{{"instance_id", inst.query.id}, {"method", "concat"}, {"reply", reply.text}};
  out.final = baseline_detail::to_aggregate(parse_aggregate_reply(reply.text), reply.text, 1);
  return out;
}

/// Initial answer, then `reflection_rounds` x (review, refine): 1 + 2k calls.
/// The full document context is sent at every step.
inline MethodOutcome run_self_reflection(const RunContext& ctx, const RamDocsInstance& inst,
                                         int reflection_rounds = 2) {
  if (inst.documents.empty()) {
    throw PreconditionError("run_self_reflection: instance '" + inst.query.id + "' has no documents");
  }
  if (reflection_rounds < 0) throw PreconditionError("run_self_reflection: reflection_rounds must be >= 0");

  MethodOutcome out;
  json steps = json::array();
  const auto context = format_documents_list(baseline_detail::document_texts(inst));
  auto step = [&](TemplateName tpl, const SlotMap& slots, const std::string& label) {
    CallRecord call;
    try {
      auto reply = call_labeled(ctx, render(ctx.templates.get(tpl), slots), label, call);
      out.calls.push_back(call);
      steps.push_back(json{{"step", label}, {"text", reply.text}});
      return reply.text;
    } catch (const Error& e) {
      throw PartialRunError(std::string("self-reflection step '") + label + "' failed: " + e.what(),
                            json{{"instance_id", inst.query.id}, {"method", "self-reflect"}, {"steps", steps},
                                 {"failed_step", label}},
                            out.calls);
    }
  };

  std::string answer = step(TemplateName::reflect_initial, {{"question", inst.query.text}, {"context", context}},
                            "initial");
  for (int k = 1; k <= reflection_rounds; ++k) {
    const auto suffix = ", round " + std::to_string(k);
    SlotMap slots{{"question", inst.query.text}, {"context", context}, {"answer", answer}};
    slots["review"] = step(TemplateName::reflect_review, slots, "review" + suffix);
    answer = step(TemplateName::reflect_refine, slots, "refine" + suffix);
  }
  out.trace = json{{"instance_id", inst.query.id}, {"method", "self-reflect"}, {"steps", steps}};
  out.final = baseline_detail::to_aggregate(parse_aggregate_reply(answer), answer, reflection_rounds + 1);
  return out;
}

inline MethodOutcome run_madam(const RunContext& ctx, const RamDocsInstance& inst, const DebateConfig& config) {
  auto t = run_debate(ctx, inst.query, inst.documents, config, inst.query.id);
  MethodOutcome out;
  out.final = *t.final_aggregate();
  out.calls = t.usage;
  out.trace = to_json_value(t);
  return out;
}

/// A method bound to its settings; callable per instance.
struct MethodRunner {
  MethodKind kind = MethodKind::madam_rag;
  DebateConfig debate;
  int reflection_rounds = 2;

  MethodOutcome operator()(const RunContext& ctx, const RamDocsInstance& inst) const {
    switch (kind) {
      case MethodKind::no_rag: return run_no_rag(ctx, inst.query);
      case MethodKind::concat_prompt: return run_concat(ctx, inst);
      case MethodKind::self_reflection: return run_self_reflection(ctx, inst, reflection_rounds);
      case MethodKind::madam_rag: return run_madam(ctx, inst, debate);
    }
    throw Error("unhandled method");
  }
};

}  // namespace madam
