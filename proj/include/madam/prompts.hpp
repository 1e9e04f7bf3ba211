#pragma once

// Prompt templates and slot rendering.

#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "madam/errors.hpp"
#include "madam/model.hpp"
#include "madam/prompt_templates.hpp"

namespace madam {

enum class TemplateName {
  agent_first_round,
  agent_later_round,
  aggregator,
  no_rag,
  concat_prompt,
  reflect_initial,
  reflect_review,
  reflect_refine,
};

inline constexpr std::array<TemplateName, 8> k_all_templates = {
    TemplateName::agent_first_round, TemplateName::agent_later_round, TemplateName::aggregator,
    TemplateName::no_rag,            TemplateName::concat_prompt,     TemplateName::reflect_initial,
    TemplateName::reflect_review,    TemplateName::reflect_refine,
};

inline std::string_view to_string(TemplateName n) {
  switch (n) {
    case TemplateName::agent_first_round: return "agent_first_round";
    case TemplateName::agent_later_round: return "agent_later_round";
    case TemplateName::aggregator: return "aggregator";
    case TemplateName::no_rag: return "no_rag";
    case TemplateName::concat_prompt: return "concat_prompt";
    case TemplateName::reflect_initial: return "reflect_initial";
    case TemplateName::reflect_review: return "reflect_review";
    case TemplateName::reflect_refine: return "reflect_refine";
  }
  return "";
}

inline std::string_view builtin_body(TemplateName n) {
  switch (n) {
    case TemplateName::agent_first_round: return templates::k_agent_first_round;
    case TemplateName::agent_later_round: return templates::k_agent_later_round;
    case TemplateName::aggregator: return templates::k_aggregator;
    case TemplateName::no_rag: return templates::k_no_rag;
    case TemplateName::concat_prompt: return templates::k_concat_prompt;
    case TemplateName::reflect_initial: return templates::k_reflect_initial;
    case TemplateName::reflect_review: return templates::k_reflect_review;
    case TemplateName::reflect_refine: return templates::k_reflect_refine;
  }
  return {};
}

using SlotMap = std::map<std::string, std::string, std::less<>>;

namespace prompt_detail {

inline bool is_slot_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

/// Length of the slot marker starting at body[i] ("{name}"), or 0.
inline std::size_t slot_at(std::string_view body, std::size_t i) {
  if (body[i] != '{') return 0;
  std::size_t j = i + 1;
  while (j < body.size() && is_slot_char(body[j])) ++j;
  if (j == i + 1 || j >= body.size() || body[j] != '}') return 0;
  return j - i + 1;
}

}  // namespace prompt_detail

struct PromptTemplate {
  TemplateName name;
  std::string body;

  /// Slot names referenced by the body, in first-use order.
  std::vector<std::string> slots() const {
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (auto len = prompt_detail::slot_at(body, i)) {
        std::string name = body.substr(i + 1, len - 2);
        if (seen.insert(name).second) out.push_back(std::move(name));
        i += len - 1;
      }
    }
    return out;
  }
};

/// Single-pass substitution: slot values are inserted verbatim and never
/// rescanned, so a document containing "{question}" is left alone.
inline std::string render(const PromptTemplate& tpl, const SlotMap& slots) {
  std::string out;
  out.reserve(tpl.body.size() + 256);
  const std::string_view body = tpl.body;
  std::size_t i = 0;
  while (i < body.size()) {
    if (auto len = prompt_detail::slot_at(body, i)) {
      auto name = body.substr(i + 1, len - 2);
      auto it = slots.find(name);
      if (it == slots.end()) throw MissingSlot(std::string(name));
      out += it->second;
      i += len;
    } else {
      out.push_back(body[i++]);
    }
  }
  return out;
}

/// The eight templates, built in or overridden from `<dir>/<name>.txt`.
class TemplateSet {
 public:
  static TemplateSet builtin() {
    TemplateSet s;
    for (auto n : k_all_templates) s.items_.push_back(PromptTemplate{n, std::string(builtin_body(n))});
    return s;
  }

  /// Missing files fall back to the built-in body.
  static TemplateSet with_overrides(const std::filesystem::path& dir) {
    TemplateSet s = builtin();
    if (!std::filesystem::is_directory(dir)) throw Error("template override directory '" + dir.string() + "' not found");
    for (auto& t : s.items_) {
      auto file = dir / (std::string(to_string(t.name)) + ".txt");
      if (!std::filesystem::exists(file)) continue;
      std::ifstream in(file, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      t.body = ss.str();
    }
    return s;
  }

  const PromptTemplate& get(TemplateName n) const { return items_.at(static_cast<std::size_t>(n)); }

 private:
  std::vector<PromptTemplate> items_;
};

// --- slot formatting ---------------------------------------------------------

/// "Document 1: ...\nDocument 2: ..." in the given order.
inline std::string format_documents_list(const std::vector<std::string>& texts) {
  std::string out;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    if (i) out += '\n';
    out += "Document " + std::to_string(i + 1) + ": " + trim(texts[i]);
  }
  return out;
}

/// "Agent 1: ...\nAgent 2: ..." labelled by position in the given order.
inline std::string format_agent_responses(const std::vector<std::string>& raws) {
  std::string out;
  for (std::size_t i = 0; i < raws.size(); ++i) {
    if (i) out += '\n';
    out += "Agent " + std::to_string(i + 1) + ": " + trim(raws[i]);
  }
  return out;
}

/// Previous round's aggregate as shown to agents in later rounds.
inline std::string format_history(const AggregateResult& prior) {
  const auto& shown = prior.surface_answers.empty() ? prior.answers : prior.surface_answers;
  std::string answers = shown.empty() ? std::string("unknown") : join(shown, ", ");
  return "Aggregated answer: " + answers + "; Explanation: " + trim(prior.explanation);
}

inline std::string quote_answer(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

/// Canonical aggregate reply: All Correct Answers: ["a", "b"]. Explanation: e
inline std::string format_aggregate_reply(const std::vector<std::string>& answers, std::string_view explanation) {
  std::string out = "All Correct Answers: [";
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (i) out += ", ";
    out += quote_answer(answers[i]);
  }
  out += "]. Explanation: ";
  out += explanation;
  return out;
}

inline std::string format_agent_reply(std::string_view answer, std::string_view explanation) {
  return "Answer: " + std::string(answer) + ". Explanation: " + std::string(explanation);
}

}  // namespace madam
