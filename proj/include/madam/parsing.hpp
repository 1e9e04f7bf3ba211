#pragma once

// Parsers for the structured replies the prompts ask for. All of them are
// total: malformed input yields a best-effort result with `degraded` set.

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "madam/model.hpp"
#include "madam/text.hpp"

namespace madam {

struct ParsedAgentReply {
  AgentAnswer answer;
  std::string surface_answer;
  std::string explanation;
  bool degraded = false;
};

struct ParsedAnswerList {
  std::vector<std::string> answers;          // canonical, deduplicated, no "unknown"
  std::vector<std::string> surface_answers;  // items as written
  std::string explanation;
  bool degraded = false;
};

namespace parse_detail {

inline constexpr std::string_view k_answer_label = "answer:";
inline constexpr std::string_view k_explanation_label = "explanation:";
inline constexpr std::string_view k_list_label = "all correct answers:";

inline std::string strip_terminal_period(std::string_view s) {
  s = trim_view(s);
  if (!s.empty() && s.back() == '.') s.remove_suffix(1);
  return trim(s);
}

inline std::string strip_quotes(std::string_view s) {
  s = trim_view(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return trim(s);
}

inline std::pair<std::string_view, std::string_view> split_first_line(std::string_view s) {
  s = trim_view(s);
  auto nl = s.find('\n');
  if (nl == std::string_view::npos) return {s, {}};
  return {trim_view(s.substr(0, nl)), trim_view(s.substr(nl + 1))};
}

/// Reads a list of quoted strings starting just after '['. On success
/// returns the items and sets `end` to one past the closing ']'.
inline std::optional<std::vector<std::string>> scan_quoted_list(std::string_view s, std::size_t pos,
                                                                std::size_t& end) {
  std::vector<std::string> items;
  while (pos < s.size()) {
    char c = s[pos];
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',') {
      ++pos;
      continue;
    }
    if (c == ']') {
      end = pos + 1;
      return items;
    }
    if (c != '"' && c != '\'') return std::nullopt;
    const char quote = c;
    std::string item;
    ++pos;
    bool closed = false;
    while (pos < s.size()) {
      char d = s[pos++];
      if (d == '\\' && pos < s.size()) {
        item.push_back(s[pos++]);
      } else if (d == quote) {
        closed = true;
        break;
      } else {
        item.push_back(d);
      }
    }
    if (!closed) return std::nullopt;
    // an item must be followed by a separator or the closing bracket
    std::size_t k = pos;
    while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
    if (k < s.size() && s[k] != ',' && s[k] != ']' && s[k] != '\n' && s[k] != '\r') return std::nullopt;
    items.push_back(std::move(item));
  }
  return std::nullopt;
}

inline std::vector<std::string> split_any(std::string_view s, std::string_view seps) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || seps.find(s[i]) != std::string_view::npos) {
      auto piece = strip_quotes(strip_terminal_period(s.substr(start, i - start)));
      if (!piece.empty()) out.push_back(std::move(piece));
      start = i + 1;
    }
  }
  return out;
}

inline void finish_answers(ParsedAnswerList& out) {
  std::set<std::string> seen;
  for (const auto& s : out.surface_answers) {
    auto c = canonicalize_answer(s);
    if (c.empty() || c == "unknown") continue;
    if (seen.insert(c).second) out.answers.push_back(std::move(c));
  }
}

inline std::string explanation_after(std::string_view raw, std::size_t from) {
  auto e = ifind(raw, k_explanation_label, from);
  if (e != std::string_view::npos) return trim(raw.substr(e + k_explanation_label.size()));
  auto rest = trim_view(raw.substr(std::min(from, raw.size())));
  while (!rest.empty() && rest.front() == '.') rest.remove_prefix(1);
  return trim(rest);
}

}  // namespace parse_detail

/// "Answer: X. Explanation: Y" -> (X, Y). The answer ends at the period
/// immediately before "Explanation:", so "Washington D.C.. Explanation:"
/// keeps its abbreviation.
inline ParsedAgentReply parse_agent_reply(std::string_view raw) {
  using namespace parse_detail;
  ParsedAgentReply out;
  auto a = ifind(raw, k_answer_label);
  if (a != std::string_view::npos) {
    auto body_start = a + k_answer_label.size();
    auto e = ifind(raw, k_explanation_label, body_start);
    if (e != std::string_view::npos) {
      out.surface_answer = strip_terminal_period(raw.substr(body_start, e - body_start));
      out.explanation = trim(raw.substr(e + k_explanation_label.size()));
    } else {
      auto [line, rest] = split_first_line(raw.substr(body_start));
      out.surface_answer = strip_terminal_period(line);
      out.explanation = std::string(rest);
      out.degraded = true;
    }
  } else {
    auto [line, rest] = split_first_line(raw);
    out.surface_answer = std::string(line);
    out.explanation = std::string(rest);
    out.degraded = true;
  }
  auto canonical = canonicalize_answer(out.surface_answer);
  if (canonical.empty()) out.degraded = true;
  out.answer = canonical == "unknown" ? AgentAnswer::unknown() : AgentAnswer::of(std::move(canonical));
  return out;
}

/// "All Correct Answers: ["a", "b"]. Explanation: ..." -> ({a, b}, ...).
/// Single or double quotes and trailing commas are accepted; unquoted
/// bracket contents are comma-split with `degraded` set.
inline ParsedAnswerList parse_aggregate_reply(std::string_view raw) {
  using namespace parse_detail;
  ParsedAnswerList out;
  auto label = ifind(raw, k_list_label);
  std::size_t after_label = label == std::string_view::npos ? 0 : label + k_list_label.size();
  if (label == std::string_view::npos) out.degraded = true;

  std::size_t p = after_label;
  while (p < raw.size() && (raw[p] == ' ' || raw[p] == '\t')) ++p;
  std::size_t bracket = std::string_view::npos;
  if (p < raw.size() && raw[p] == '[') bracket = p;
  else if (label == std::string_view::npos) bracket = raw.find('[');

  std::size_t list_end = after_label;
  if (bracket != std::string_view::npos) {
    std::size_t end = 0;
    if (auto items = scan_quoted_list(raw, bracket + 1, end)) {
      out.surface_answers = std::move(*items);
      list_end = end;
    } else {
      out.degraded = true;
      auto close = raw.find(']', bracket + 1);
      auto stop = close;
      if (stop == std::string_view::npos) {
        stop = ifind(raw, k_explanation_label, bracket + 1);
        if (stop == std::string_view::npos) stop = raw.size();
      }
      out.surface_answers = split_any(raw.substr(bracket + 1, stop - bracket - 1), ",\n");
      list_end = close == std::string_view::npos ? stop : close + 1;
    }
  } else {
    out.degraded = true;
    auto e = ifind(raw, k_explanation_label, after_label);
    std::string_view region = raw.substr(after_label, e == std::string_view::npos ? std::string_view::npos : e - after_label);
    if (e == std::string_view::npos) region = split_first_line(region).first;
    out.surface_answers = split_any(region, ",\n");
    list_end = e == std::string_view::npos ? after_label + region.size() : e;
  }
  out.explanation = explanation_after(raw, list_end);
  finish_answers(out);
  return out;
}

/// Free-form answer list (the no-retrieval prompt asks for "the exact
/// answer only"): comma- or newline-separated; a bracketed list is also
/// understood. Empty input yields an empty, degraded result.
inline ParsedAnswerList parse_answer_list(std::string_view raw) {
  using namespace parse_detail;
  if (ifind(raw, k_list_label) != std::string_view::npos) return parse_aggregate_reply(raw);
  ParsedAnswerList out;
  auto body = trim_view(raw);
  if (body.empty()) {
    out.degraded = true;
    return out;
  }
  if (auto a = ifind(body, k_answer_label); a == 0) body = trim_view(body.substr(k_answer_label.size()));
  auto e = ifind(body, k_explanation_label);
  if (e != std::string_view::npos) {
    out.explanation = trim(body.substr(e + k_explanation_label.size()));
    body = body.substr(0, e);
  }
  auto t = trim_view(body);
  if (t.size() >= 2 && t.front() == '[' && t.back() == ']') body = t.substr(1, t.size() - 2);
  out.surface_answers = split_any(body, ",\n");
  finish_answers(out);
  if (out.surface_answers.empty()) out.degraded = true;
  return out;
}

}  // namespace madam
