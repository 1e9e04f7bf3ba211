#pragma once

// Domain types shared by the engine, dataset and evaluation layers.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "madam/text.hpp"

namespace madam {

using json = nlohmann::json;

enum class DocLabel { supporting, misinformation, noise };

inline std::string_view to_string(DocLabel l) {
  switch (l) {
    case DocLabel::supporting: return "supporting";
    case DocLabel::misinformation: return "misinformation";
    case DocLabel::noise: return "noise";
  }
  return "noise";
}

struct Query {
  std::string id;
  std::string text;
};

struct Document {
  std::string id;
  std::string text;
  DocLabel label = DocLabel::noise;
  /// Answer the passage backs (supporting) or promotes (misinformation).
  std::optional<std::string> linked_answer;
  std::optional<std::string> source;
  /// Fields not part of the record contract, kept for round-trips.
  json extra = json::object();
};

struct RamDocsInstance {
  Query query;
  std::vector<Document> documents;
  /// Ordered, deduplicated under canonicalize_answer.
  std::vector<std::string> gold_answers;
  /// Answers backed only by misinformation documents.
  std::vector<std::string> forbidden_answers;
  json extra = json::object();
};

using Corpus = std::vector<RamDocsInstance>;

/// An agent's answer: a canonical string, or the UNKNOWN sentinel. The
/// sentinel is distinct from the empty string.
class AgentAnswer {
 public:
  AgentAnswer() = default;
  static AgentAnswer unknown() {
    AgentAnswer a;
    a.unknown_ = true;
    return a;
  }
  static AgentAnswer of(std::string canonical) {
    AgentAnswer a;
    a.text_ = std::move(canonical);
    return a;
  }
  bool is_unknown() const noexcept { return unknown_; }
  const std::string& text() const noexcept { return text_; }
  std::string display() const { return unknown_ ? "Unknown" : text_; }

  friend bool operator==(const AgentAnswer&, const AgentAnswer&) = default;

 private:
  bool unknown_ = false;
  std::string text_;
};

struct AgentResponse {
  int agent_index = 0;  // 1-based
  int round = 1;
  AgentAnswer answer;
  /// Answer text as written by the model, before canonicalization.
  std::string surface_answer;
  std::string explanation;
  std::string raw;
  /// Reply did not follow the requested format; fields came from fallback.
  bool degraded = false;
};

struct AggregateResult {
  int round = 0;
  /// Canonical answers, in reply order, deduplicated; empty means unknown.
  std::vector<std::string> answers;
  std::vector<std::string> surface_answers;
  std::string explanation;
  std::string raw;
  bool degraded = false;
};

enum class ConvergenceComparison { normalized_answer, raw_answer };

struct DebateConfig {
  int max_rounds = 3;
  std::uint64_t shuffle_seed = 0;
  ConvergenceComparison convergence = ConvergenceComparison::normalized_answer;
};

/// One backend call as seen by the usage ledger.
struct CallRecord {
  std::string label;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
};

struct UsageTotals {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t calls = 0;
};

inline UsageTotals total_usage(const std::vector<CallRecord>& calls) {
  UsageTotals t;
  for (const auto& c : calls) {
    t.input_tokens += c.input_tokens;
    t.output_tokens += c.output_tokens;
    ++t.calls;
  }
  return t;
}

struct RoundRecord {
  std::vector<AgentResponse> responses;  // indexed by agent, not by shuffle
  AggregateResult aggregate;
  /// 1-based agent indices in the order the aggregator saw them.
  std::vector<int> shuffle_permutation;
  std::uint64_t shuffle_seed = 0;
};

enum class StopReason { converged, max_rounds };

inline std::string_view to_string(StopReason r) {
  return r == StopReason::converged ? "converged" : "max_rounds";
}

struct DebateTranscript {
  std::string instance_id;
  std::vector<RoundRecord> rounds;
  int stop_round = 0;
  StopReason stop_reason = StopReason::max_rounds;
  std::vector<CallRecord> usage;

  const AggregateResult* final_aggregate() const {
    return rounds.empty() ? nullptr : &rounds.back().aggregate;
  }
};

// --- validation --------------------------------------------------------------

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationOptions {
  std::size_t chunk_word_budget = 100;
  /// Enforce the misinformation/noise count bounds of constructor output.
  bool constructor_bounds = true;
  std::size_t max_misinformation_docs = 2;
  std::size_t max_noise_docs = 2;
};

/// Ordered set of canonical strings from arbitrary surface answers.
inline std::vector<std::string> canonical_set(const std::vector<std::string>& answers) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& a : answers) {
    auto c = canonicalize_answer(a);
    if (seen.insert(c).second) out.push_back(std::move(c));
  }
  return out;
}

/// Checks every RamDocsInstance invariant; an empty result means valid.
inline std::vector<Violation> validate_instance(const RamDocsInstance& inst,
                                                const ValidationOptions& opt = {}) {
  std::vector<Violation> out;
  auto fail = [&](std::string field, std::string msg) {
    out.push_back({std::move(field), std::move(msg)});
  };

  if (trim_view(inst.query.text).empty()) fail("question", "question text is empty");
  if (inst.query.id.empty()) fail("id", "instance id is empty");

  const auto gold = canonical_set(inst.gold_answers);
  const auto forbidden = canonical_set(inst.forbidden_answers);
  const std::set<std::string> gold_set(gold.begin(), gold.end());
  const std::set<std::string> forbidden_set(forbidden.begin(), forbidden.end());

  if (gold.empty() || gold.size() > 3) {
    fail("gold_answers", "gold_answers cardinality " + std::to_string(gold.size()) +
                             (gold.empty() ? " < 1" : " > 3"));
  }
  for (const auto& g : gold) {
    if (g.empty()) fail("gold_answers", "gold answer canonicalizes to an empty string");
    if (forbidden_set.count(g)) fail("forbidden_answers", "answer '" + g + "' is both gold and forbidden");
  }

  std::map<std::string, std::size_t> supporting_by_answer;
  std::map<std::string, std::size_t> misinfo_by_answer;
  std::size_t misinfo = 0;
  std::size_t noise = 0;
  std::set<std::string> doc_ids;

  for (std::size_t i = 0; i < inst.documents.size(); ++i) {
    const auto& d = inst.documents[i];
    const std::string field = "documents[" + std::to_string(i) + "]";
    if (!d.id.empty() && !doc_ids.insert(d.id).second) fail(field + ".id", "duplicate document id '" + d.id + "'");
    const auto words = word_count(d.text);
    if (words > opt.chunk_word_budget) {
      fail(field + ".text", "word count " + std::to_string(words) + " > " +
                                std::to_string(opt.chunk_word_budget));
    }
    switch (d.label) {
      case DocLabel::noise:
        ++noise;
        if (d.linked_answer) fail(field + ".linked_answer", "noise document carries a linked answer");
        break;
      case DocLabel::supporting:
      case DocLabel::misinformation: {
        const bool sup = d.label == DocLabel::supporting;
        if (!sup) ++misinfo;
        if (!d.linked_answer) {
          fail(field + ".linked_answer", std::string(to_string(d.label)) + " document has no linked answer");
          break;
        }
        const auto key = canonicalize_answer(*d.linked_answer);
        if (!contains_answer(d.text, *d.linked_answer)) {
          fail(field + ".text", "text does not contain linked answer '" + *d.linked_answer + "'");
        }
        if (sup) {
          ++supporting_by_answer[key];
          if (!gold_set.count(key)) fail(field + ".linked_answer", "supporting answer '" + key + "' is not gold");
        } else {
          ++misinfo_by_answer[key];
          if (!forbidden_set.count(key)) {
            fail(field + ".linked_answer", "misinformation answer '" + key + "' is not forbidden");
          }
        }
        break;
      }
    }
  }

  for (const auto& g : gold) {
    if (!supporting_by_answer.count(g)) fail("gold_answers", "gold answer '" + g + "' has no supporting document");
  }
  for (const auto& f : forbidden) {
    if (!misinfo_by_answer.count(f)) {
      fail("forbidden_answers", "forbidden answer '" + f + "' has no misinformation document");
    }
    if (supporting_by_answer.count(f)) {
      fail("forbidden_answers", "forbidden answer '" + f + "' has a supporting document");
    }
  }
  if (opt.constructor_bounds) {
    if (misinfo > opt.max_misinformation_docs) {
      fail("documents", "misinformation document count " + std::to_string(misinfo) + " > " +
                            std::to_string(opt.max_misinformation_docs));
    }
    if (noise > opt.max_noise_docs) {
      fail("documents", "noise document count " + std::to_string(noise) + " > " +
                            std::to_string(opt.max_noise_docs));
    }
  }
  return out;
}

}  // namespace madam
