#pragma once

// Line-delimited JSON encodings for corpora and debate transcripts.
//
// Corpus record: {id, question, documents:[{id, text, label, linked_answer?,
// source?}], gold_answers:[...], forbidden_answers:[...]}. Unknown fields on
// either the record or a document are carried through unchanged.

#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "madam/errors.hpp"
#include "madam/model.hpp"

namespace madam {

// --- enums -------------------------------------------------------------------

inline DocLabel parse_doc_label(std::string_view s) {
  auto l = to_lower(s);
  if (l == "supporting" || l == "correct") return DocLabel::supporting;
  if (l == "misinformation" || l == "misinfo") return DocLabel::misinformation;
  if (l == "noise") return DocLabel::noise;
  throw Error("unknown document label '" + std::string(s) + "'");
}

// --- documents / instances ---------------------------------------------------

inline json to_json_value(const Document& d) {
  json j = d.extra.is_object() ? d.extra : json::object();
  j["id"] = d.id;
  j["text"] = d.text;
  j["label"] = std::string(to_string(d.label));
  if (d.linked_answer) j["linked_answer"] = *d.linked_answer;
  else j.erase("linked_answer");
  if (d.source) j["source"] = *d.source;
  else j.erase("source");
  return j;
}

inline Document document_from_json(const json& j) {
  Document d;
  d.id = j.value("id", "");
  d.text = j.at("text").get<std::string>();
  d.label = parse_doc_label(j.at("label").get<std::string>());
  if (j.contains("linked_answer") && !j["linked_answer"].is_null()) d.linked_answer = j["linked_answer"].get<std::string>();
  if (j.contains("source") && !j["source"].is_null()) d.source = j["source"].get<std::string>();
  d.extra = j;
  for (const char* k : {"id", "text", "label", "linked_answer", "source"}) d.extra.erase(k);
  return d;
}

inline json to_json_value(const RamDocsInstance& inst) {
  json j = inst.extra.is_object() ? inst.extra : json::object();
  j["id"] = inst.query.id;
  j["question"] = inst.query.text;
  j["documents"] = json::array();
  for (const auto& d : inst.documents) j["documents"].push_back(to_json_value(d));
  j["gold_answers"] = inst.gold_answers;
  j["forbidden_answers"] = inst.forbidden_answers;
  return j;
}

/// Reads the published release layout ({question, documents:[{text, type,
/// answer}], gold_answers, wrong_answers}) into the native model.
inline RamDocsInstance instance_from_release_json(const json& j, std::size_t ordinal) {
  RamDocsInstance inst;
  if (j.contains("id") && j["id"].is_string()) inst.query.id = j["id"].get<std::string>();
  else if (j.contains("id")) inst.query.id = j["id"].dump();
  else inst.query.id = "q" + std::to_string(ordinal);
  inst.query.text = j.at("question").get<std::string>();
  std::size_t k = 0;
  for (const auto& dj : j.at("documents")) {
    Document d;
    d.id = inst.query.id + "-d" + std::to_string(k++);
    d.text = dj.at("text").get<std::string>();
    d.label = parse_doc_label(dj.at("type").get<std::string>());
    if (d.label != DocLabel::noise && dj.contains("answer") && dj["answer"].is_string()) {
      d.linked_answer = dj["answer"].get<std::string>();
    }
    d.extra = dj;
    for (const char* key : {"text", "type", "answer"}) d.extra.erase(key);
    inst.documents.push_back(std::move(d));
  }
  inst.gold_answers = j.value("gold_answers", std::vector<std::string>{});
  inst.forbidden_answers = j.value("wrong_answers", std::vector<std::string>{});
  inst.extra = j;
  for (const char* key : {"id", "question", "documents", "gold_answers", "wrong_answers"}) inst.extra.erase(key);
  return inst;
}

inline RamDocsInstance instance_from_json(const json& j, std::size_t ordinal = 0) {
  if (!j.contains("forbidden_answers") && j.contains("wrong_answers")) {
    return instance_from_release_json(j, ordinal);
  }
  RamDocsInstance inst;
  inst.query.id = j.at("id").get<std::string>();
  inst.query.text = j.at("question").get<std::string>();
  for (const auto& dj : j.at("documents")) inst.documents.push_back(document_from_json(dj));
  inst.gold_answers = j.at("gold_answers").get<std::vector<std::string>>();
  inst.forbidden_answers = j.value("forbidden_answers", std::vector<std::string>{});
  inst.extra = j;
  for (const char* k : {"id", "question", "documents", "gold_answers", "forbidden_answers"}) inst.extra.erase(k);
  return inst;
}

// --- responses / transcripts -------------------------------------------------

inline json to_json_value(const AgentResponse& r) {
  return json{{"agent_index", r.agent_index},
              {"round", r.round},
              {"answer", r.answer.is_unknown() ? json(nullptr) : json(r.answer.text())},
              {"surface_answer", r.surface_answer},
              {"explanation", r.explanation},
              {"raw", r.raw},
              {"degraded", r.degraded}};
}

inline AgentResponse agent_response_from_json(const json& j) {
  AgentResponse r;
  r.agent_index = j.at("agent_index").get<int>();
  r.round = j.at("round").get<int>();
  r.answer = j.at("answer").is_null() ? AgentAnswer::unknown() : AgentAnswer::of(j["answer"].get<std::string>());
  r.surface_answer = j.value("surface_answer", "");
  r.explanation = j.value("explanation", "");
  r.raw = j.value("raw", "");
  r.degraded = j.value("degraded", false);
  return r;
}

inline json to_json_value(const AggregateResult& a) {
  return json{{"round", a.round},
              {"answers", a.answers},
              {"surface_answers", a.surface_answers},
              {"explanation", a.explanation},
              {"raw", a.raw},
              {"degraded", a.degraded}};
}

inline AggregateResult aggregate_from_json(const json& j) {
  AggregateResult a;
  a.round = j.value("round", 0);
  a.answers = j.value("answers", std::vector<std::string>{});
  a.surface_answers = j.value("surface_answers", std::vector<std::string>{});
  a.explanation = j.value("explanation", "");
  a.raw = j.value("raw", "");
  a.degraded = j.value("degraded", false);
  return a;
}

inline json to_json_value(const CallRecord& c) {
  return json{{"label", c.label}, {"input_tokens", c.input_tokens}, {"output_tokens", c.output_tokens}};
}

inline CallRecord call_record_from_json(const json& j) {
  return CallRecord{j.value("label", ""), j.value("input_tokens", std::int64_t{0}),
                    j.value("output_tokens", std::int64_t{0})};
}

inline json to_json_value(const DebateTranscript& t) {
  json rounds = json::array();
  for (std::size_t i = 0; i < t.rounds.size(); ++i) {
    const auto& r = t.rounds[i];
    json responses = json::array();
    for (const auto& resp : r.responses) responses.push_back(to_json_value(resp));
    rounds.push_back(json{{"round", static_cast<int>(i + 1)},
                          {"shuffle_seed", r.shuffle_seed},
                          {"shuffle_permutation", r.shuffle_permutation},
                          {"responses", responses},
                          {"aggregate", to_json_value(r.aggregate)}});
  }
  json usage = json::array();
  for (const auto& c : t.usage) usage.push_back(to_json_value(c));
  return json{{"instance_id", t.instance_id},
              {"rounds", rounds},
              {"stop_round", t.stop_round},
              {"stop_reason", std::string(to_string(t.stop_reason))},
              {"usage", usage}};
}

inline DebateTranscript transcript_from_json(const json& j) {
  DebateTranscript t;
  t.instance_id = j.at("instance_id").get<std::string>();
  for (const auto& rj : j.at("rounds")) {
    RoundRecord r;
    for (const auto& resp : rj.at("responses")) r.responses.push_back(agent_response_from_json(resp));
    r.aggregate = aggregate_from_json(rj.at("aggregate"));
    r.shuffle_permutation = rj.value("shuffle_permutation", std::vector<int>{});
    r.shuffle_seed = rj.value("shuffle_seed", std::uint64_t{0});
    t.rounds.push_back(std::move(r));
  }
  t.stop_round = j.value("stop_round", 0);
  t.stop_reason = j.value("stop_reason", "") == "converged" ? StopReason::converged : StopReason::max_rounds;
  for (const auto& c : j.value("usage", json::array())) t.usage.push_back(call_record_from_json(c));
  return t;
}

// --- JSONL -------------------------------------------------------------------

/// Calls `fn(record, line_number)` for every non-blank line.
inline void for_each_jsonl(const std::string& path, const std::function<void(const json&, std::size_t)>& fn) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim_view(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    fn(j, lineno);
  }
}

inline Corpus read_corpus(const std::string& path) {
  Corpus corpus;
  for_each_jsonl(path, [&](const json& j, std::size_t lineno) {
    try {
      corpus.push_back(instance_from_json(j, corpus.size()));
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return corpus;
}

inline std::string corpus_to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& inst : corpus) {
    out += to_json_value(inst).dump();
    out += '\n';
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << contents;
  if (!out) throw Error("write failed for '" + path + "'");
}

inline void write_corpus(const std::string& path, const Corpus& corpus) {
  write_text_file(path, corpus_to_jsonl(corpus));
}

}  // namespace madam
