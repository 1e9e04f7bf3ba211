#pragma once

// Conflict-corpus construction: chunking, supporting-chunk selection,
// entity-swap misinformation, noise injection, controlled subsets and
// corpus statistics.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "madam/corpus_io.hpp"
#include "madam/errors.hpp"
#include "madam/model.hpp"
#include "madam/rng.hpp"

namespace madam {

// --- types ---------------------------------------------------------------------

struct CandidateDocument {
  std::string text;
  std::optional<std::string> source;
};

struct Disambiguation {
  std::string surface_answer;
  std::string disambiguated_query;
  std::vector<CandidateDocument> candidate_documents;
};

struct SeedEntry {
  Query ambiguous_query;
  std::vector<Disambiguation> disambiguations;
};

struct IntRange {
  std::int64_t low = 0;
  std::int64_t high = 0;
};

struct ConstructionPolicy {
  IntRange answers_per_query{1, 3};
  IntRange docs_per_answer{1, 3};
  IntRange misinfo_docs{0, 2};
  IntRange noise_docs{0, 2};
  std::size_t chunk_word_budget = 100;
  std::uint64_t rng_seed = 0;

  void validate() const {
    auto check = [](const IntRange& r, const char* name) {
      if (r.low < 0 || r.high < r.low) {
        throw PreconditionError(std::string("policy range ") + name + " must satisfy 0 <= low <= high");
      }
    };
    check(answers_per_query, "answers_per_query");
    check(docs_per_answer, "docs_per_answer");
    check(misinfo_docs, "misinfo_docs");
    check(noise_docs, "noise_docs");
    if (chunk_word_budget < 1) throw PreconditionError("policy chunk_word_budget must be >= 1");
  }

  /// Missing keys keep their defaults. Ranges are [low, high] arrays.
  static ConstructionPolicy from_json(const json& j) {
    ConstructionPolicy p;
    auto range = [&](const char* key, IntRange& r) {
      if (!j.contains(key)) return;
      const auto& v = j.at(key);
      if (!v.is_array() || v.size() != 2) throw Error(std::string("policy '") + key + "' must be [low, high]");
      r = IntRange{v[0].get<std::int64_t>(), v[1].get<std::int64_t>()};
    };
    range("answers_per_query", p.answers_per_query);
    range("docs_per_answer", p.docs_per_answer);
    range("misinfo_docs", p.misinfo_docs);
    range("noise_docs", p.noise_docs);
    p.chunk_word_budget = j.value("chunk_word_budget", p.chunk_word_budget);
    p.rng_seed = j.value("rng_seed", p.rng_seed);
    p.validate();
    return p;
  }
};

// --- chunking ------------------------------------------------------------------

/// Consecutive chunks of exactly `budget` words (the last may be shorter),
/// each re-joined with single spaces.
inline std::vector<std::string> chunk_document(std::string_view text, std::size_t budget) {
  if (budget < 1) throw PreconditionError("chunk_document: budget must be >= 1");
  std::vector<std::string> chunks;
  auto words = split_words(text);
  for (std::size_t i = 0; i < words.size(); i += budget) {
    auto end = std::min(words.size(), i + budget);
    std::vector<std::string_view> part(words.begin() + static_cast<std::ptrdiff_t>(i),
                                       words.begin() + static_cast<std::ptrdiff_t>(end));
    chunks.push_back(join(part, " "));
  }
  return chunks;
}

struct SupportSelection {
  std::vector<Document> documents;
  /// Fewer than k chunks matched.
  bool shortfall = false;
};

/// First k chunks (source order) containing `answer` under canonicalization.
inline SupportSelection select_supporting_chunks(const std::vector<std::string>& chunks, const std::string& answer,
                                                 std::size_t k) {
  if (k < 1) throw PreconditionError("select_supporting_chunks: k must be >= 1");
  SupportSelection out;
  for (const auto& c : chunks) {
    if (out.documents.size() == k) break;
    if (!contains_answer(c, answer)) continue;
    Document d;
    d.text = c;
    d.label = DocLabel::supporting;
    d.linked_answer = answer;
    out.documents.push_back(std::move(d));
  }
  if (out.documents.empty()) throw NoSupportingChunk("no chunk contains answer '" + answer + "'");
  out.shortfall = out.documents.size() < k;
  return out;
}

// --- entity swap -----------------------------------------------------------------

namespace dataset_detail {

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

/// Case-insensitive occurrences of `needle` not glued to a letter or digit.
inline std::vector<std::size_t> bounded_occurrences(std::string_view hay, std::string_view needle) {
  std::vector<std::size_t> out;
  if (needle.empty()) return out;
  for (auto pos = ifind(hay, needle); pos != std::string_view::npos; pos = ifind(hay, needle, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(hay[pos - 1]) || !is_word_char(needle.front());
    const auto end = pos + needle.size();
    const bool right_ok = end >= hay.size() || !is_word_char(hay[end]) || !is_word_char(needle.back());
    if (left_ok && right_ok) out.push_back(pos);
  }
  return out;
}

}  // namespace dataset_detail

/// Entity swap: every standalone occurrence of the document's linked answer
/// becomes `replacement`; the result is a misinformation document linked
/// to the replacement. `doc` itself is not modified.
inline Document inject_misinformation(const Document& doc, const std::string& replacement) {
  if (!doc.linked_answer) throw AnswerNotFound("document '" + doc.id + "' has no linked answer");
  const auto& answer = *doc.linked_answer;
  if (canonicalize_answer(replacement) == canonicalize_answer(answer)) {
    throw ReplacementEqualsAnswer("replacement '" + replacement + "' equals answer '" + answer + "'");
  }
  auto hits = dataset_detail::bounded_occurrences(doc.text, answer);
  if (hits.empty()) throw AnswerNotFound("answer '" + answer + "' not found in document '" + doc.id + "'");
  Document out = doc;
  for (auto it = hits.rbegin(); it != hits.rend(); ++it) out.text.replace(*it, answer.size(), replacement);
  out.label = DocLabel::misinformation;
  out.linked_answer = replacement;
  return out;
}

/// Drops whole words from the ends until `text` has at most `budget` words,
/// keeping the first occurrence of `anchor` inside the window. Returns the
/// text re-joined with single spaces.
inline std::string fit_to_budget(const std::string& text, std::string_view anchor, std::size_t budget) {
  auto words = split_words(text);
  if (words.size() <= budget) return text;
  auto at = ifind(text, anchor);
  std::size_t a_begin = at == std::string::npos ? 0 : at;
  std::size_t a_end = at == std::string::npos ? 0 : at + anchor.size();
  std::size_t lo = 0;
  std::size_t hi = words.size();
  auto offset = [&](std::string_view w) { return static_cast<std::size_t>(w.data() - text.data()); };
  while (hi - lo > budget) {
    if (offset(words[hi - 1]) >= a_end) --hi;
    else if (offset(words[lo]) + words[lo].size() <= a_begin) ++lo;
    else --hi;
  }
  std::vector<std::string_view> kept(words.begin() + static_cast<std::ptrdiff_t>(lo),
                                     words.begin() + static_cast<std::ptrdiff_t>(hi));
  return join(kept, " ");
}

// --- instance construction -------------------------------------------------------

namespace dataset_detail {

struct Chunk {
  std::string text;
  std::optional<std::string> source;
};

inline std::vector<Chunk> matching_chunks(const Disambiguation& d, std::size_t budget) {
  std::vector<Chunk> out;
  std::set<std::string> seen;
  for (const auto& cand : d.candidate_documents) {
    for (auto& c : chunk_document(cand.text, budget)) {
      if (!contains_answer(c, d.surface_answer)) continue;
      if (!seen.insert(c).second) continue;
      out.push_back(Chunk{std::move(c), cand.source});
    }
  }
  return out;
}

/// First `k` elements of a seeded shuffle of `items`.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> items, std::size_t k, SplitMix64& rng) {
  seeded_shuffle(items, rng);
  items.resize(std::min(k, items.size()));
  return items;
}

}  // namespace dataset_detail

/// Builds one instance: samples gold answers and their supporting chunks,
/// entity-swaps some supporting chunks into misinformation, adds noise, and
/// shuffles. Replacement entities come from the entry's unchosen
/// disambiguations first, then from `distractors`.
inline RamDocsInstance build_instance(const SeedEntry& entry, const ConstructionPolicy& policy,
                                      const std::vector<Document>& noise_pool, SplitMix64& rng,
                                      const std::vector<std::string>& distractors = {}) {
  using namespace dataset_detail;
  policy.validate();
  const auto budget = policy.chunk_word_budget;
  if (static_cast<std::int64_t>(noise_pool.size()) < policy.noise_docs.high) {
    throw InsufficientSupply("noise pool", std::to_string(noise_pool.size()) + " < " +
                                               std::to_string(policy.noise_docs.high));
  }

  std::vector<std::vector<Chunk>> matches;
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < entry.disambiguations.size(); ++i) {
    matches.push_back(matching_chunks(entry.disambiguations[i], budget));
    if (!matches.back().empty() && !canonicalize_answer(entry.disambiguations[i].surface_answer).empty()) {
      usable.push_back(i);
    }
  }
  if (usable.empty()) throw InsufficientSupply("supporting chunks", "entry '" + entry.ambiguous_query.id + "'");

  // gold answers, distinct under canonicalization
  auto answer_count = static_cast<std::size_t>(
      std::clamp<std::int64_t>(rng.between(policy.answers_per_query.low, policy.answers_per_query.high), 1,
                               static_cast<std::int64_t>(usable.size())));
  std::vector<std::size_t> chosen;
  std::set<std::string> gold_canon;
  for (auto i : sample_without_replacement(usable, usable.size(), rng)) {
    if (chosen.size() == answer_count) break;
    if (gold_canon.insert(canonicalize_answer(entry.disambiguations[i].surface_answer)).second) chosen.push_back(i);
  }

  RamDocsInstance inst;
  inst.query = entry.ambiguous_query;
  std::vector<Document> supporting;
  std::set<std::string> used_texts;
  for (auto i : chosen) {
    const auto& dis = entry.disambiguations[i];
    auto want = static_cast<std::size_t>(std::max<std::int64_t>(
        1, rng.between(policy.docs_per_answer.low, policy.docs_per_answer.high)));
    std::size_t taken = 0;
    for (const auto& c : matches[i]) {
      if (taken == want) break;
      if (!used_texts.insert(c.text).second) continue;
      Document d;
      d.text = c.text;
      d.label = DocLabel::supporting;
      d.linked_answer = dis.surface_answer;
      d.source = c.source;
      supporting.push_back(std::move(d));
      ++taken;
    }
    if (taken > 0) inst.gold_answers.push_back(dis.surface_answer);
  }
  if (inst.gold_answers.empty()) throw InsufficientSupply("supporting chunks", "all chunks shared between answers");
  gold_canon.clear();
  for (const auto& g : inst.gold_answers) gold_canon.insert(canonicalize_answer(g));

  // replacement entities
  auto collect = [&](auto&& strings) {
    std::vector<std::string> pool;
    std::set<std::string> seen;
    for (const std::string& s : strings) {
      auto c = canonicalize_answer(s);
      if (c.empty() || gold_canon.count(c) || !seen.insert(c).second) continue;
      pool.push_back(s);
    }
    return pool;
  };
  std::vector<std::string> sibling_answers;
  for (std::size_t i = 0; i < entry.disambiguations.size(); ++i) {
    if (std::find(chosen.begin(), chosen.end(), i) == chosen.end()) {
      sibling_answers.push_back(entry.disambiguations[i].surface_answer);
    }
  }
  const auto siblings = collect(sibling_answers);
  const auto fallback = collect(distractors);

  // Siblings in a random rotation, then distractors in a random rotation.
  auto rotated = [&rng](const std::vector<std::string>& v) {
    std::vector<std::string> out;
    if (v.empty()) return out;
    const auto s = rng.below(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) out.push_back(v[(s + k) % v.size()]);
    return out;
  };

  std::vector<Document> misinformation;
  std::vector<std::string> forbidden;
  std::set<std::string> forbidden_canon;
  const auto misinfo_count = rng.between(policy.misinfo_docs.low, policy.misinfo_docs.high);
  for (std::int64_t m = 0; m < misinfo_count; ++m) {
    auto candidates = rotated(siblings);
    for (auto& d : rotated(fallback)) candidates.push_back(std::move(d));
    if (candidates.empty()) {
      throw InsufficientSupply("misinformation replacements", "entry '" + entry.ambiguous_query.id + "'");
    }
    const auto start = rng.below(supporting.size());
    bool placed = false;
    for (std::size_t c = 0; c < candidates.size() && !placed; ++c) {
      const auto& replacement = candidates[c];
      for (std::size_t off = 0; off < supporting.size() && !placed; ++off) {
        const auto& src = supporting[(start + off) % supporting.size()];
        Document doc;
        try {
          doc = inject_misinformation(src, replacement);
        } catch (const AnswerNotFound&) {
          continue;
        }
        doc.text = fit_to_budget(doc.text, replacement, budget);
        if (!contains_answer(doc.text, replacement) || used_texts.count(doc.text)) continue;
        used_texts.insert(doc.text);
        misinformation.push_back(std::move(doc));
        if (forbidden_canon.insert(canonicalize_answer(replacement)).second) forbidden.push_back(replacement);
        placed = true;
      }
    }
    if (!placed) {
      throw InsufficientSupply("misinformation source documents", "entry '" + entry.ambiguous_query.id + "'");
    }
  }

  const auto noise_count = static_cast<std::size_t>(rng.between(policy.noise_docs.low, policy.noise_docs.high));
  std::vector<std::size_t> pool_idx(noise_pool.size());
  std::iota(pool_idx.begin(), pool_idx.end(), std::size_t{0});
  std::vector<Document> noise;
  for (auto i : sample_without_replacement(std::move(pool_idx), noise_count, rng)) {
    Document d = noise_pool[i];
    d.label = DocLabel::noise;
    d.linked_answer.reset();
    if (word_count(d.text) > budget) d.text = chunk_document(d.text, budget).front();
    noise.push_back(std::move(d));
  }

  auto& docs = inst.documents;
  for (auto* group : {&supporting, &misinformation, &noise}) {
    for (auto& d : *group) docs.push_back(std::move(d));
  }
  seeded_shuffle(docs, rng);
  for (std::size_t k = 0; k < docs.size(); ++k) docs[k].id = inst.query.id + "-d" + std::to_string(k);
  inst.forbidden_answers = std::move(forbidden);

  ValidationOptions vopt;
  vopt.chunk_word_budget = budget;
  vopt.max_misinformation_docs = static_cast<std::size_t>(policy.misinfo_docs.high);
  vopt.max_noise_docs = static_cast<std::size_t>(policy.noise_docs.high);
  if (auto v = validate_instance(inst, vopt); !v.empty()) {
    throw Error("constructed instance '" + inst.query.id + "' is invalid: " + v.front().field + ": " + v.front().message);
  }
  return inst;
}

struct SkippedEntry {
  std::string id;
  std::string reason;
};

struct BuildResult {
  Corpus corpus;
  std::vector<SkippedEntry> skipped;
};

/// Independent generator per entry, derived from (policy seed, entry id), so
/// entries can be built in any order without changing the output.
inline SplitMix64 entry_rng(std::uint64_t corpus_seed, const std::string& entry_id) {
  return SplitMix64(derive_seed(corpus_seed, fnv1a64(entry_id)));
}

/// Entries that cannot be built (InsufficientSupply) are skipped and listed.
inline BuildResult build_corpus(const std::vector<SeedEntry>& entries, const ConstructionPolicy& policy,
                                const std::vector<Document>& noise_pool,
                                const std::vector<std::string>& distractors = {}) {
  BuildResult out;
  for (const auto& e : entries) {
    auto rng = entry_rng(policy.rng_seed, e.ambiguous_query.id);
    try {
      out.corpus.push_back(build_instance(e, policy, noise_pool, rng, distractors));
    } catch (const InsufficientSupply& err) {
      out.skipped.push_back({e.ambiguous_query.id, err.what()});
    }
  }
  return out;
}

// --- controlled subsets ----------------------------------------------------------

struct SubsetResult {
  Corpus corpus;
  std::vector<SkippedEntry> skipped;
};

namespace dataset_detail {

/// Supporting documents per canonical gold answer, in document order.
inline std::map<std::string, std::vector<const Document*>> supporting_by_answer(const RamDocsInstance& inst) {
  std::map<std::string, std::vector<const Document*>> out;
  for (const auto& d : inst.documents) {
    if (d.label == DocLabel::supporting && d.linked_answer) out[canonicalize_answer(*d.linked_answer)].push_back(&d);
  }
  return out;
}

inline RamDocsInstance derived_shell(const RamDocsInstance& src) {
  RamDocsInstance out;
  out.query = src.query;
  out.extra = src.extra;
  return out;
}

}  // namespace dataset_detail

/// Two gold answers, one backed by 1 supporting document and the other by
/// k; no misinformation, no noise.
inline SubsetResult make_imbalance_subset(const Corpus& corpus, int k) {
  if (k < 1 || k > 3) throw PreconditionError("imbalance level must be in [1, 3], got " + std::to_string(k));
  SubsetResult out;
  for (const auto& inst : corpus) {
    if (canonical_set(inst.gold_answers).size() < 2) {
      out.skipped.push_back({inst.query.id, "fewer than 2 gold answers"});
      continue;
    }
    auto by = dataset_detail::supporting_by_answer(inst);
    auto supply = [&](const std::string& g) {
      auto it = by.find(canonicalize_answer(g));
      return it == by.end() ? std::size_t{0} : it->second.size();
    };
    const std::string* heavy = nullptr;
    const std::string* light = nullptr;
    for (const auto& b : inst.gold_answers) {
      if (supply(b) < static_cast<std::size_t>(k)) continue;
      for (const auto& a : inst.gold_answers) {
        if (canonicalize_answer(a) != canonicalize_answer(b) && supply(a) >= 1) {
          heavy = &b;
          light = &a;
          break;
        }
      }
      if (heavy) break;
    }
    if (!heavy) {
      out.skipped.push_back({inst.query.id, "not enough supporting documents for level " + std::to_string(k)});
      continue;
    }
    std::set<const Document*> keep;
    keep.insert(by[canonicalize_answer(*light)].front());
    const auto& hv = by[canonicalize_answer(*heavy)];
    keep.insert(hv.begin(), hv.begin() + k);

    auto o = dataset_detail::derived_shell(inst);
    for (const auto& d : inst.documents) {
      if (keep.count(&d)) o.documents.push_back(d);
    }
    for (const auto& g : inst.gold_answers) {
      if (&g == light || &g == heavy) o.gold_answers.push_back(g);
    }
    out.corpus.push_back(std::move(o));
  }
  if (out.corpus.empty()) throw InsufficientSupply("instances eligible for the imbalance subset");
  return out;
}

/// Two gold answers with one supporting document each, plus m documents
/// that all promote the same incorrect alternative. The alternative is the
/// instance's first forbidden answer, else the first usable distractor.
inline SubsetResult make_misinfo_subset(const Corpus& corpus, int m, std::size_t chunk_word_budget = 100,
                                        const std::vector<std::string>& distractors = {}) {
  if (m < 1 || m > 3) throw PreconditionError("misinformation level must be in [1, 3], got " + std::to_string(m));
  SubsetResult out;
  for (const auto& inst : corpus) {
    auto by = dataset_detail::supporting_by_answer(inst);
    std::vector<const std::string*> pair;
    std::set<std::string> gold_canon;
    for (const auto& g : inst.gold_answers) {
      auto c = canonicalize_answer(g);
      gold_canon.insert(c);
      if (pair.size() < 2 && by.count(c) && std::none_of(pair.begin(), pair.end(), [&](auto* p) {
            return canonicalize_answer(*p) == c;
          })) {
        pair.push_back(&g);
      }
    }
    if (pair.size() < 2) {
      out.skipped.push_back({inst.query.id, "fewer than 2 supported gold answers"});
      continue;
    }
    std::optional<std::string> alternative;
    for (const auto* pool : {&inst.forbidden_answers, &distractors}) {
      for (const auto& f : *pool) {
        auto c = canonicalize_answer(f);
        if (!c.empty() && !gold_canon.count(c)) {
          alternative = f;
          break;
        }
      }
      if (alternative) break;
    }
    if (!alternative) {
      out.skipped.push_back({inst.query.id, "no incorrect alternative available"});
      continue;
    }
    const auto alt_canon = canonicalize_answer(*alternative);

    const Document* keep_a = by[canonicalize_answer(*pair[0])].front();
    const Document* keep_b = by[canonicalize_answer(*pair[1])].front();
    std::set<std::string> texts{keep_a->text, keep_b->text};
    std::vector<Document> misinfo;
    for (const auto& d : inst.documents) {
      if (misinfo.size() == static_cast<std::size_t>(m)) break;
      if (d.label == DocLabel::misinformation && d.linked_answer && canonicalize_answer(*d.linked_answer) == alt_canon &&
          texts.insert(d.text).second) {
        misinfo.push_back(d);
      }
    }
    for (const auto& d : inst.documents) {
      if (misinfo.size() == static_cast<std::size_t>(m)) break;
      if (d.label != DocLabel::supporting || !d.linked_answer) continue;
      try {
        auto swapped = inject_misinformation(d, *alternative);
        swapped.text = fit_to_budget(swapped.text, *alternative, chunk_word_budget);
        if (!contains_answer(swapped.text, *alternative) || !texts.insert(swapped.text).second) continue;
        swapped.id = d.id + "-mis";
        misinfo.push_back(std::move(swapped));
      } catch (const Error&) {
        continue;
      }
    }
    if (misinfo.size() < static_cast<std::size_t>(m)) {
      out.skipped.push_back({inst.query.id, "cannot derive " + std::to_string(m) + " misinformation documents"});
      continue;
    }
    auto o = dataset_detail::derived_shell(inst);
    o.documents.push_back(*keep_a);
    o.documents.push_back(*keep_b);
    for (auto& d : misinfo) o.documents.push_back(std::move(d));
    o.gold_answers = {*pair[0], *pair[1]};
    o.forbidden_answers = {*alternative};
    out.corpus.push_back(std::move(o));
  }
  if (out.corpus.empty()) throw InsufficientSupply("instances eligible for the misinformation subset");
  return out;
}

// --- statistics ------------------------------------------------------------------

struct StatDimension {
  std::string name;
  double mean = 0.0;
  /// value -> number of observations
  std::map<std::int64_t, std::int64_t> histogram;

  double histogram_mean() const {
    std::int64_t n = 0;
    double sum = 0.0;
    for (auto [v, c] : histogram) {
      n += c;
      sum += static_cast<double>(v) * static_cast<double>(c);
    }
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
  }
};

struct CorpusStats {
  std::size_t instances = 0;
  StatDimension total_docs{"total_docs", 0.0, {}};
  StatDimension supporting_docs{"supporting_docs", 0.0, {}};
  StatDimension misinformation_docs{"misinformation_docs", 0.0, {}};
  StatDimension noise_docs{"noise_docs", 0.0, {}};
  StatDimension gold_answers{"gold_answers", 0.0, {}};
  StatDimension forbidden_answers{"forbidden_answers", 0.0, {}};
  /// Pooled over every gold answer of every instance.
  StatDimension docs_per_gold_answer{"docs_per_gold_answer", 0.0, {}};
  /// Pooled over every forbidden answer of every instance.
  StatDimension docs_per_forbidden_answer{"docs_per_forbidden_answer", 0.0, {}};

  std::vector<const StatDimension*> dimensions() const {
    return {&total_docs,   &supporting_docs,   &misinformation_docs,  &noise_docs,
            &gold_answers, &forbidden_answers, &docs_per_gold_answer, &docs_per_forbidden_answer};
  }
};

inline CorpusStats compute_stats(const Corpus& corpus) {
  if (corpus.empty()) throw EmptyCorpus();
  CorpusStats s;
  s.instances = corpus.size();
  for (const auto& inst : corpus) {
    std::int64_t sup = 0, mis = 0, noi = 0;
    std::map<std::string, std::int64_t> sup_by, mis_by;
    for (const auto& d : inst.documents) {
      const auto key = d.linked_answer ? canonicalize_answer(*d.linked_answer) : std::string();
      switch (d.label) {
        case DocLabel::supporting: ++sup; ++sup_by[key]; break;
        case DocLabel::misinformation: ++mis; ++mis_by[key]; break;
        case DocLabel::noise: ++noi; break;
      }
    }
    const auto gold = canonical_set(inst.gold_answers);
    const auto forb = canonical_set(inst.forbidden_answers);
    ++s.total_docs.histogram[static_cast<std::int64_t>(inst.documents.size())];
    ++s.supporting_docs.histogram[sup];
    ++s.misinformation_docs.histogram[mis];
    ++s.noise_docs.histogram[noi];
    ++s.gold_answers.histogram[static_cast<std::int64_t>(gold.size())];
    ++s.forbidden_answers.histogram[static_cast<std::int64_t>(forb.size())];
    for (const auto& g : gold) ++s.docs_per_gold_answer.histogram[sup_by.count(g) ? sup_by[g] : 0];
    for (const auto& f : forb) ++s.docs_per_forbidden_answer.histogram[mis_by.count(f) ? mis_by[f] : 0];
  }
  for (auto* d : {&s.total_docs, &s.supporting_docs, &s.misinformation_docs, &s.noise_docs, &s.gold_answers,
                  &s.forbidden_answers, &s.docs_per_gold_answer, &s.docs_per_forbidden_answer}) {
    d->mean = d->histogram_mean();
  }
  return s;
}

inline json to_json_value(const CorpusStats& s) {
  json j{{"instances", s.instances}};
  for (const auto* d : s.dimensions()) {
    json hist = json::object();
    for (auto [v, c] : d->histogram) hist[std::to_string(v)] = c;
    j[d->name] = json{{"mean", d->mean}, {"histogram", hist}};
  }
  return j;
}

// --- input files -----------------------------------------------------------------

/// {id?, ambiguous_query: "..." | {id, text}, disambiguations: [{answer,
/// query, documents: ["..." | {text, source?}]}]}
inline SeedEntry seed_entry_from_json(const json& j, std::size_t ordinal) {
  SeedEntry e;
  const auto& q = j.at("ambiguous_query");
  if (q.is_object()) {
    e.ambiguous_query.id = q.value("id", "");
    e.ambiguous_query.text = q.at("text").get<std::string>();
  } else {
    e.ambiguous_query.text = q.get<std::string>();
  }
  if (j.contains("id")) e.ambiguous_query.id = j["id"].get<std::string>();
  if (e.ambiguous_query.id.empty()) e.ambiguous_query.id = "q" + std::to_string(ordinal);
  for (const auto& dj : j.at("disambiguations")) {
    Disambiguation d;
    d.surface_answer = dj.at("answer").get<std::string>();
    d.disambiguated_query = dj.value("query", "");
    for (const auto& doc : dj.value("documents", json::array())) {
      if (doc.is_string()) {
        d.candidate_documents.push_back({doc.get<std::string>(), std::nullopt});
      } else {
        CandidateDocument c{doc.at("text").get<std::string>(), std::nullopt};
        if (doc.contains("source")) c.source = doc["source"].get<std::string>();
        d.candidate_documents.push_back(std::move(c));
      }
    }
    e.disambiguations.push_back(std::move(d));
  }
  if (e.disambiguations.empty()) throw Error("seed entry '" + e.ambiguous_query.id + "' has no disambiguations");
  return e;
}

inline std::vector<SeedEntry> read_seed_entries(const std::string& path) {
  std::vector<SeedEntry> out;
  for_each_jsonl(path, [&](const json& j, std::size_t lineno) {
    try {
      out.push_back(seed_entry_from_json(j, out.size()));
    } catch (const json::exception& e) {
      throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });
  return out;
}

/// Noise pool from {text, source?} records (or bare strings), chunked.
inline std::vector<Document> read_noise_pool(const std::string& path, std::size_t budget = 100) {
  std::vector<Document> out;
  for_each_jsonl(path, [&](const json& j, std::size_t) {
    std::string text = j.is_string() ? j.get<std::string>() : j.at("text").get<std::string>();
    std::optional<std::string> source;
    if (j.is_object() && j.contains("source")) source = j["source"].get<std::string>();
    for (auto& c : chunk_document(text, budget)) {
      Document d;
      d.id = "noise-" + std::to_string(out.size());
      d.text = std::move(c);
      d.label = DocLabel::noise;
      d.source = source;
      out.push_back(std::move(d));
    }
  });
  return out;
}

/// One entity per line; blank lines ignored.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto t = trim(line); !t.empty()) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace madam
