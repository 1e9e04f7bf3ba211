// Acceptance checks. Prints one PASS/FAIL/SKIP line per criterion and exits
// nonzero if any check fails.

#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "madam/madam.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace madam;
using testing_support::fixture;
using testing_support::SequenceBackend;
using testing_support::slurp;
using testing_support::test_data;

namespace {

/// Thrown by a check to report why it failed.
struct Failure {
  std::string why;
};

void require(bool ok, const std::string& why) {
  if (!ok) throw Failure{why};
}

struct Skip {
  std::string why;
};

int failures = 0;

void criterion(const std::string& name, const std::function<std::string()>& body) {
  try {
    auto detail = body();
    std::cout << "PASS " << name << (detail.empty() ? "" : "  (" + detail + ")") << '\n';
  } catch (const Skip& s) {
    std::cout << "SKIP " << name << "  (" << s.why << ")\n";
  } catch (const Failure& f) {
    ++failures;
    std::cout << "FAIL " << name << "  (" << f.why << ")\n";
  } catch (const std::exception& e) {
    ++failures;
    std::cout << "FAIL " << name << "  (exception: " << e.what() << ")\n";
  }
}

const TemplateSet& templates() {
  static const TemplateSet t = TemplateSet::builtin();
  return t;
}

RamDocsInstance jordan() { return testing_support::jordan_instance(); }

Corpus fixture_corpus(std::uint64_t seed) {
  auto seeds = read_seed_entries(fixture("seeds_synthetic.jsonl"));
  auto noise = read_noise_pool(fixture("noise_pool.jsonl"));
  auto distractors = read_lines(fixture("distractors.txt"));
  auto policy = ConstructionPolicy::from_json(json::parse(slurp(fixture("policy_default.json"))));
  policy.rng_seed = seed;
  return build_corpus(seeds, policy, noise, distractors).corpus;
}

std::string jordan_debate() {
  ScriptedBackend b(Script::load(fixture("jordan_debate_script.json")));
  RunContext ctx{b, templates(), {}};
  auto inst = jordan();
  auto t = run_debate(ctx, inst.query, inst.documents, {});
  const auto* agg = t.final_aggregate();
  require(agg != nullptr, "no rounds");
  std::set<std::string> got(agg->answers.begin(), agg->answers.end());
  require(got == std::set<std::string>{"1963", "1956"}, "final answers " + join(agg->answers, ","));
  require(!got.count("1998"), "1998 retained");
  require(t.stop_reason == StopReason::converged, "stop reason " + std::string(to_string(t.stop_reason)));
  require(t.stop_round == 2, "t_end " + std::to_string(t.stop_round));
  const auto n = inst.documents.size();
  require(n == 4, "n " + std::to_string(n));
  require(b.calls() == static_cast<int>(2 * n + 2), "calls " + std::to_string(b.calls()));
  require(t.usage.size() == 2 * n + 2, "ledger calls " + std::to_string(t.usage.size()));
  return "answers {1963, 1956}, t_end=2, 10 calls";
}

std::string convergence_law() {
  const std::string aggregate = R"(All Correct Answers: ["x"]. Explanation: e)";
  const auto inst = jordan();
  std::mt19937 gen(4242);
  std::uniform_int_distribution<int> nd(1, 6), repeat_round(1, 4), sym(0, 3);
  const int trials = 200;
  for (int trial = 0; trial < trials; ++trial) {
    const int n = nd(gen);
    const int settle = repeat_round(gen);
    std::vector<std::vector<std::string>> answers(n);
    for (auto& seq : answers) {
      // answers vary freely up to `settle`, then hold
      for (int r = 1; r <= settle; ++r) seq.push_back(sym(gen) == 0 ? "Unknown" : "a" + std::to_string(sym(gen)));
    }
    SequenceBackend b(answers, aggregate);
    RunContext ctx{b, templates(), {}};
    DebateConfig cfg;
    cfg.shuffle_seed = static_cast<std::uint64_t>(trial);
    auto t = run_debate(ctx, inst.query, b.documents(), cfg);
    const auto tag = "trial " + std::to_string(trial) + ": ";
    require(t.stop_round >= 1 && t.stop_round <= 3, tag + "t_end " + std::to_string(t.stop_round));
    require(t.rounds.size() == static_cast<std::size_t>(t.stop_round), tag + "round count");
    for (std::size_t r = 1; r < t.rounds.size(); ++r) {
      const bool same = converged(t.rounds[r - 1].responses, t.rounds[r].responses, cfg.convergence);
      require(!same || r + 1 == t.rounds.size(), tag + "round emitted after equal answer vectors");
    }
    if (t.stop_reason == StopReason::converged) {
      require(t.rounds.size() >= 2, tag + "converged before round 2");
    }
    require(b.prompts().size() == static_cast<std::size_t>(n * t.stop_round + t.stop_round), tag + "call count");
  }
  return std::to_string(trials) + " debates";
}

std::string metric_oracle() {
  const std::vector<std::string> alphabet{"a", "b", "c", "d", "e", "f"};
  std::mt19937 gen(20240417);
  auto subset = [&](std::size_t min_size) {
    std::vector<std::string> out;
    for (const auto& s : alphabet)
      if (gen() % 2) out.push_back(s);
    while (out.size() < min_size) out.push_back(alphabet[gen() % alphabet.size()]);
    return out;
  };
  const int trials = 1000;
  for (int i = 0; i < trials; ++i) {
    auto pred = subset(0), gold = subset(1), forb = subset(0);
    for (auto mode : {EmMode::strict, EmMode::lenient}) {
      auto got = judge_instance(pred, gold, forb, mode);
      auto want = oracle::judge(pred, gold, forb, mode == EmMode::strict);
      require(got.em == want.em && got.precision == want.precision && got.recall == want.recall &&
                  got.f1 == want.f1,
              "triple " + std::to_string(i) + " mode " + std::string(to_string(mode)));
    }
  }
  return std::to_string(trials) + " triples x 2 modes";
}

std::string hand_checked() {
  auto m = judge_instance({"a", "b", "c"}, {"a", "b", "d"}, {}, EmMode::strict);
  const double third2 = 2.0 / 3.0;
  require(std::abs(m.precision - third2) <= 1e-12, "precision");
  require(std::abs(m.recall - third2) <= 1e-12, "recall");
  require(std::abs(m.f1 - third2) <= 1e-12, "f1");
  require(m.em == 0, "em");
  return "";
}

std::string prompt_fidelity() {
  SlotMap slots;
  const auto parsed = json::parse(slurp(test_data("prompts/slots.json")));
  for (auto& [k, v] : parsed.items()) slots[k] = v.get<std::string>();
  for (auto n : k_all_templates) {
    const auto name = std::string(to_string(n));
    const auto expected = slurp(test_data("prompts/" + name + ".txt"));
    require(!expected.empty(), "missing fixture " + name);
    const auto got = render(templates().get(n), slots);
    require(fnv1a64(got) == fnv1a64(expected) && got == expected, name + " differs");
  }
  const std::string exemplar = R"(All Correct Answers: ["1963", "1956"])";
  require(templates().get(TemplateName::aggregator).body.find(exemplar) != std::string::npos, "exemplar line");
  return std::to_string(k_all_templates.size()) + " templates";
}

std::string parser_round_trip() {
  std::mt19937 gen(77);
  const std::string chars = "abcdefghijklmnopqrstuvwxyz0123456789 .,'-";
  std::uniform_int_distribution<std::size_t> len(1, 14), pick(0, chars.size() - 1);
  std::uniform_int_distribution<int> count(0, 5);
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> items;
    for (int k = count(gen); k > 0; --k) {
      std::string s;
      for (auto l = len(gen); l > 0; --l) s.push_back(chars[pick(gen)]);
      s = trim(s);
      if (s.empty()) s = "x";
      items.push_back(s);
    }
    auto parsed = parse_aggregate_reply(format_aggregate_reply(items, "because."));
    require(parsed.surface_answers == items, "list " + std::to_string(i));
    require(!parsed.degraded, "list " + std::to_string(i) + " degraded");
  }
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<std::size_t> flen(0, 160);
  const std::vector<std::string> pieces{"Answer:", "Explanation:", "All Correct Answers:", "[", "]", "\"", "'", "\n"};
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    for (auto l = flen(gen); l > 0; --l) {
      if (byte(gen) < 24) s += pieces[gen() % pieces.size()];
      else s.push_back(static_cast<char>(byte(gen)));
    }
    try {
      parse_agent_reply(s);
      parse_aggregate_reply(s);
      parse_answer_list(s);
    } catch (const std::exception& e) {
      throw Failure{"fuzz string " + std::to_string(i) + " threw " + e.what()};
    }
  }
  return "500 round-trips, 10000 fuzz strings";
}

std::string constructor_soundness() {
  auto seeds = read_seed_entries(fixture("seeds_synthetic.jsonl"));
  require(seeds.size() == 500, "fixture has " + std::to_string(seeds.size()) + " seeds");
  auto a = fixture_corpus(7);
  require(a.size() == 500, "built " + std::to_string(a.size()) + " of 500");
  for (const auto& inst : a) {
    auto v = validate_instance(inst);
    require(v.empty(), inst.query.id + ": " + (v.empty() ? "" : v[0].message));
    std::map<std::string, int> per_answer;
    int mis = 0, noise = 0;
    for (const auto& d : inst.documents) {
      if (d.label == DocLabel::supporting) ++per_answer[canonicalize_answer(*d.linked_answer)];
      mis += d.label == DocLabel::misinformation;
      noise += d.label == DocLabel::noise;
    }
    require(inst.gold_answers.size() >= 1 && inst.gold_answers.size() <= 3, inst.query.id + ": answers");
    for (auto [ans, n] : per_answer) require(n >= 1 && n <= 3, inst.query.id + ": docs for " + ans);
    require(mis <= 2, inst.query.id + ": misinfo");
    require(noise <= 2, inst.query.id + ": noise");
  }
  require(corpus_to_jsonl(a) == corpus_to_jsonl(fixture_corpus(7)), "rebuild differs");
  return "500 instances, byte-identical rebuild";
}

std::string release_stats() {
  const char* path = std::getenv("MADAM_RAMDOCS_RELEASE");
  if (!path || !*path) throw Skip{"MADAM_RAMDOCS_RELEASE not set"};
  auto s = compute_stats(read_corpus(path));
  const std::vector<std::pair<const StatDimension*, double>> want{
      {&s.total_docs, 5.53}, {&s.supporting_docs, 3.84}, {&s.misinformation_docs, 0.61},
      {&s.noise_docs, 1.08}, {&s.gold_answers, 2.20},    {&s.forbidden_answers, 0.86}};
  std::ostringstream detail;
  bool ok = true;
  for (auto [dim, mean] : want) {
    detail << dim->name << '=' << dim->mean << ' ';
    ok = ok && std::abs(dim->mean - mean) <= 0.01 + 1e-9;
  }
  require(ok, detail.str());
  return detail.str();
}

std::string call_counts() {
  auto inst = jordan();
  {
    ScriptedBackend b(Script{}.otherwise("1963, 1956"));
    RunContext ctx{b, templates(), {}};
    auto out = MethodRunner{MethodKind::no_rag}(ctx, inst);
    require(b.calls() == 1 && out.calls.size() == 1, "no-rag calls " + std::to_string(b.calls()));
  }
  {
    ScriptedBackend b(Script::load(fixture("exemplar_script.json")));
    RunContext ctx{b, templates(), {}};
    auto out = MethodRunner{MethodKind::concat_prompt}(ctx, inst);
    require(b.calls() == 1 && out.calls.size() == 1, "concat calls " + std::to_string(b.calls()));
  }
  {
    ScriptedBackend b(Script::load(fixture("exemplar_script.json")));
    RunContext ctx{b, templates(), {}};
    MethodRunner r{MethodKind::self_reflection};
    r.reflection_rounds = 2;
    auto out = r(ctx, inst);
    require(b.calls() == 5 && out.calls.size() == 5, "self-reflect calls " + std::to_string(b.calls()));
  }
  for (const char* script : {"jordan_debate_script.json", "jordan_abandon_script.json"}) {
    ScriptedBackend b(Script::load(fixture(script)));
    RunContext ctx{b, templates(), {}};
    auto out = MethodRunner{MethodKind::madam_rag}(ctx, inst);
    const int t_end = out.trace["stop_round"].get<int>();
    const int n = static_cast<int>(inst.documents.size());
    require(b.calls() == n * t_end + t_end, std::string(script) + " calls " + std::to_string(b.calls()));
  }
  return "1 / 1 / 5 / n*t_end+t_end";
}

std::string token_ledger() {
  Corpus corpus{jordan()};
  for (int i = 2; i <= 4; ++i) {
    auto copy = jordan();
    copy.query.id = "jordan-" + std::to_string(i);
    corpus.push_back(copy);
  }
  const std::vector<std::pair<MethodKind, std::string>> methods{{MethodKind::no_rag, "exemplar_script.json"},
                                                                {MethodKind::concat_prompt, "exemplar_script.json"},
                                                                {MethodKind::self_reflection, "exemplar_script.json"},
                                                                {MethodKind::madam_rag, "jordan_debate_script.json"}};
  std::ostringstream detail;
  for (const auto& [method, script_name] : methods) {
    // one backend per instance so scripted reply queues replay identically
    EvalReport report;
    report.method = method;
    for (const auto& inst : corpus) {
      auto script = Script::load(fixture(script_name));
      script.fixed_usage = TokenUsage{10, 5};
      ScriptedBackend b(script);
      RunContext ctx{b, templates(), {}};
      auto run = evaluate_corpus(Corpus{inst}, MethodRunner{method}, ctx, {EmMode::strict, 1});
      report.judgments.push_back(run.report.judgments.at(0));
    }
    summarize(report);
    const double calls_per_instance = static_cast<double>(report.totals.calls) / static_cast<double>(corpus.size());
    require(report.errors == 0, std::string(to_string(method)) + " errors");
    require(report.mean_input_tokens == 10.0 * calls_per_instance,
            std::string(to_string(method)) + " mean input " + std::to_string(report.mean_input_tokens));
    require(report.mean_output_tokens == 5.0 * calls_per_instance,
            std::string(to_string(method)) + " mean output " + std::to_string(report.mean_output_tokens));
    detail << to_string(method) << '=' << calls_per_instance << " calls ";
  }
  return trim(detail.str());
}

std::string controlled_subsets() {
  auto corpus = fixture_corpus(7);
  ValidationOptions unbounded;
  unbounded.constructor_bounds = false;
  std::ostringstream detail;
  for (int k = 1; k <= 3; ++k) {
    auto r = make_imbalance_subset(corpus, k);
    require(!r.corpus.empty(), "imbalance " + std::to_string(k) + " empty");
    for (const auto& inst : r.corpus) {
      std::multiset<int> counts;
      std::map<std::string, int> per;
      for (const auto& d : inst.documents) {
        require(d.label == DocLabel::supporting, inst.query.id + ": non-supporting document");
        ++per[canonicalize_answer(*d.linked_answer)];
      }
      for (auto [a, c] : per) counts.insert(c);
      require(counts == std::multiset<int>{1, k}, inst.query.id + ": imbalance " + std::to_string(k) + " counts");
      require(validate_instance(inst, unbounded).empty(), inst.query.id + ": invalid");
    }
    detail << "k" << k << '=' << r.corpus.size() << ' ';
  }
  const auto distractors = read_lines(fixture("distractors.txt"));
  for (int m = 1; m <= 3; ++m) {
    auto r = make_misinfo_subset(corpus, m, 100, distractors);
    require(!r.corpus.empty(), "misinfo " + std::to_string(m) + " empty");
    for (const auto& inst : r.corpus) {
      int sup = 0, mis = 0;
      std::set<std::string> linked;
      for (const auto& d : inst.documents) {
        require(d.label != DocLabel::noise, inst.query.id + ": noise document");
        sup += d.label == DocLabel::supporting;
        if (d.label == DocLabel::misinformation) {
          ++mis;
          linked.insert(canonicalize_answer(*d.linked_answer));
        }
      }
      require(sup == 2, inst.query.id + ": supporting " + std::to_string(sup));
      require(mis == m, inst.query.id + ": misinfo " + std::to_string(mis));
      require(linked.size() == 1 && inst.forbidden_answers.size() == 1 &&
                  canonicalize_answer(inst.forbidden_answers[0]) == *linked.begin(),
              inst.query.id + ": forbidden answer");
      require(validate_instance(inst, unbounded).empty(), inst.query.id + ": invalid");
    }
    detail << "m" << m << '=' << r.corpus.size() << ' ';
  }
  return trim(detail.str());
}

}  // namespace

int main() {
  criterion("protocol fixture", jordan_debate);
  criterion("convergence law", convergence_law);
  criterion("metric oracle equivalence", metric_oracle);
  criterion("hand-checked metric vector", hand_checked);
  criterion("prompt fidelity", prompt_fidelity);
  criterion("parser round-trip and totality", parser_round_trip);
  criterion("constructor soundness", constructor_soundness);
  criterion("release statistics", release_stats);
  criterion("call-count laws", call_counts);
  criterion("token ledger", token_ledger);
  criterion("controlled subsets", controlled_subsets);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
  return failures == 0 ? 0 : 1;
}
