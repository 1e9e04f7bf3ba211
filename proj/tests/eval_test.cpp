#include <gtest/gtest.h>

#include <random>

#include "madam/eval.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace madam;
using V = std::vector<std::string>;

TEST(Judge, Examples) {
  auto m = judge_instance({"1963", "1956"}, {"1963", "1956"}, {"1998"});
  EXPECT_EQ(m.em, 1);
  EXPECT_EQ(m.precision, 1.0);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_EQ(m.f1, 1.0);

  m = judge_instance({"1963", "1956", "1998"}, {"1963", "1956"}, {"1998"});
  EXPECT_EQ(m.em, 0);
  EXPECT_NEAR(m.precision, 2.0 / 3.0, 1e-12);
  EXPECT_EQ(m.recall, 1.0);
  EXPECT_NEAR(m.f1, 0.8, 1e-12);

  m = judge_instance({}, {"1963", "1956"}, {"1998"});
  EXPECT_EQ(m.em, 0);
  EXPECT_EQ(m.precision, 0.0);
  EXPECT_EQ(m.recall, 0.0);
  EXPECT_EQ(m.f1, 0.0);
}

TEST(Judge, HandChecked) {
  auto m = judge_instance({"a", "b", "c"}, {"a", "b", "d"}, {});
  EXPECT_NEAR(m.precision, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.recall, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.f1, 2.0 / 3.0, 1e-12);
}

TEST(Judge, StrictVersusLenient) {
  // spurious answer that is neither gold nor forbidden
  EXPECT_EQ(judge_instance({"a", "x"}, {"a"}, {"f"}, EmMode::strict).em, 0);
  EXPECT_EQ(judge_instance({"a", "x"}, {"a"}, {"f"}, EmMode::lenient).em, 1);
  EXPECT_EQ(judge_instance({"a", "f"}, {"a"}, {"f"}, EmMode::lenient).em, 0);
}

TEST(Judge, CanonicalComparisonAndEmptyGold) {
  EXPECT_EQ(judge_instance({"The Bulls."}, {"bulls"}, {}).em, 1);
  EXPECT_THROW(judge_instance({"a"}, {}, {}), EmptyGold);
  EXPECT_THROW(judge_instance({"a"}, {"..."}, {}), EmptyGold);
}

namespace {

V random_subset(std::mt19937& gen, std::size_t min_size = 0) {
  static const V alphabet{"a", "b", "c", "d", "e", "f"};
  V out;
  std::bernoulli_distribution coin(0.4);
  for (const auto& s : alphabet) {
    if (coin(gen)) out.push_back(s);
  }
  while (out.size() < min_size) out.push_back(alphabet[gen() % alphabet.size()]);
  return out;
}

}  // namespace

TEST(Judge, MatchesBruteForceOracle) {
  std::mt19937 gen(1234);
  for (int i = 0; i < 2000; ++i) {
    auto pred = random_subset(gen);
    auto gold = random_subset(gen, 1);
    auto forb = random_subset(gen);
    for (auto mode : {EmMode::strict, EmMode::lenient}) {
      auto got = judge_instance(pred, gold, forb, mode);
      auto want = oracle::judge(pred, gold, forb, mode == EmMode::strict);
      ASSERT_EQ(got.em, want.em);
      ASSERT_EQ(got.precision, want.precision);
      ASSERT_EQ(got.recall, want.recall);
      ASSERT_EQ(got.f1, want.f1);
    }
  }
}

TEST(Judge, Properties) {
  std::mt19937 gen(99);
  for (int i = 0; i < 2000; ++i) {
    auto pred = random_subset(gen);
    auto gold = random_subset(gen, 1);
    auto forb = random_subset(gen);
    for (auto mode : {EmMode::strict, EmMode::lenient}) {
      auto m = judge_instance(pred, gold, forb, mode);
      EXPECT_TRUE(m.em == 0 || m.em == 1);
      for (double x : {m.precision, m.recall, m.f1}) {
        EXPECT_GE(x, 0.0);
        EXPECT_LE(x, 1.0);
      }
      if (m.em == 1) EXPECT_EQ(m.recall, 1.0);
      for (const auto& f : forb) {
        if (std::find(gold.begin(), gold.end(), f) != gold.end()) continue;  // gold and forbidden are disjoint
        auto more = pred;
        more.push_back(f);
        auto m2 = judge_instance(more, gold, forb, mode);
        EXPECT_LE(m2.em, m.em);
        EXPECT_LE(m2.precision, m.precision);
      }
    }
  }
}

namespace {

RamDocsInstance tiny(std::string id, V gold) {
  RamDocsInstance inst;
  inst.query = {id, "q " + id};
  inst.gold_answers = std::move(gold);
  Document d;
  d.id = id + "-d";
  d.text = "marker-" + id;
  d.label = DocLabel::noise;
  inst.documents.push_back(d);
  return inst;
}

}  // namespace

TEST(Corpus, MeanOfJudgments) {
  Corpus corpus{tiny("x", {"1963"}), tiny("y", {"1956"})};
  ScriptedBackend b(Script{}.otherwise(R"(All Correct Answers: ["1963"]. Explanation: e)"));
  auto templates = TemplateSet::builtin();
  RunContext ctx{b, templates, {}};
  auto run = evaluate_corpus(corpus, MethodRunner{MethodKind::concat_prompt}, ctx);
  EXPECT_EQ(run.report.judgments[0].metrics.em, 1);
  EXPECT_EQ(run.report.judgments[1].metrics.em, 0);
  EXPECT_EQ(run.report.em, 0.5);
  EXPECT_EQ(run.report.judgments[1].instance_id, "y");
}

TEST(Corpus, ConstantUsageAverages) {
  Corpus corpus;
  for (int i = 0; i < 7; ++i) corpus.push_back(tiny("i" + std::to_string(i), {"1963"}));
  Script s;
  s.otherwise(R"(All Correct Answers: ["1963"]. Explanation: e)");
  s.fixed_usage = TokenUsage{10, 5};
  ScriptedBackend b(s);
  auto templates = TemplateSet::builtin();
  RunContext ctx{b, templates, {}};
  auto run = evaluate_corpus(corpus, MethodRunner{MethodKind::concat_prompt}, ctx, {EmMode::strict, 3});
  EXPECT_EQ(run.report.mean_input_tokens, 10.0);
  EXPECT_EQ(run.report.mean_output_tokens, 5.0);
  EXPECT_EQ(run.report.totals.calls, 7);
  EXPECT_EQ(run.report.totals.input_tokens, 70);
}

TEST(Corpus, FailingInstanceScoresZero) {
  Corpus corpus{tiny("ok", {"1963"}), tiny("bad", {"1963"})};
  ScriptedBackend b(Script{}.on_contains({"marker-ok"}, {R"(All Correct Answers: ["1963"]. Explanation: e)"}));
  auto templates = TemplateSet::builtin();
  RunContext ctx{b, templates, {}};
  auto run = evaluate_corpus(corpus, MethodRunner{MethodKind::concat_prompt}, ctx);
  EXPECT_EQ(run.report.judgments[0].metrics.em, 1);
  EXPECT_EQ(run.report.judgments[1].metrics.em, 0);
  ASSERT_TRUE(run.report.judgments[1].error.has_value());
  EXPECT_NE(run.report.judgments[1].error->find("concat"), std::string::npos);
  EXPECT_EQ(run.report.errors, 1u);
  EXPECT_EQ(run.report.em, 0.5);
  EXPECT_TRUE(run.traces[1].contains("error"));
}

namespace {

/// Answers round 1 and the aggregator; fails every later-round agent call.
class FirstRoundOnly final : public ChatBackend {
 public:
  ChatReply complete(const ChatRequest& req) override {
    if (req.user_prompt.find("The following responses are from other agents") != std::string::npos) {
      throw TransportError("unavailable", 503, request_hash(req));
    }
    bool agg = req.user_prompt.find("You are an aggregator") != std::string::npos;
    return ChatReply{agg ? R"(All Correct Answers: ["1963"]. Explanation: e)" : "Answer: 1963. Explanation: e",
                     {10, 5}, BackendKind::scripted};
  }
};

}  // namespace

TEST(Corpus, PartialDebateUsageIsBooked) {
  Corpus corpus{tiny("a", {"1963"})};
  FirstRoundOnly b;
  auto templates = TemplateSet::builtin();
  RunContext ctx{b, templates, {}};
  auto run = evaluate_corpus(corpus, MethodRunner{MethodKind::madam_rag}, ctx);
  const auto& j = run.report.judgments[0];
  ASSERT_TRUE(j.error.has_value());
  EXPECT_EQ(j.metrics.em, 0);
  EXPECT_EQ(j.usage.calls, 2);
  EXPECT_EQ(run.report.totals.input_tokens, 20);
  EXPECT_EQ(run.traces[0]["rounds"].size(), 1u);
}

TEST(Report, JsonlAndSummaryLine) {
  EvalReport r;
  r.method = MethodKind::concat_prompt;
  InstanceJudgment j;
  j.instance_id = "x";
  j.predicted = {"1963"};
  j.metrics = {1, 1.0, 1.0, 1.0};
  j.usage = {10, 5, 1};
  r.judgments.push_back(j);
  summarize(r);
  auto text = report_to_jsonl(r);
  auto nl = text.find('\n');
  auto first = json::parse(text.substr(0, nl));
  auto last = json::parse(text.substr(nl + 1));
  EXPECT_EQ(first["type"], "instance");
  EXPECT_EQ(last["type"], "summary");
  EXPECT_EQ(last["em_mode"], "strict");
  EXPECT_EQ(summary_line(r),
            "method=concat em_mode=strict instances=1 em=1.0000 precision=1.0000 recall=1.0000 f1=1.0000 "
            "mean_input_tokens=10.00 mean_output_tokens=5.00 calls=1 errors=0");
}

TEST(Corpus, EmptyCorpus) {
  ScriptedBackend b(Script{}.otherwise("x"));
  auto templates = TemplateSet::builtin();
  RunContext ctx{b, templates, {}};
  EXPECT_THROW(evaluate_corpus({}, MethodRunner{}, ctx), EmptyCorpus);
}
