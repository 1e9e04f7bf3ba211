#pragma once

#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "madam/madam.hpp"

namespace testing_support {

inline std::string fixture(const std::string& name) { return std::string(MADAM_FIXTURES_DIR) + "/" + name; }
inline std::string test_data(const std::string& name) { return std::string(MADAM_TEST_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline madam::RamDocsInstance jordan_instance() { return madam::read_corpus(fixture("jordan.jsonl")).at(0); }

/// Unique path under the system temp dir; removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    static std::mt19937_64 salt{std::random_device{}()};
    path_ = std::filesystem::temp_directory_path() / (stem + "-" + std::to_string(salt()) + ".jsonl");
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace testing_support

namespace testing_support {

/// Agent k (1-based) answers answers[k-1][r] in its r-th call (last entry
/// repeats). Agents are told apart by a "[[agent-k]]" marker in their
/// document. Every prompt is logged.
class SequenceBackend final : public madam::ChatBackend {
 public:
  SequenceBackend(std::vector<std::vector<std::string>> answers, std::string aggregate_reply)
      : answers_(std::move(answers)), calls_(answers_.size(), 0), aggregate_reply_(std::move(aggregate_reply)) {}

  madam::ChatReply complete(const madam::ChatRequest& req) override {
    std::lock_guard lock(mu_);
    prompts_.push_back(req.user_prompt);
    madam::ChatReply reply;
    if (req.user_prompt.find("You are an aggregator") != std::string::npos) {
      reply.text = aggregate_reply_;
    } else {
      for (std::size_t k = 0; k < answers_.size(); ++k) {
        if (req.user_prompt.find(marker(k + 1)) == std::string::npos) continue;
        const auto& seq = answers_[k];
        const auto& a = seq[std::min(calls_[k]++, seq.size() - 1)];
        reply.text = madam::format_agent_reply(a, "from agent " + std::to_string(k + 1));
        break;
      }
      if (reply.text.empty()) throw madam::ScriptMiss("no agent marker", madam::request_hash(req));
    }
    reply.usage = madam::synthesized_usage(req, reply.text);
    return reply;
  }

  static std::string marker(std::size_t k) { return "[[agent-" + std::to_string(k) + "]]"; }

  /// Documents carrying the markers, one per agent.
  std::vector<madam::Document> documents() const {
    std::vector<madam::Document> docs;
    for (std::size_t k = 1; k <= answers_.size(); ++k) {
      madam::Document d;
      d.id = "d" + std::to_string(k);
      d.text = marker(k) + " passage number " + std::to_string(k);
      d.label = madam::DocLabel::noise;
      docs.push_back(d);
    }
    return docs;
  }

  std::vector<std::string> prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
  }

 private:
  std::vector<std::vector<std::string>> answers_;
  std::vector<std::size_t> calls_;
  std::string aggregate_reply_;
  mutable std::mutex mu_;
  std::vector<std::string> prompts_;
};

/// Debate round at which the scripted answers first repeat, capped at T.
inline int expected_stop_round(const std::vector<std::vector<std::string>>& answers, int max_rounds) {
  auto at = [&](std::size_t k, int r) {
    const auto& s = answers[k];
    return madam::canonicalize_answer(s[std::min<std::size_t>(r - 1, s.size() - 1)]);
  };
  for (int t = 2; t <= max_rounds; ++t) {
    bool same = true;
    for (std::size_t k = 0; k < answers.size(); ++k) same = same && at(k, t) == at(k, t - 1);
    if (same) return t;
  }
  return max_rounds;
}

}  // namespace testing_support
