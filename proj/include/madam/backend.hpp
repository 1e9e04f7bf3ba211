#pragma once

// Chat-completion backends: the abstract interface, a deterministic
// scripted backend, record/replay, and an in-flight limiter. The HTTP
// client lives in live_backend.hpp so that only callers that need the
// network pull in the transport.

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "madam/errors.hpp"
#include "madam/rng.hpp"
#include "madam/text.hpp"

namespace madam {

using json = nlohmann::json;

struct SamplingParams {
  double temperature = 0.0;
  int max_output_tokens = 1024;
};

struct ChatRequest {
  /// May be empty, in which case no system message is sent.
  std::string system_prompt;
  std::string user_prompt;
  std::string model_name;
  SamplingParams sampling;
};

struct TokenUsage {
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
};

enum class BackendKind { live, scripted, replay };

inline std::string_view to_string(BackendKind k) {
  switch (k) {
    case BackendKind::live: return "live";
    case BackendKind::scripted: return "scripted";
    case BackendKind::replay: return "replay";
  }
  return "live";
}

inline BackendKind parse_backend_kind(std::string_view s) {
  if (s == "live") return BackendKind::live;
  if (s == "scripted") return BackendKind::scripted;
  if (s == "replay") return BackendKind::replay;
  throw Error("unknown backend kind '" + std::string(s) + "'");
}

struct ChatReply {
  std::string text;
  TokenUsage usage;
  BackendKind backend_kind = BackendKind::scripted;
};

/// Everything except the prompts: which model, how to sample.
struct ModelSettings {
  std::string model_name = "default";
  SamplingParams sampling;
  std::string system_prompt;

  ChatRequest request(std::string user_prompt) const {
    return ChatRequest{system_prompt, std::move(user_prompt), model_name, sampling};
  }
};

/// Implementations must accept concurrent complete() calls.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual ChatReply complete(const ChatRequest& req) = 0;
};

// --- request identity ----------------------------------------------------------

inline json request_to_json(const ChatRequest& r) {
  return json{{"system_prompt", r.system_prompt},
              {"user_prompt", r.user_prompt},
              {"model_name", r.model_name},
              {"sampling", {{"temperature", r.sampling.temperature},
                            {"max_output_tokens", r.sampling.max_output_tokens}}}};
}

inline ChatRequest request_from_json(const json& j) {
  ChatRequest r;
  r.system_prompt = j.value("system_prompt", "");
  r.user_prompt = j.value("user_prompt", "");
  r.model_name = j.value("model_name", "");
  if (j.contains("sampling")) {
    r.sampling.temperature = j["sampling"].value("temperature", 0.0);
    r.sampling.max_output_tokens = j["sampling"].value("max_output_tokens", 1024);
  }
  return r;
}

inline json reply_to_json(const ChatReply& r) {
  return json{{"text", r.text},
              {"usage", {{"input_tokens", r.usage.input_tokens}, {"output_tokens", r.usage.output_tokens}}},
              {"backend_kind", std::string(to_string(r.backend_kind))}};
}

inline ChatReply reply_from_json(const json& j) {
  ChatReply r;
  r.text = j.value("text", "");
  if (j.contains("usage")) {
    r.usage.input_tokens = j["usage"].value("input_tokens", std::int64_t{0});
    r.usage.output_tokens = j["usage"].value("output_tokens", std::int64_t{0});
  }
  r.backend_kind = parse_backend_kind(j.value("backend_kind", "live"));
  return r;
}

/// Stable digest of (system_prompt, user_prompt, model_name, sampling) as
/// 16 lowercase hex digits. Keys are serialized sorted, so the digest does
/// not depend on field order.
inline std::string request_hash(const ChatRequest& r) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(request_to_json(r).dump())));
  return buf;
}

inline std::int64_t whitespace_tokens(std::string_view s) {
  return static_cast<std::int64_t>(word_count(s));
}

inline TokenUsage synthesized_usage(const ChatRequest& req, std::string_view reply) {
  return TokenUsage{whitespace_tokens(req.system_prompt) + whitespace_tokens(req.user_prompt),
                    whitespace_tokens(reply)};
}

// --- scripted --------------------------------------------------------------------

/// Reply table for ScriptedBackend. Rules are tried in declaration order;
/// exact rules compare the whole user prompt, substring rules require every
/// listed pattern to occur in it. Each rule's replies are consumed in order
/// and the last one repeats once the queue runs out.
struct Script {
  struct Rule {
    std::optional<std::string> exact;
    std::vector<std::string> contains;
    std::vector<std::string> replies;

    bool matches(const std::string& prompt) const {
      if (exact) return prompt == *exact;
      for (const auto& p : contains) {
        if (prompt.find(p) == std::string::npos) return false;
      }
      return true;
    }
  };

  std::vector<Rule> rules;
  std::optional<std::string> default_reply;
  /// Fixed per-call usage; when absent usage is whitespace-token counts.
  std::optional<TokenUsage> fixed_usage;

  Script& on_exact(std::string prompt, std::vector<std::string> replies) {
    rules.push_back(Rule{std::move(prompt), {}, std::move(replies)});
    return *this;
  }
  Script& on_contains(std::vector<std::string> patterns, std::vector<std::string> replies) {
    rules.push_back(Rule{std::nullopt, std::move(patterns), std::move(replies)});
    return *this;
  }
  Script& otherwise(std::string reply) {
    default_reply = std::move(reply);
    return *this;
  }

  /// {"default": "...", "usage": {"input_tokens": n, "output_tokens": m},
  ///  "rules": [{"exact": "..."} | {"contains": "..." | ["...", ...]},
  ///            with "reply": "..." or "replies": [...]]}
  static Script from_json(const json& j) {
    Script s;
    if (j.contains("default") && !j["default"].is_null()) s.default_reply = j["default"].get<std::string>();
    if (j.contains("usage")) {
      s.fixed_usage = TokenUsage{j["usage"].value("input_tokens", std::int64_t{0}),
                                 j["usage"].value("output_tokens", std::int64_t{0})};
    }
    for (const auto& rj : j.value("rules", json::array())) {
      Rule r;
      if (rj.contains("exact")) r.exact = rj["exact"].get<std::string>();
      if (rj.contains("contains")) {
        if (rj["contains"].is_string()) r.contains.push_back(rj["contains"].get<std::string>());
        else r.contains = rj["contains"].get<std::vector<std::string>>();
      }
      if (!r.exact && r.contains.empty()) throw Error("script rule needs 'exact' or 'contains'");
      if (rj.contains("reply")) r.replies.push_back(rj["reply"].get<std::string>());
      if (rj.contains("replies")) {
        for (const auto& x : rj["replies"]) r.replies.push_back(x.get<std::string>());
      }
      if (r.replies.empty()) throw Error("script rule has no replies");
      s.rules.push_back(std::move(r));
    }
    return s;
  }

  static Script load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open script '" + path + "'");
    try {
      return from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw Error("script '" + path + "': " + e.what());
    }
  }
};

class ScriptedBackend final : public ChatBackend {
 public:
  explicit ScriptedBackend(Script script)
      : script_(std::move(script)), cursors_(script_.rules.size(), 0) {}

  ChatReply complete(const ChatRequest& req) override {
    calls_.fetch_add(1, std::memory_order_relaxed);
    std::string text;
    {
      std::lock_guard lock(mu_);
      bool hit = false;
      for (std::size_t i = 0; i < script_.rules.size(); ++i) {
        const auto& rule = script_.rules[i];
        if (!rule.matches(req.user_prompt)) continue;
        auto& cur = cursors_[i];
        text = rule.replies[std::min(cur, rule.replies.size() - 1)];
        if (cur < rule.replies.size()) ++cur;
        hit = true;
        break;
      }
      if (!hit) {
        if (!script_.default_reply) throw ScriptMiss("no scripted reply matches", request_hash(req));
        text = *script_.default_reply;
      }
    }
    ChatReply reply;
    reply.usage = script_.fixed_usage ? *script_.fixed_usage : synthesized_usage(req, text);
    reply.text = std::move(text);
    reply.backend_kind = BackendKind::scripted;
    return reply;
  }

  std::int64_t calls() const noexcept { return calls_.load(); }

 private:
  Script script_;
  std::mutex mu_;
  std::vector<std::size_t> cursors_;
  std::atomic<std::int64_t> calls_{0};
};

// --- record / replay -------------------------------------------------------------

/// Serves replies from a recording, looked up by request hash, so call
/// order does not matter.
class ReplayBackend final : public ChatBackend {
 public:
  explicit ReplayBackend(std::unordered_map<std::string, ChatReply> entries)
      : entries_(std::move(entries)) {}

  static ReplayBackend load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open recording '" + path + "'");
    std::unordered_map<std::string, ChatReply> entries;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (trim_view(line).empty()) continue;
      try {
        auto j = json::parse(line);
        entries.emplace(j.at("hash").get<std::string>(), reply_from_json(j.at("reply")));
      } catch (const json::exception& e) {
        throw Error(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    return ReplayBackend(std::move(entries));
  }

  ChatReply complete(const ChatRequest& req) override {
    auto h = request_hash(req);
    auto it = entries_.find(h);
    if (it == entries_.end()) throw ScriptMiss("request not in recording", h);
    ChatReply r = it->second;
    r.backend_kind = BackendKind::replay;
    return r;
  }

  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::unordered_map<std::string, ChatReply> entries_;
};

/// Proxies to `inner` and appends {hash, request, reply} per call.
class RecordingBackend final : public ChatBackend {
 public:
  RecordingBackend(std::shared_ptr<ChatBackend> inner, const std::string& sink_path)
      : inner_(std::move(inner)), path_(sink_path), out_(sink_path, std::ios::app | std::ios::binary) {
    if (!out_) throw SinkError("cannot open recording sink '" + sink_path + "'");
  }

  ChatReply complete(const ChatRequest& req) override {
    ChatReply reply = inner_->complete(req);
    json rec{{"hash", request_hash(req)}, {"request", request_to_json(req)}, {"reply", reply_to_json(reply)}};
    std::lock_guard lock(mu_);
    out_ << rec.dump() << '\n';
    out_.flush();
    if (!out_) throw SinkError("write to recording sink '" + path_ + "' failed");
    return reply;
  }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::string path_;
  std::mutex mu_;
  std::ofstream out_;
};

/// Caps the number of in-flight complete() calls on `inner`.
class BoundedBackend final : public ChatBackend {
 public:
  BoundedBackend(std::shared_ptr<ChatBackend> inner, std::size_t max_in_flight)
      : inner_(std::move(inner)), limit_(max_in_flight == 0 ? 1 : max_in_flight) {}

  ChatReply complete(const ChatRequest& req) override {
    {
      std::unique_lock lock(mu_);
      cv_.wait(lock, [&] { return in_flight_ < limit_; });
      ++in_flight_;
      peak_ = std::max(peak_, in_flight_);
    }
    struct Release {
      BoundedBackend* self;
      ~Release() {
        {
          std::lock_guard lock(self->mu_);
          --self->in_flight_;
        }
        self->cv_.notify_one();
      }
    } release{this};
    return inner_->complete(req);
  }

  std::size_t peak_in_flight() const {
    std::lock_guard lock(mu_);
    return peak_;
  }

 private:
  std::shared_ptr<ChatBackend> inner_;
  std::size_t limit_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::size_t in_flight_ = 0;
  std::size_t peak_ = 0;
};

}  // namespace madam
