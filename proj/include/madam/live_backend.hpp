#pragma once

// HTTP chat-completions client. Sends {model, messages, temperature,
// max_tokens} and reads choices[0].message.content plus usage.

#include <chrono>
#include <string>
#include <thread>

#include <httplib.h>

#include "madam/backend.hpp"

namespace madam {

struct LiveBackendConfig {
  /// Full URL of the completions route, e.g. http://host:8000/v1/chat/completions
  std::string endpoint;
  std::string api_key;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  std::chrono::seconds timeout{120};
};

struct ParsedEndpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline ParsedEndpoint parse_endpoint(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error("endpoint '" + url + "' has no scheme");
  auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

class LiveBackend final : public ChatBackend {
 public:
  explicit LiveBackend(LiveBackendConfig cfg) : cfg_(std::move(cfg)), ep_(parse_endpoint(cfg_.endpoint)) {
    if (cfg_.max_attempts < 1) cfg_.max_attempts = 1;
  }

  static json request_body(const ChatRequest& req) {
    json messages = json::array();
    if (!req.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", req.system_prompt}});
    messages.push_back({{"role", "user"}, {"content", req.user_prompt}});
    return json{{"model", req.model_name},
                {"messages", messages},
                {"temperature", req.sampling.temperature},
                {"max_tokens", req.sampling.max_output_tokens}};
  }

  ChatReply complete(const ChatRequest& req) override {
    const auto fingerprint = request_hash(req);
    const auto body = request_body(req).dump();
    httplib::Headers headers;
    if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

    auto backoff = cfg_.initial_backoff;
    for (int attempt = 1;; ++attempt) {
      httplib::Client client(ep_.origin);
      client.set_connection_timeout(cfg_.timeout);
      client.set_read_timeout(cfg_.timeout);
      client.set_write_timeout(cfg_.timeout);
      auto res = client.Post(ep_.path, headers, body, "application/json");

      int status = res ? res->status : 0;
      bool retryable = !res || status == 429 || status >= 500;
      if (res && (status == 401 || status == 403)) {
        throw AuthError("credential rejected by " + cfg_.endpoint + " (status " + std::to_string(status) + ")",
                        fingerprint);
      }
      if (res && status >= 200 && status < 300) return parse_reply(req, res->body, fingerprint);
      if (!retryable || attempt >= cfg_.max_attempts) {
        std::string what = res ? "HTTP error from " + cfg_.endpoint
                               : "transport failure (" + httplib::to_string(res.error()) + ") to " + cfg_.endpoint;
        throw TransportError(what, status, fingerprint);
      }
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }

 private:
  static ChatReply parse_reply(const ChatRequest& req, const std::string& body, const std::string& fingerprint) {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception&) {
      throw TransportError("malformed response body", 200, fingerprint);
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty()) {
      throw TransportError("response has no choices", 200, fingerprint);
    }
    const auto& msg = j["choices"][0].value("message", json::object());
    ChatReply reply;
    reply.text = msg.contains("content") && msg["content"].is_string() ? msg["content"].get<std::string>() : "";
    reply.backend_kind = BackendKind::live;
    reply.usage = synthesized_usage(req, reply.text);
    if (j.contains("usage") && j["usage"].is_object()) {
      reply.usage.input_tokens = j["usage"].value("prompt_tokens", reply.usage.input_tokens);
      reply.usage.output_tokens = j["usage"].value("completion_tokens", reply.usage.output_tokens);
    }
    return reply;
  }

  LiveBackendConfig cfg_;
  ParsedEndpoint ep_;
};

}  // namespace madam
