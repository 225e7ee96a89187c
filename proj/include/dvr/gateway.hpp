#pragma once

// Chat-model boundary: request/reply types, a scripted model for tests, an
// HTTP client speaking the chat-completion JSON protocol, the classifier
// client, and gateway configuration.

#include <chrono>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "dvr/content.hpp"
#include "dvr/error.hpp"

namespace dvr {

inline constexpr double kDefaultTemperature = 0.8;

struct ChatMessage {
  std::string role;
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = kDefaultTemperature;
  int max_tokens = 1024;
};

struct ChatReply {
  std::string content;
  std::string finish_reason;
};

inline ChatRequest user_request(std::string prompt, std::string model = {}) {
  ChatRequest req;
  req.model = std::move(model);
  req.messages.push_back({"user", std::move(prompt)});
  return req;
}

class ChatModel {
 public:
  virtual ~ChatModel() = default;
  virtual ChatReply chat(const ChatRequest& request) = 0;
  virtual std::string model_name() const = 0;
};

inline void check_request(const ChatRequest& request) {
  if (request.messages.empty()) throw std::invalid_argument("chat request has no messages");
}

// Replies from a fixed script, in order. Single consumer.
class ScriptedChatModel final : public ChatModel {
 public:
  explicit ScriptedChatModel(std::vector<std::string> script, std::string name = "scripted")
      : script_(script.begin(), script.end()), name_(std::move(name)) {}

  ChatReply chat(const ChatRequest& request) override {
    check_request(request);
    std::lock_guard lock(mu_);
    prompts_.push_back(request.messages.back().content);
    if (script_.empty()) throw ScriptExhausted("scripted model has no replies left");
    ChatReply reply{std::move(script_.front()), "stop"};
    script_.pop_front();
    return reply;
  }

  std::string model_name() const override { return name_; }

  std::size_t remaining() const {
    std::lock_guard lock(mu_);
    return script_.size();
  }

  // Last user message of every request received, in order.
  std::vector<std::string> prompts() const {
    std::lock_guard lock(mu_);
    return prompts_;
  }

 private:
  mutable std::mutex mu_;
  std::deque<std::string> script_;
  std::vector<std::string> prompts_;
  std::string name_;
};

struct GatewayConfig {
  std::string endpoint_url;
  std::string api_key;
  std::string model = "default";
  std::string classifier_url;
  double temperature = kDefaultTemperature;
  int max_tokens = 1024;
  int max_trials = 5;
  int few_shot_generate = 5;
  int few_shot_refine = 8;
  double connect_timeout_s = 10.0;
  double read_timeout_s = 120.0;
  int retries = 3;
  double backoff_s = 1.0;
  // Optional global cap on refinement rounds per instruction.
  std::optional<int> max_rounds;
};

// Reads the JSON config file. Credentials are never read from it.
inline GatewayConfig load_gateway_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IOFailure("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("config " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError("config must be a JSON object");
  GatewayConfig c;
  try {
    c.model = j.value("model", c.model);
    c.temperature = j.value("temperature", c.temperature);
    c.max_tokens = j.value("max_tokens", c.max_tokens);
    c.max_trials = j.value("max_trials", c.max_trials);
    c.few_shot_generate = j.value("few_shot_generate", c.few_shot_generate);
    c.few_shot_refine = j.value("few_shot_refine", c.few_shot_refine);
    c.connect_timeout_s = j.value("connect_timeout_s", c.connect_timeout_s);
    c.read_timeout_s = j.value("read_timeout_s", c.read_timeout_s);
    c.retries = j.value("retries", c.retries);
    c.backoff_s = j.value("backoff_s", c.backoff_s);
    if (j.contains("max_rounds") && !j["max_rounds"].is_null()) c.max_rounds = j["max_rounds"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("config " + path.string() + ": " + e.what());
  }
  if (c.max_trials < 1) throw SchemaError("max_trials must be >= 1");
  if (c.retries < 0) throw SchemaError("retries must be >= 0");
  return c;
}

// Fills endpoint, key, model and classifier from DVR_ENDPOINT_URL,
// DVR_API_KEY, DVR_MODEL and DVR_CLASSIFIER_URL when set.
inline void apply_environment(GatewayConfig& c) {
  const auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("DVR_ENDPOINT_URL")) c.endpoint_url = *v;
  if (auto v = env("DVR_API_KEY")) c.api_key = *v;
  if (auto v = env("DVR_MODEL")) c.model = *v;
  if (auto v = env("DVR_CLASSIFIER_URL")) c.classifier_url = *v;
}

namespace detail {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string path;    // base path without trailing slash
};

inline Endpoint split_url(const std::string& url) {
  const std::size_t scheme = url.find("://");
  if (scheme == std::string::npos) throw GatewayError("endpoint URL needs a scheme: " + url);
  const std::size_t slash = url.find('/', scheme + 3);
  Endpoint e;
  e.origin = url.substr(0, slash);
  e.path = slash == std::string::npos ? std::string{} : url.substr(slash);
  while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
  return e;
}

inline bool retryable_status(int status) { return status == 429 || status >= 500; }

// POSTs JSON with retries on transport failures and 429/5xx.
inline nlohmann::json post_json(const GatewayConfig& cfg, const std::string& url, const std::string& suffix,
                                const nlohmann::json& body) {
  const Endpoint ep = split_url(url);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(std::chrono::milliseconds(static_cast<long>(cfg.connect_timeout_s * 1000)));
  client.set_read_timeout(std::chrono::milliseconds(static_cast<long>(cfg.read_timeout_s * 1000)));
  httplib::Headers headers;
  if (!cfg.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg.api_key);
  const std::string payload = body.dump();
  std::string last_error;
  for (int attempt = 0; attempt <= cfg.retries; ++attempt) {
    if (attempt > 0) {
      const double wait = cfg.backoff_s * static_cast<double>(1 << std::min(attempt - 1, 6));
      std::this_thread::sleep_for(std::chrono::milliseconds(static_cast<long>(wait * 1000)));
    }
    auto res = client.Post(ep.path + suffix, headers, payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw GatewayError(std::string("endpoint returned invalid JSON: ") + e.what());
      }
    }
    if (!retryable_status(res->status)) throw EndpointRejection(res->status, res->body);
    last_error = "HTTP " + std::to_string(res->status);
  }
  throw TransportError("request to " + url + suffix + " failed after " + std::to_string(cfg.retries + 1) +
                       " attempt(s): " + last_error);
}

}  // namespace detail

// Chat-completion client: POST {base}/chat/completions, reply text from
// choices[0].message.content. Safe for concurrent use.
class HttpChatModel final : public ChatModel {
 public:
  explicit HttpChatModel(GatewayConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint_url.empty()) throw GatewayError("no chat endpoint configured (set DVR_ENDPOINT_URL)");
  }

  ChatReply chat(const ChatRequest& request) override {
    check_request(request);
    nlohmann::json body{{"model", request.model.empty() ? cfg_.model : request.model},
                        {"temperature", request.temperature},
                        {"max_tokens", request.max_tokens}};
    body["messages"] = nlohmann::json::array();
    for (const auto& m : request.messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
    const nlohmann::json reply = detail::post_json(cfg_, cfg_.endpoint_url, "/chat/completions", body);
    try {
      const auto& choice = reply.at("choices").at(0);
      ChatReply out;
      out.content = choice.at("message").at("content").get<std::string>();
      if (choice.contains("finish_reason") && choice["finish_reason"].is_string()) {
        out.finish_reason = choice["finish_reason"].get<std::string>();
      }
      return out;
    } catch (const nlohmann::json::exception& e) {
      throw GatewayError(std::string("unexpected chat reply shape: ") + e.what());
    }
  }

  std::string model_name() const override { return cfg_.model; }

 private:
  GatewayConfig cfg_;
};

// Classifier client: POST {base} with {"task","text"}, reply {"label"}.
class HttpClassifierClient final : public ContentClassifier {
 public:
  explicit HttpClassifierClient(GatewayConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.classifier_url.empty()) throw GatewayError("no classifier endpoint configured (set DVR_CLASSIFIER_URL)");
  }

  std::string classify(ContentKind kind, std::string_view text) override {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
      throw UnknownLabel("cannot classify empty text");
    }
    const nlohmann::json body{{"task", std::string(content_kind_name(kind))}, {"text", std::string(text)}};
    const nlohmann::json reply = detail::post_json(cfg_, cfg_.classifier_url, "", body);
    if (!reply.is_object() || !reply.contains("label") || !reply["label"].is_string()) {
      throw UnknownLabel("classifier reply carries no label");
    }
    std::string label = reply["label"].get<std::string>();
    if (label.empty()) throw UnknownLabel("classifier returned an empty label");
    return label;
  }

 private:
  GatewayConfig cfg_;
};

}  // namespace dvr
