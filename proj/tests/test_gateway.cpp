#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <thread>

#include "dvr/gateway.hpp"

namespace {

// Local HTTP server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() = default;
  httplib::Server& server() { return server_; }

  std::string start() {
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return "http://127.0.0.1:" + std::to_string(port_);
  }

  ~LocalServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

dvr::GatewayConfig fast_config(const std::string& url) {
  dvr::GatewayConfig cfg;
  cfg.endpoint_url = url;
  cfg.classifier_url = url + "/classify";
  cfg.model = "local-test";
  cfg.retries = 2;
  cfg.backoff_s = 0.01;
  cfg.read_timeout_s = 5;
  return cfg;
}

std::string chat_body(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}, {"finish_reason", "stop"}}}}}
      .dump();
}

}  // namespace

TEST(ScriptedChatModel, RepliesInOrderThenExhausts) {
  dvr::ScriptedChatModel model({"first", "second"});
  EXPECT_EQ(model.chat(dvr::user_request("a")).content, "first");
  EXPECT_EQ(model.chat(dvr::user_request("b")).content, "second");
  EXPECT_EQ(model.remaining(), 0u);
  EXPECT_THROW(model.chat(dvr::user_request("c")), dvr::ScriptExhausted);
  EXPECT_EQ(model.prompts(), (std::vector<std::string>{"a", "b", "c"}));
}

TEST(ScriptedChatModel, EmptyMessagesRejected) {
  dvr::ScriptedChatModel model({"x"});
  EXPECT_THROW(model.chat(dvr::ChatRequest{}), std::invalid_argument);
  EXPECT_EQ(model.remaining(), 1u);
}

TEST(HttpChatModel, RequiresEndpoint) { EXPECT_THROW(dvr::HttpChatModel(dvr::GatewayConfig{}), dvr::GatewayError); }

TEST(HttpChatModel, PostsChatCompletion) {
  LocalServer local;
  std::string seen_auth;
  nlohmann::json seen_body;
  local.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen_auth = req.get_header_value("Authorization");
    seen_body = nlohmann::json::parse(req.body);
    res.set_content(chat_body("hello back"), "application/json");
  });
  auto cfg = fast_config(local.start() + "/v1/");
  cfg.api_key = "k-123";
  dvr::HttpChatModel model(cfg);
  const auto reply = model.chat(dvr::user_request("hello"));
  EXPECT_EQ(reply.content, "hello back");
  EXPECT_EQ(reply.finish_reason, "stop");
  EXPECT_EQ(seen_auth, "Bearer k-123");
  EXPECT_EQ(seen_body["model"], "local-test");
  EXPECT_EQ(seen_body["messages"][0]["content"], "hello");
  EXPECT_EQ(seen_body["messages"][0]["role"], "user");
}

TEST(HttpChatModel, RetriesServerErrors) {
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    if (calls++ == 0) {
      res.status = 503;
      return;
    }
    res.set_content(chat_body("ok"), "application/json");
  });
  dvr::HttpChatModel model(fast_config(local.start()));
  EXPECT_EQ(model.chat(dvr::user_request("x")).content, "ok");
  EXPECT_EQ(calls.load(), 2);
}

TEST(HttpChatModel, GivesUpAfterRetries) {
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 429;
  });
  dvr::HttpChatModel model(fast_config(local.start()));
  EXPECT_THROW(model.chat(dvr::user_request("x")), dvr::TransportError);
  EXPECT_EQ(calls.load(), 3);
}

TEST(HttpChatModel, ClientErrorIsRejection) {
  LocalServer local;
  std::atomic<int> calls{0};
  local.server().Post("/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 400;
    res.set_content("bad request", "text/plain");
  });
  dvr::HttpChatModel model(fast_config(local.start()));
  try {
    model.chat(dvr::user_request("x"));
    FAIL() << "expected EndpointRejection";
  } catch (const dvr::EndpointRejection& e) {
    EXPECT_EQ(e.status(), 400);
  }
  EXPECT_EQ(calls.load(), 1);
}

TEST(HttpChatModel, MalformedReplyIsGatewayError) {
  LocalServer local;
  local.server().Post("/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"choices":[]})", "application/json");
  });
  dvr::HttpChatModel model(fast_config(local.start()));
  EXPECT_THROW(model.chat(dvr::user_request("x")), dvr::GatewayError);
}

TEST(HttpClassifierClient, ReturnsLabel) {
  LocalServer local;
  nlohmann::json seen;
  local.server().Post("/classify", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    res.set_content(seen["text"] == "blank" ? R"({"label":""})" : R"({"label":"joy"})", "application/json");
  });
  dvr::HttpClassifierClient client(fast_config(local.start()));
  EXPECT_EQ(client.classify(dvr::ContentKind::sentiment, "What a day!"), "joy");
  EXPECT_EQ(seen["task"], "sentiment");
  EXPECT_THROW(client.classify(dvr::ContentKind::sentiment, "  \n"), dvr::UnknownLabel);
  EXPECT_THROW(client.classify(dvr::ContentKind::topic, "blank"), dvr::UnknownLabel);
}

TEST(GatewayConfig, LoadsFileWithoutCredentials) {
  const auto path = std::filesystem::temp_directory_path() / "dvr_gateway_config.json";
  {
    std::ofstream out(path);
    out << R"({"model":"m1","max_trials":3,"few_shot_refine":4,"api_key":"leak","endpoint_url":"http://x"})";
  }
  const auto cfg = dvr::load_gateway_config(path);
  EXPECT_EQ(cfg.model, "m1");
  EXPECT_EQ(cfg.max_trials, 3);
  EXPECT_EQ(cfg.few_shot_refine, 4);
  EXPECT_TRUE(cfg.api_key.empty());
  EXPECT_TRUE(cfg.endpoint_url.empty());
  {
    std::ofstream out(path);
    out << R"({"max_trials":0})";
  }
  EXPECT_THROW(dvr::load_gateway_config(path), dvr::SchemaError);
  std::filesystem::remove(path);
  EXPECT_THROW(dvr::load_gateway_config(path), dvr::IOFailure);
}

TEST(GatewayConfig, EnvironmentSuppliesEndpoint) {
  ::setenv("DVR_ENDPOINT_URL", "http://localhost:1", 1);
  ::setenv("DVR_API_KEY", "secret", 1);
  ::setenv("DVR_MODEL", "", 1);
  dvr::GatewayConfig cfg;
  dvr::apply_environment(cfg);
  EXPECT_EQ(cfg.endpoint_url, "http://localhost:1");
  EXPECT_EQ(cfg.api_key, "secret");
  EXPECT_EQ(cfg.model, "default");
  ::unsetenv("DVR_ENDPOINT_URL");
  ::unsetenv("DVR_API_KEY");
  ::unsetenv("DVR_MODEL");
}
