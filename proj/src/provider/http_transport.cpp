#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include <cstdlib>

#include "scifig/error.hpp"
#include "scifig/provider.hpp"

namespace scifig::provider {
namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorCode::config, "provider.endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

Json build_body(const ChatRequest& req, const ProviderConfig& cfg) {
  Json messages = Json::array();
  if (!req.system.empty()) messages.push_back(Json{{"role", "system"}, {"content", req.system}});
  Json content = Json::array();
  content.push_back(Json{{"type", "text"}, {"text", req.user}});
  for (const auto& img : req.images) {
    content.push_back(Json{{"type", "image_url"},
                           {"image_url", Json{{"url", "data:image/png;base64," + base64_encode(img.png)}}}});
  }
  messages.push_back(Json{{"role", "user"}, {"content", content}});
  Json body{{"model", cfg.model_name}, {"messages", messages}};
  if (req.schema_hint) body["response_format"] = Json{{"type", "json_object"}};
  return body;
}

class HttpTransport final : public Transport {
 public:
  TransportReply send(const ChatRequest& req, const ProviderConfig& cfg) override {
    const auto [origin, path] = split_url(cfg.endpoint);
    httplib::Client client(origin);
    const auto secs = static_cast<time_t>(cfg.timeout_seconds);
    client.set_connection_timeout(secs);
    client.set_read_timeout(secs);
    client.set_write_timeout(secs);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg.api_key_env.c_str()); key != nullptr && *key != '\0')
      headers.emplace("Authorization", std::string("Bearer ") + key);

    auto res = client.Post(path, headers, build_body(req, cfg).dump(), "application/json");
    if (!res) {
      const auto err = res.error();
      const bool timed_out = err == httplib::Error::Read || err == httplib::Error::Write ||
                             err == httplib::Error::ConnectionTimeout;
      return {timed_out ? 0 : -1, httplib::to_string(err), {}};
    }
    if (res->status < 200 || res->status >= 300) return {res->status, res->body, {}};

    TransportReply reply;
    try {
      const auto doc = Json::parse(res->body);
      reply.text = doc.at("choices").at(0).at("message").at("content").get<std::string>();
      if (auto u = doc.find("usage"); u != doc.end()) {
        reply.usage.prompt_tokens = u->value("prompt_tokens", 0LL);
        reply.usage.completion_tokens = u->value("completion_tokens", 0LL);
      }
    } catch (const nlohmann::json::exception& e) {
      return {502, std::string("unreadable chat-completion body: ") + e.what(), {}};
    }
    return reply;
  }
};

}  // namespace

std::unique_ptr<Transport> make_http_transport() { return std::make_unique<HttpTransport>(); }

}  // namespace scifig::provider
