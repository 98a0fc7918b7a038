#include "scifig/provider.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <spdlog/spdlog.h>

#include "scifig/error.hpp"

namespace scifig::provider {

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::http_chat: return "http_chat";
    case Backend::replay: return "replay";
    case Backend::scripted: return "scripted";
  }
  return "replay";
}

std::optional<Backend> parse_backend(std::string_view name) {
  if (name == "http_chat") return Backend::http_chat;
  if (name == "replay") return Backend::replay;
  if (name == "scripted") return Backend::scripted;
  return std::nullopt;
}

void check(const ProviderConfig& cfg) {
  if (cfg.max_retries < 0) throw Error(ErrorCode::config, "provider.max_retries must be >= 0");
  if (cfg.max_concurrent < 1) throw Error(ErrorCode::config, "provider.max_concurrent must be >= 1");
  if (!(cfg.timeout_seconds > 0.0)) throw Error(ErrorCode::config, "provider.timeout must be > 0");
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::provider, "sha256 digest failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), bytes.data(),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string fingerprint(const ChatRequest& req) {
  // nlohmann::json (not ordered_json) keeps keys sorted.
  nlohmann::json norm;
  norm["purpose"] = req.purpose;
  norm["system"] = collapse_whitespace(req.system);
  norm["user"] = collapse_whitespace(req.user);
  norm["schema_hint"] = req.schema_hint ? nlohmann::json(collapse_whitespace(*req.schema_hint))
                                        : nlohmann::json(nullptr);
  auto images = nlohmann::json::array();
  for (const auto& img : req.images) {
    if (!img.content_key.empty()) {
      images.push_back(sha256_hex(img.content_key));
    } else {
      images.push_back(sha256_hex(
          std::string_view(reinterpret_cast<const char*>(img.png.data()), img.png.size())));
    }
  }
  norm["images"] = images;
  return sha256_hex(norm.dump());
}

bool is_transient(int status) { return status <= 0 || status == 429 || (status >= 500 && status < 600); }

// ---------------------------------------------------------------------------
// Scripted transport

namespace {

class ScriptedTransport final : public Transport {
 public:
  explicit ScriptedTransport(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config, "cannot open provider script " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const Json doc = check_document(parse_json(ss.str()));
    const auto it = doc.find("responses");
    if (it == doc.end() || !it->is_array())
      throw Error(ErrorCode::config, "provider script needs a 'responses' array");
    for (const auto& r : *it) {
      Entry e;
      e.purpose = r.value("purpose", "");
      e.match = r.value("match", "");
      e.text = r.is_object() && r.contains("json") ? r["json"].dump(2) : r.value("text", "");
      entries_.push_back(std::move(e));
    }
  }

  TransportReply send(const ChatRequest& req, const ProviderConfig&) override {
    std::lock_guard lock(mutex_);
    for (auto& e : entries_) {
      if (e.used) continue;
      if (!e.purpose.empty() && e.purpose != req.purpose) continue;
      if (!e.match.empty() && req.user.find(e.match) == std::string::npos) continue;
      e.used = true;
      TransportReply reply;
      reply.text = e.text;
      reply.usage.prompt_tokens = static_cast<long long>((req.system.size() + req.user.size()) / 4);
      reply.usage.completion_tokens = static_cast<long long>(e.text.size() / 4);
      return reply;
    }
    return {404, "no scripted response for purpose '" + req.purpose + "'", {}};
  }

 private:
  struct Entry {
    std::string purpose;
    std::string match;
    std::string text;
    bool used = false;
  };
  std::mutex mutex_;
  std::vector<Entry> entries_;
};

}  // namespace

std::unique_ptr<Transport> make_scripted_transport(const std::filesystem::path& script) {
  return std::make_unique<ScriptedTransport>(script);
}

// ---------------------------------------------------------------------------
// Cassette

Cassette::Cassette(Cassette&& other) noexcept {
  std::lock_guard lock(other.mutex_);
  entries_ = std::move(other.entries_);
  index_ = std::move(other.index_);
  cursor_ = std::move(other.cursor_);
}

Cassette& Cassette::operator=(Cassette&& other) noexcept {
  if (this == &other) return *this;
  std::scoped_lock lock(mutex_, other.mutex_);
  entries_ = std::move(other.entries_);
  index_ = std::move(other.index_);
  cursor_ = std::move(other.cursor_);
  return *this;
}

Cassette Cassette::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open cassette " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(parse_json(ss.str()));
}

void Cassette::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write cassette " + path.string());
  out << dump_document(to_json());
}

Json Cassette::to_json() const {
  std::lock_guard lock(mutex_);
  Json entries = Json::array();
  for (const auto& e : entries_) {
    entries.push_back(Json{{"fingerprint", e.fingerprint},
                           {"purpose", e.purpose},
                           {"response",
                            Json{{"text", e.text},
                                 {"usage", Json{{"prompt_tokens", e.usage.prompt_tokens},
                                                {"completion_tokens", e.usage.completion_tokens}}}}}});
  }
  return make_document(Json{{"entries", entries}});
}

Cassette Cassette::from_json(const Json& doc) {
  check_document(doc);
  Cassette c;
  const auto it = doc.find("entries");
  if (it == doc.end() || !it->is_array()) throw Error(ErrorCode::decode, "cassette: missing 'entries'");
  for (const auto& e : *it) {
    CassetteEntry entry;
    entry.fingerprint = e.at("fingerprint").get<std::string>();
    entry.purpose = e.value("purpose", "");
    const auto& resp = e.at("response");
    entry.text = resp.at("text").get<std::string>();
    if (auto u = resp.find("usage"); u != resp.end()) {
      entry.usage.prompt_tokens = u->value("prompt_tokens", 0LL);
      entry.usage.completion_tokens = u->value("completion_tokens", 0LL);
    }
    c.append(std::move(entry));
  }
  return c;
}

void Cassette::append(CassetteEntry entry) {
  std::lock_guard lock(mutex_);
  index_[entry.fingerprint].push_back(entries_.size());
  entries_.push_back(std::move(entry));
}

std::optional<CassetteEntry> Cassette::lookup(const std::string& fp) {
  std::lock_guard lock(mutex_);
  auto it = index_.find(fp);
  if (it == index_.end()) return std::nullopt;
  std::size_t& cur = cursor_[fp];
  const std::size_t pick = it->second[std::min(cur, it->second.size() - 1)];
  if (cur < it->second.size()) ++cur;
  return entries_[pick];
}

std::size_t Cassette::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Gateway

Json to_json(const ProviderStats& s) {
  return Json{{"requests", s.requests},
              {"replayed", s.replayed},
              {"retries", s.retries},
              {"prompt_tokens", s.prompt_tokens},
              {"completion_tokens", s.completion_tokens},
              {"max_in_flight", s.max_in_flight}};
}

namespace {
void default_sleep(std::chrono::duration<double> d) { std::this_thread::sleep_for(d); }
}  // namespace

Provider::Provider(ProviderConfig cfg, std::unique_ptr<Transport> transport,
                   std::shared_ptr<Cassette> recorder)
    : cfg_(std::move(cfg)),
      transport_(std::move(transport)),
      recorder_(std::move(recorder)),
      sleeper_(default_sleep) {
  check(cfg_);
  if (!transport_) throw Error(ErrorCode::config, "provider: live mode needs a transport");
}

Provider::Provider(ProviderConfig cfg, std::shared_ptr<Cassette> replay)
    : cfg_(std::move(cfg)), replay_(std::move(replay)), sleeper_(default_sleep) {
  check(cfg_);
  if (!replay_) throw Error(ErrorCode::config, "provider: replay mode needs a cassette");
}

void Provider::acquire() {
  std::unique_lock lock(mutex_);
  slot_free_.wait(lock, [&] { return in_flight_ < cfg_.max_concurrent; });
  ++in_flight_;
  stats_.max_in_flight = std::max(stats_.max_in_flight, in_flight_);
}

void Provider::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  slot_free_.notify_one();
}

ProviderStats Provider::stats() const {
  std::lock_guard lock(mutex_);
  return stats_;
}

ChatResponse Provider::complete(const ChatRequest& req) {
  const std::string fp = fingerprint(req);
  acquire();
  struct Release {
    Provider* self;
    ~Release() { self->release(); }
  } guard{this};

  if (replay_) {
    auto hit = replay_->lookup(fp);
    if (!hit) {
      throw Error(ErrorCode::replay_miss,
                  "replay miss: no recording for fingerprint " + fp + " (purpose '" + req.purpose + "')");
    }
    ChatResponse resp;
    resp.text = hit->text;
    resp.usage = hit->usage;
    resp.replayed = true;
    std::lock_guard lock(mutex_);
    ++stats_.requests;
    ++stats_.replayed;
    stats_.prompt_tokens += resp.usage.prompt_tokens;
    stats_.completion_tokens += resp.usage.completion_tokens;
    return resp;
  }
  return complete_live(req, fp);
}

ChatResponse Provider::complete_live(const ChatRequest& req, const std::string& fp) {
  const auto start = std::chrono::steady_clock::now();
  TransportReply reply;
  int attempt = 0;
  for (;; ++attempt) {
    reply = transport_->send(req, cfg_);
    if (reply.status >= 200 && reply.status < 300) break;
    if (!is_transient(reply.status)) {
      throw Error(ErrorCode::provider,
                  "provider returned status " + std::to_string(reply.status) + ": " + reply.text);
    }
    if (attempt >= cfg_.max_retries) {
      const std::string msg = "giving up after " + std::to_string(attempt + 1) +
                              " attempts (last status " + std::to_string(reply.status) + ")";
      if (reply.status == 429) throw Error(ErrorCode::rate_limited, "rate limited: " + msg);
      if (reply.status == 0) throw Error(ErrorCode::timeout, "timeout: " + msg);
      throw Error(ErrorCode::provider, msg);
    }
    const double delay = cfg_.backoff_base_seconds * std::pow(2.0, attempt);
    spdlog::warn("provider: transient status {} for '{}', retrying in {:.2f}s", reply.status,
                 req.purpose, delay);
    sleeper_(std::chrono::duration<double>(delay));
  }
  if (reply.text.empty()) throw Error(ErrorCode::provider, "provider returned an empty response");

  ChatResponse resp;
  resp.text = std::move(reply.text);
  resp.usage = reply.usage;
  resp.retry_count = attempt;
  resp.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();

  if (recorder_) recorder_->append({fp, req.purpose, resp.text, resp.usage});
  std::lock_guard lock(mutex_);
  ++stats_.requests;
  stats_.retries += attempt;
  stats_.prompt_tokens += resp.usage.prompt_tokens;
  stats_.completion_tokens += resp.usage.completion_tokens;
  return resp;
}

ProviderHandle make_provider(const ProviderConfig& cfg, const ProviderOptions& opts) {
  check(cfg);
  if (opts.replay_path) {
    auto cassette = std::make_shared<Cassette>(Cassette::load(*opts.replay_path));
    return std::make_shared<Provider>(cfg, std::move(cassette));
  }
  std::shared_ptr<Cassette> recorder;
  if (opts.record_path) recorder = std::make_shared<Cassette>();
  switch (cfg.backend) {
    case Backend::http_chat:
      return std::make_shared<Provider>(cfg, make_http_transport(), recorder);
    case Backend::scripted:
      return std::make_shared<Provider>(cfg, make_scripted_transport(cfg.endpoint), recorder);
    case Backend::replay:
      if (cfg.endpoint.empty())
        throw Error(ErrorCode::config, "replay backend needs a cassette (--replay or provider.endpoint)");
      return std::make_shared<Provider>(
          cfg, std::make_shared<Cassette>(Cassette::load(cfg.endpoint)));
  }
  throw Error(ErrorCode::config, "unknown provider backend");
}

}  // namespace scifig::provider
