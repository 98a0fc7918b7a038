#pragma once

// Uniform gateway to chat/vision model backends.
//
// A Provider owns the only mutable state shared between agents: the in-flight
// limiter, usage counters and (in record mode) the cassette being written.
// Requests are fingerprinted from a normalized form so a cassette recorded in
// one process replays in another.

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "scifig/model_json.hpp"

namespace scifig::provider {

enum class Backend { http_chat, replay, scripted };

std::string_view to_string(Backend b);
std::optional<Backend> parse_backend(std::string_view name);

struct ProviderConfig {
  Backend backend = Backend::replay;
  std::string endpoint;  // URL for http_chat; script path for scripted
  std::string model_name;
  std::string api_key_env = "SCIFIG_API_KEY";
  int max_retries = 3;
  int max_concurrent = 4;
  double timeout_seconds = 120.0;
  double backoff_base_seconds = 0.5;
};

// Throws Error(config) when an invariant fails.
void check(const ProviderConfig& cfg);

struct ImageAttachment {
  std::vector<std::uint8_t> png;
  // Optional stable key used for fingerprinting instead of the PNG bytes
  // (e.g. the digest of the SVG the raster came from).
  std::string content_key;
};

struct ChatRequest {
  std::string purpose;  // agent role tag, e.g. "extract", "feedback", "answer"
  std::string system;
  std::string user;
  std::vector<ImageAttachment> images;
  std::optional<std::string> schema_hint;
};

struct Usage {
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
};

struct ChatResponse {
  std::string text;
  Usage usage;
  double latency_ms = 0.0;
  int retry_count = 0;
  bool replayed = false;
};

std::string fingerprint(const ChatRequest& req);
std::string sha256_hex(std::string_view bytes);
std::string base64_encode(const std::vector<std::uint8_t>& bytes);

// ---------------------------------------------------------------------------
// Transports

struct TransportReply {
  int status = 200;  // HTTP-like status; 0 means the request timed out
  std::string text;  // assistant text on success, error body otherwise
  Usage usage;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportReply send(const ChatRequest& req, const ProviderConfig& cfg) = 0;
};

// OpenAI-compatible chat-completions over HTTP(S).
std::unique_ptr<Transport> make_http_transport();

// Serves canned responses from a script document:
//   {"schema": "scifig/1", "responses": [{"purpose": "...", "match": "...",
//     "text": "..."}]}
// Each entry is used once; the first unused entry whose purpose equals the
// request purpose (when given) and whose match string occurs in the user text
// (when given) is served. Used to author cassettes without a live model.
std::unique_ptr<Transport> make_scripted_transport(const std::filesystem::path& script);

// Status codes that warrant another attempt.
bool is_transient(int status);

// ---------------------------------------------------------------------------
// Cassettes

struct CassetteEntry {
  std::string fingerprint;
  std::string purpose;
  std::string text;
  Usage usage;
};

class Cassette {
 public:
  Cassette() = default;
  Cassette(Cassette&& other) noexcept;
  Cassette& operator=(Cassette&& other) noexcept;
  static Cassette load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  Json to_json() const;
  static Cassette from_json(const Json& doc);

  void append(CassetteEntry entry);
  // Serves recordings for a fingerprint in recorded order; once exhausted the
  // last one repeats. Returns nullopt on a miss.
  std::optional<CassetteEntry> lookup(const std::string& fingerprint);

  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<CassetteEntry> entries_;
  std::map<std::string, std::vector<std::size_t>> index_;
  std::map<std::string, std::size_t> cursor_;
};

// ---------------------------------------------------------------------------
// Gateway

struct ProviderStats {
  long long requests = 0;
  long long replayed = 0;
  long long retries = 0;
  long long prompt_tokens = 0;
  long long completion_tokens = 0;
  int max_in_flight = 0;
};

Json to_json(const ProviderStats& s);

using Sleeper = std::function<void(std::chrono::duration<double>)>;

class Provider {
 public:
  // Live gateway over `transport`. When `recorder` is set every successful
  // response is appended to it.
  Provider(ProviderConfig cfg, std::unique_ptr<Transport> transport,
           std::shared_ptr<Cassette> recorder = nullptr);
  // Replay-only gateway.
  Provider(ProviderConfig cfg, std::shared_ptr<Cassette> replay);

  Provider(const Provider&) = delete;
  Provider& operator=(const Provider&) = delete;

  ChatResponse complete(const ChatRequest& req);

  const ProviderConfig& config() const { return cfg_; }
  ProviderStats stats() const;
  std::shared_ptr<Cassette> recorder() const { return recorder_; }

  // Replaces the backoff sleep (tests).
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }

 private:
  ChatResponse complete_live(const ChatRequest& req, const std::string& fp);
  void acquire();
  void release();

  ProviderConfig cfg_;
  std::unique_ptr<Transport> transport_;
  std::shared_ptr<Cassette> replay_;
  std::shared_ptr<Cassette> recorder_;
  Sleeper sleeper_;

  mutable std::mutex mutex_;
  std::condition_variable slot_free_;
  int in_flight_ = 0;
  ProviderStats stats_;
};

using ProviderHandle = std::shared_ptr<Provider>;

struct ProviderOptions {
  std::optional<std::filesystem::path> replay_path;
  std::optional<std::filesystem::path> record_path;
};

// Builds a gateway from configuration. A replay path forces replay mode; a
// record path wraps the configured live/scripted backend with a recorder.
ProviderHandle make_provider(const ProviderConfig& cfg, const ProviderOptions& opts = {});

}  // namespace scifig::provider
