#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "scifig/model.hpp"
#include "scifig/provider.hpp"

namespace scifig::testing {

// 1..max_modules modules, 1..max_components components each, intra edges
// along declaration order, and forward-only (acyclic) module relationships of
// random kind.
HierarchicalStructure random_hierarchy(std::mt19937_64& rng, int max_modules = 6, int max_components = 8);

// Transport backed by a callback; lets tests script replies per request.
class FnTransport : public provider::Transport {
 public:
  using Fn = std::function<provider::TransportReply(const provider::ChatRequest&)>;
  explicit FnTransport(Fn fn) : fn_(std::move(fn)) {}
  provider::TransportReply send(const provider::ChatRequest& req, const provider::ProviderConfig&) override {
    return fn_(req);
  }

 private:
  Fn fn_;
};

provider::ProviderHandle fn_provider(FnTransport::Fn fn, int max_retries = 0);

std::filesystem::path fixture(const std::string& rel);

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "scifig");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::filesystem::path& p);
void spit(const std::filesystem::path& p, const std::string& text);

}  // namespace scifig::testing
