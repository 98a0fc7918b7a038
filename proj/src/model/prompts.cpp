#include "scifig/prompts.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scifig/error.hpp"

#ifndef SCIFIG_DEFAULT_TEMPLATE_DIR
#define SCIFIG_DEFAULT_TEMPLATE_DIR "templates"
#endif

namespace scifig {

PromptLibrary::PromptLibrary(std::filesystem::path dir) : dir_(std::move(dir)) {}

PromptLibrary PromptLibrary::standard() {
  if (const char* env = std::getenv("SCIFIG_TEMPLATE_DIR"); env != nullptr && *env != '\0')
    return PromptLibrary(env);
  return PromptLibrary(SCIFIG_DEFAULT_TEMPLATE_DIR);
}

std::string PromptLibrary::load(const std::string& file) const {
  const auto path = dir_ / file;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::config, "prompt template not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Prompt PromptLibrary::render(std::string_view id, const std::map<std::string, std::string>& vars) const {
  const std::string base(id);
  return {substitute(load(base + ".system.txt"), vars), substitute(load(base + ".user.txt"), vars)};
}

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (pos < tmpl.size()) {
    const auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    out.append(tmpl.substr(pos, open - pos));
    const std::string key(tmpl.substr(open + 2, close - open - 2));
    auto it = vars.find(key);
    if (it == vars.end()) throw Error(ErrorCode::config, "unbound template placeholder {{" + key + "}}");
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

}  // namespace scifig
