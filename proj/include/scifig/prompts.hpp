#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace scifig {

struct Prompt {
  std::string system;
  std::string user;
};

// Plain-text prompt templates stored as `<id>.system.txt` / `<id>.user.txt`
// in one directory. `{{name}}` placeholders are substituted on render; an
// unbound placeholder is a configuration error.
class PromptLibrary {
 public:
  explicit PromptLibrary(std::filesystem::path dir);

  // $SCIFIG_TEMPLATE_DIR if set, else the templates directory of the source tree.
  static PromptLibrary standard();

  Prompt render(std::string_view id, const std::map<std::string, std::string>& vars) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::string load(const std::string& file) const;

  std::filesystem::path dir_;
};

std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& vars);

}  // namespace scifig
