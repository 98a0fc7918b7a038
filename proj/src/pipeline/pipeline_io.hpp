#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "scifig/pipeline.hpp"
#include "scifig/prompts.hpp"

namespace scifig::pipeline {

std::string read_text_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);
void write_document(const std::filesystem::path& path, const Json& doc);
// Creates the directory and checks that a file can be written there.
void ensure_output_dir(const std::filesystem::path& dir);
PromptLibrary prompt_library(const RunConfig& cfg);
// "<dir>/method.txt" -> dir name, otherwise the file stem.
std::string paper_id_for(const std::filesystem::path& text_path);

}  // namespace scifig::pipeline
