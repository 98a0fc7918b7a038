#pragma once

// Description agent: method text -> validated two-level structure.

#include <string>
#include <vector>

#include "scifig/model.hpp"
#include "scifig/prompts.hpp"
#include "scifig/provider.hpp"

namespace scifig::extraction {

struct ExtractionConfig {
  int max_modules = 6;
  int max_components_per_module = 8;
  int max_schema_retries = 2;
  std::string prompt_template_id = "hierarchy_v1";
};

void check(const ExtractionConfig& cfg);

struct ExtractionResult {
  HierarchicalStructure structure;
  int retry_count = 0;  // schema-invalid replies before the accepted one
  bool default_relationships = false;  // sequential chain inserted
  std::vector<std::string> rejected;   // reasons for each rejected reply
};

// Single-shot prompting per attempt; a reply that fails to decode, normalize
// or validate is rejected and the provider is re-prompted with the reason.
// Throws Error(extraction_failed) on blank input or after max_schema_retries
// consecutive rejections past the first attempt; provider errors propagate.
ExtractionResult extract_hierarchy(const MethodDescription& text, const ExtractionConfig& cfg,
                                   provider::Provider& provider, const PromptLibrary& prompts);

// Repairs a decodable but possibly invalid structure:
//  - empty ids/labels filled, duplicate ids suffixed "-2", "-3", ...
//  - modules without components dropped
//  - modules past max_modules merged into the last kept module
//  - components past max_components_per_module dropped
//  - intra edges and relationships that no longer resolve, self references
//    and duplicates removed
// Idempotent; output passes validate_hierarchy. Throws
// Error(normalization_impossible) when no module survives.
HierarchicalStructure normalize_structure(HierarchicalStructure h, const ExtractionConfig& cfg);

}  // namespace scifig::extraction
