#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "utilrank/pipeline.hpp"

namespace utilrank {

/// Reads a `key = value` configuration file into cfg. Blank lines and lines
/// starting with '#' are ignored. Keys mirror PipelineConfig; endpoint keys
/// use a role prefix, e.g. `judge.url`, `embedding.timeout_ms`. Throws
/// InvalidConfig on an unknown key or unparsable value.
void apply_config_text(PipelineConfig& cfg, const std::string& text);
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

/// Applies UTILRANK_JUDGE_URL, UTILRANK_EMBED_URL and UTILRANK_CONTROLLER_URL.
/// `getenv` is injectable for tests.
void apply_environment(PipelineConfig& cfg,
                       const std::function<std::optional<std::string>(const char*)>& getenv = {});

/// Serializes cfg in the format read by apply_config_text.
std::string render_config(const PipelineConfig& cfg);

}  // namespace utilrank
