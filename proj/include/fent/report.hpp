#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace fent {

constexpr const char* kOutputDirEnv = "FENT_OUTPUT_DIR";

// explicit_dir if non-empty, else $FENT_OUTPUT_DIR, else the working directory.
std::filesystem::path output_directory(const std::string& explicit_dir);

// Creates parent directories; throws std::runtime_error when the file cannot be written.
void write_text(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace fent
