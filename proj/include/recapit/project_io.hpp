#pragma once

#include <filesystem>
#include <functional>
#include <string_view>

#include "recapit/model.hpp"

namespace recapit {

inline constexpr const char* kManifestName = "project.json";

// A directory resolves to `<dir>/project.json`; anything else is taken as the
// manifest file itself.
std::filesystem::path manifest_path(const std::filesystem::path& path);
std::filesystem::path project_root(const std::filesystem::path& path);

std::filesystem::path resolve_source(const std::filesystem::path& root, const SourceDescriptor& source);

// Type invariants only; does not touch the filesystem.
void validate_project(const WorkshopProject& project);

// Every source path must exist under `root`.
void check_sources_exist(const WorkshopProject& project, const std::filesystem::path& root);

WorkshopProject load_project(const std::filesystem::path& path);

void save_project(const WorkshopProject& project, const std::filesystem::path& path);

// Temp-file-and-rename. `before_rename` runs after the temp file is durable
// and before it replaces `path`; an exception thrown from it aborts the write
// and leaves `path` untouched.
void write_file_atomic(const std::filesystem::path& path, std::string_view content,
                       const std::function<void()>& before_rename = {});

std::string read_file(const std::filesystem::path& path);

}  // namespace recapit
