#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "skintone/core/records.hpp"

namespace skintone {

/// Parses a dataset manifest:
///
///     image_id,file_path,source,expert1,expert2,expert3
///
/// Every column after `source` is an expert whose id is the column name.
/// Expert cells hold 1..6, NA, or nothing. Errors carry the 1-based line.
std::vector<ImageRecord> parse_manifest(std::string_view text);

std::vector<ImageRecord> read_manifest(const std::filesystem::path& path);

/// Paths (relative to image_root) that do not exist on disk.
std::vector<std::string> missing_image_files(const std::vector<ImageRecord>& images,
                                             const std::filesystem::path& image_root);

}  // namespace skintone
