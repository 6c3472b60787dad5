#pragma once

#include <filesystem>

#include "skintone/ita/raster.hpp"

namespace skintone::ita {

/// Decodes a PNG or JPEG file into an 8-bit sRGB raster. Throws InvalidInput
/// when the file cannot be decoded.
Raster load_image(const std::filesystem::path& path);

/// Writes a raster (format chosen from the extension).
void save_image(const Raster& raster, const std::filesystem::path& path);

}  // namespace skintone::ita
