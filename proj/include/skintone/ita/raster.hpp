#pragma once

#include <cstddef>
#include <vector>

#include "skintone/ita/color.hpp"

namespace skintone::ita {

/// Row-major 8-bit sRGB image.
class Raster {
public:
    Raster() = default;
    Raster(std::size_t width, std::size_t height, Rgb8 fill = {});

    std::size_t width() const noexcept { return width_; }
    std::size_t height() const noexcept { return height_; }
    std::size_t size() const noexcept { return pixels_.size(); }
    bool empty() const noexcept { return pixels_.empty(); }

    Rgb8& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
    const Rgb8& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
    const std::vector<Rgb8>& pixels() const noexcept { return pixels_; }

private:
    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<Rgb8> pixels_;
};

/// A raster already in CIELAB, same layout as Raster.
struct LabImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<LabColor> pixels;

    static LabImage uniform(std::size_t width, std::size_t height, LabColor color);
};

LabImage to_lab(const Raster& raster);

/// true = healthy-skin candidate.
struct SkinMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<bool> bits;

    std::size_t count() const noexcept;
    static SkinMask full(std::size_t width, std::size_t height);

    bool operator==(const SkinMask&) const = default;
};

}  // namespace skintone::ita
