#include "skintone/ita/raster.hpp"

#include <algorithm>

namespace skintone::ita {

Raster::Raster(std::size_t width, std::size_t height, Rgb8 fill)
    : width_(width), height_(height), pixels_(width * height, fill) {}

LabImage LabImage::uniform(std::size_t width, std::size_t height, LabColor color) {
    return {width, height, std::vector<LabColor>(width * height, color)};
}

LabImage to_lab(const Raster& raster) {
    LabImage lab{raster.width(), raster.height(), {}};
    lab.pixels.reserve(raster.size());
    for (const auto& p : raster.pixels()) lab.pixels.push_back(srgb_to_lab(p));
    return lab;
}

std::size_t SkinMask::count() const noexcept {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), true));
}

SkinMask SkinMask::full(std::size_t width, std::size_t height) {
    return {width, height, std::vector<bool>(width * height, true)};
}

}  // namespace skintone::ita
