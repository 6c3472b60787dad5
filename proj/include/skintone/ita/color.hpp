#pragma once

#include <cstdint>

namespace skintone::ita {

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb8&) const = default;
};

/// CIELAB under the D65 white point (2 degree observer).
struct LabColor {
    double L = 0.0;
    double a = 0.0;
    double b = 0.0;
};

struct YCbCr {
    double y = 0.0;
    double cb = 0.0;
    double cr = 0.0;
};

/// sRGB companding -> linear RGB -> XYZ (sRGB primaries) -> CIELAB (D65).
LabColor srgb_to_lab(Rgb8 pixel) noexcept;

/// ITU-R BT.601 full-range YCbCr.
YCbCr srgb_to_ycbcr(Rgb8 pixel) noexcept;

}  // namespace skintone::ita
