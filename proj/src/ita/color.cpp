#include "skintone/ita/color.hpp"

#include <array>
#include <cmath>

namespace skintone::ita {

namespace {

// IEC 61966-2-1 primaries, D65.
constexpr double kXyzFromRgb[3][3] = {
    {0.412453, 0.357580, 0.180423},
    {0.212671, 0.715160, 0.072169},
    {0.019334, 0.119193, 0.950227},
};
constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

constexpr double kEpsilon = 216.0 / 24389.0;
constexpr double kKappa = 24389.0 / 27.0;

// Linearization depends only on the 8-bit code, so tabulate it once.
const std::array<double, 256>& linear_table() {
    static const auto table = [] {
        std::array<double, 256> t{};
        for (int i = 0; i < 256; ++i) {
            const double c = i / 255.0;
            t[i] = c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4);
        }
        return t;
    }();
    return table;
}

double lab_f(double t) { return t > kEpsilon ? std::cbrt(t) : (kKappa * t + 16.0) / 116.0; }

}  // namespace

LabColor srgb_to_lab(Rgb8 pixel) noexcept {
    const auto& lin = linear_table();
    const double r = lin[pixel.r];
    const double g = lin[pixel.g];
    const double b = lin[pixel.b];

    const double x = kXyzFromRgb[0][0] * r + kXyzFromRgb[0][1] * g + kXyzFromRgb[0][2] * b;
    const double y = kXyzFromRgb[1][0] * r + kXyzFromRgb[1][1] * g + kXyzFromRgb[1][2] * b;
    const double z = kXyzFromRgb[2][0] * r + kXyzFromRgb[2][1] * g + kXyzFromRgb[2][2] * b;

    const double fx = lab_f(x / kWhiteX);
    const double fy = lab_f(y / kWhiteY);
    const double fz = lab_f(z / kWhiteZ);
    return {116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)};
}

YCbCr srgb_to_ycbcr(Rgb8 pixel) noexcept {
    const double r = pixel.r;
    const double g = pixel.g;
    const double b = pixel.b;
    return {0.299 * r + 0.587 * g + 0.114 * b,
            128.0 - 0.168736 * r - 0.331264 * g + 0.5 * b,
            128.0 + 0.5 * r - 0.418688 * g - 0.081312 * b};
}

}  // namespace skintone::ita
