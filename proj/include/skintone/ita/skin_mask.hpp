#pragma once

#include <json.hpp>

#include "skintone/ita/raster.hpp"

namespace skintone::ita {

/// RGB + YCbCr skin-pixel rule. A pixel is skin when
///   R > r_min, G > g_min, B > b_min, R > G, R > B,
///   Y > y_min, cb_min <= Cb <= cb_max, cr_min <= Cr <= cr_max
/// with YCbCr in BT.601 full range. The RGB ordering tests can be switched off.
struct SkinRule {
    int r_min = 95;
    int g_min = 40;
    int b_min = 20;
    bool require_r_gt_g = true;
    bool require_r_gt_b = true;
    double y_min = 80.0;
    double cb_min = 85.0;
    double cb_max = 135.0;
    double cr_min = 135.0;
    double cr_max = 180.0;

    bool is_skin(Rgb8 pixel) const noexcept;
};

nlohmann::json to_json(const SkinRule& rule);
SkinRule skin_rule_from_json(const nlohmann::json& doc);

/// Throws InvalidInput for a zero-area raster.
SkinMask skin_mask(const Raster& raster, const SkinRule& rule = {});

}  // namespace skintone::ita
