#include "skintone/ita/skin_mask.hpp"

#include "skintone/core/error.hpp"

namespace skintone::ita {

bool SkinRule::is_skin(Rgb8 p) const noexcept {
    if (!(p.r > r_min && p.g > g_min && p.b > b_min)) return false;
    if (require_r_gt_g && !(p.r > p.g)) return false;
    if (require_r_gt_b && !(p.r > p.b)) return false;
    const auto ycc = srgb_to_ycbcr(p);
    return ycc.y > y_min && ycc.cb >= cb_min && ycc.cb <= cb_max && ycc.cr >= cr_min && ycc.cr <= cr_max;
}

nlohmann::json to_json(const SkinRule& r) {
    return {{"r_min", r.r_min},     {"g_min", r.g_min},         {"b_min", r.b_min},
            {"require_r_gt_g", r.require_r_gt_g},               {"require_r_gt_b", r.require_r_gt_b},
            {"y_min", r.y_min},     {"cb_min", r.cb_min},       {"cb_max", r.cb_max},
            {"cr_min", r.cr_min},   {"cr_max", r.cr_max}};
}

SkinRule skin_rule_from_json(const nlohmann::json& doc) {
    SkinRule r;
    r.r_min = doc.value("r_min", r.r_min);
    r.g_min = doc.value("g_min", r.g_min);
    r.b_min = doc.value("b_min", r.b_min);
    r.require_r_gt_g = doc.value("require_r_gt_g", r.require_r_gt_g);
    r.require_r_gt_b = doc.value("require_r_gt_b", r.require_r_gt_b);
    r.y_min = doc.value("y_min", r.y_min);
    r.cb_min = doc.value("cb_min", r.cb_min);
    r.cb_max = doc.value("cb_max", r.cb_max);
    r.cr_min = doc.value("cr_min", r.cr_min);
    r.cr_max = doc.value("cr_max", r.cr_max);
    return r;
}

SkinMask skin_mask(const Raster& raster, const SkinRule& rule) {
    if (raster.empty()) throw Error(ErrorCode::InvalidInput, "cannot mask a zero-area image");
    SkinMask mask{raster.width(), raster.height(), std::vector<bool>(raster.size())};
    const auto& pixels = raster.pixels();
    for (std::size_t i = 0; i < pixels.size(); ++i) mask.bits[i] = rule.is_skin(pixels[i]);
    return mask;
}

}  // namespace skintone::ita
