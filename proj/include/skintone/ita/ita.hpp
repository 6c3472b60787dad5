#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "skintone/core/fst_label.hpp"
#include "skintone/ita/raster.hpp"
#include "skintone/ita/skin_mask.hpp"

namespace skintone::ita {

/// Individual typology angle of one CIELAB colour: atan2(L - 50, b) in
/// degrees. Lighter skin gives larger angles.
double ita_degrees(const LabColor& lab) noexcept;

enum class Aggregation { Mean, Median };

struct ItaResult {
    double mean_ita_deg = 0.0;
    std::size_t masked_pixel_count = 0;
    std::optional<FstLabel> fst;
};

/// Per-pixel ITA over the masked pixels, then aggregated. Throws
/// InvalidInput on a dimension mismatch and NoSkinDetected on an empty mask.
ItaResult compute_ita(const LabImage& image, const SkinMask& mask, Aggregation aggregation = Aggregation::Mean);
ItaResult compute_ita(const Raster& image, const SkinMask& mask, Aggregation aggregation = Aggregation::Mean);

/// Cut points between adjacent types, strictly decreasing from t12 to t56.
struct ItaThresholds {
    double t12 = 55.0;
    double t23 = 41.0;
    double t34 = 28.0;
    double t45 = 10.0;
    double t56 = -30.0;

    std::array<double, 5> values() const noexcept { return {t12, t23, t34, t45, t56}; }
    static ItaThresholds from_values(const std::array<double, 5>& v) noexcept;
    bool ordered() const noexcept;

    bool operator==(const ItaThresholds&) const = default;
};

/// ITA above t12 is type I, ..., at or below t56 is type VI. A value equal
/// to a threshold falls into the darker type.
FstLabel ita_to_fst(double ita_deg, const ItaThresholds& thresholds);

nlohmann::json to_json(const ItaThresholds& thresholds);
/// Requires all five keys and a strictly decreasing order.
ItaThresholds thresholds_from_json(const nlohmann::json& doc);

/// Full per-image pipeline: mask, ITA, label. An image without skin pixels is
/// labeled NotApplicable with a zero pixel count.
ItaResult annotate(const Raster& image, const ItaThresholds& thresholds, const SkinRule& rule = {},
                   Aggregation aggregation = Aggregation::Mean);

struct ItaRow {
    std::string image_id;
    ItaResult result;
};

/// `image_id,mean_ita_deg,masked_pixel_count,fst`; rows without skin leave
/// mean_ita_deg blank.
std::string ita_results_csv(const std::vector<ItaRow>& rows);
std::vector<ItaRow> parse_ita_results_csv(std::string_view text);

}  // namespace skintone::ita
