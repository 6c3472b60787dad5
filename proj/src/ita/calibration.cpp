#include "skintone/ita/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "skintone/core/error.hpp"

namespace skintone::ita {

double quantile(std::span<const double> values, double q) {
    if (values.empty()) throw Error(ErrorCode::EmptyInput, "quantile of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

int concordance(const std::map<std::string, double>& ita_by_image, const std::map<std::string, FstLabel>& gold_e1,
                const std::map<std::string, FstLabel>& gold_e2, const ItaThresholds& thresholds) {
    int count = 0;
    for (const auto& [image_id, ita] : ita_by_image) {
        if (std::isnan(ita)) continue;
        auto e1 = gold_e1.find(image_id);
        auto e2 = gold_e2.find(image_id);
        if (e1 == gold_e1.end() || e2 == gold_e2.end()) continue;
        if (e1->second == e2->second && e1->second == ita_to_fst(ita, thresholds)) ++count;
    }
    return count;
}

CalibrationResult calibrate_thresholds(const std::map<std::string, double>& ita_by_image,
                                       const std::map<std::string, FstLabel>& gold_e1,
                                       const std::map<std::string, FstLabel>& gold_e2) {
    // ITA values grouped by expert-1 type, index 1..6.
    std::array<std::vector<double>, kLabelCount> by_type;
    for (const auto& [image_id, label] : gold_e1) {
        if (!is_applicable(label)) continue;
        auto it = ita_by_image.find(image_id);
        if (it == ita_by_image.end() || std::isnan(it->second)) continue;
        by_type[index_of(label)].push_back(it->second);
    }
    for (std::size_t k = 1; k <= 6; ++k) {
        if (by_type[k].empty()) {
            throw Error(ErrorCode::CalibrationUnderdetermined,
                        "no ITA values for type " + std::string(to_string(label_at(k))));
        }
    }

    std::array<double, 5> cuts{};
    for (std::size_t k = 1; k <= 5; ++k) {
        cuts[k - 1] = (quantile(by_type[k], 0.25) + quantile(by_type[k + 1], 0.75)) / 2.0;
    }

    CalibrationResult result;
    result.initial = ItaThresholds::from_values(cuts);
    result.initial_concordance = concordance(ita_by_image, gold_e1, gold_e2, result.initial);

    for (std::size_t t = 0; t < cuts.size(); ++t) {
        const double base = cuts[t];
        int best_offset = 0;
        int best = -1;
        for (int offset = -5; offset <= 5; ++offset) {
            auto trial = cuts;
            trial[t] = base + offset;
            const int score = concordance(ita_by_image, gold_e1, gold_e2, ItaThresholds::from_values(trial));
            const bool better = score > best ||
                                (score == best && (std::abs(offset) < std::abs(best_offset) ||
                                                   (std::abs(offset) == std::abs(best_offset) && offset < best_offset)));
            if (better) {
                best = score;
                best_offset = offset;
            }
        }
        cuts[t] = base + best_offset;
        result.offsets[t] = best_offset;
    }

    result.calibrated = ItaThresholds::from_values(cuts);
    result.final_concordance = concordance(ita_by_image, gold_e1, gold_e2, result.calibrated);
    if (!result.calibrated.ordered()) {
        throw Error(ErrorCode::CalibrationDegenerate, "calibrated thresholds are not strictly decreasing");
    }
    return result;
}

}  // namespace skintone::ita
