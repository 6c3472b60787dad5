#pragma once

#include <array>
#include <map>
#include <span>
#include <string>

#include "skintone/ita/ita.hpp"

namespace skintone::ita {

/// Linear-interpolation quantile between order statistics (q in [0, 1]).
double quantile(std::span<const double> values, double q);

/// Number of images where expert 1, expert 2 and the ITA label all agree.
/// Images missing from any of the three maps do not count.
int concordance(const std::map<std::string, double>& ita_by_image,
                const std::map<std::string, FstLabel>& gold_e1, const std::map<std::string, FstLabel>& gold_e2,
                const ItaThresholds& thresholds);

struct CalibrationResult {
    ItaThresholds initial;
    ItaThresholds calibrated;
    /// Chosen integer offset per threshold, t12 first.
    std::array<int, 5> offsets{};
    int initial_concordance = 0;
    int final_concordance = 0;
};

/// Fits ITA cut points to expert labels.
///
/// Each cut between type k and k+1 starts at the mean of the first quartile
/// of type-k ITA values and the third quartile of type-(k+1) values (types
/// taken from expert 1; NotApplicable entries ignored). Then, one cut at a
/// time from t12 to t56, integer offsets -5..+5 degrees are tried and the
/// one with the highest three-way concordance is kept, applied before the
/// next cut is scanned. Ties prefer the smaller |offset|, then the smaller
/// signed offset.
///
/// Throws CalibrationUnderdetermined if a type has no ITA value, and
/// CalibrationDegenerate if the result is not strictly decreasing.
CalibrationResult calibrate_thresholds(const std::map<std::string, double>& ita_by_image,
                                       const std::map<std::string, FstLabel>& gold_e1,
                                       const std::map<std::string, FstLabel>& gold_e2);

}  // namespace skintone::ita
