#pragma once

#include <string>

#include "skintone/consensus/platform.hpp"

namespace skintone::consensus {

struct AgreementDifficulty {
    double agreement = 0.0;
    double difficulty = 0.0;
};

/// Weighted share of counted annotations that carry (A) or miss (D) the
/// settled label. Weights are each annotator's current agreement weight;
/// if every weight is zero the fractions fall back to plain counts.
/// Throws NotSettled or NoQualifiedAnnotations.
AgreementDifficulty compute_agreement_difficulty(const PlatformState& state, const std::string& image_id);

/// Same rule over explicit (weight, matched) pairs.
AgreementDifficulty weighted_agreement(const std::vector<std::pair<double, bool>>& weighted_matches);

}  // namespace skintone::consensus
