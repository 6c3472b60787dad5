#include "skintone/consensus/metrics.hpp"

#include "skintone/core/error.hpp"

namespace skintone::consensus {

AgreementDifficulty weighted_agreement(const std::vector<std::pair<double, bool>>& weighted_matches) {
    if (weighted_matches.empty()) throw Error(ErrorCode::NoQualifiedAnnotations, "no qualified annotations");
    double matching = 0.0;
    double missing = 0.0;
    for (const auto& [weight, matched] : weighted_matches) (matched ? matching : missing) += weight;
    if (matching + missing <= 0.0) {
        matching = missing = 0.0;
        for (const auto& [weight, matched] : weighted_matches) (matched ? matching : missing) += 1.0;
    }
    const double total = matching + missing;
    return {matching / total, missing / total};
}

AgreementDifficulty compute_agreement_difficulty(const PlatformState& state, const std::string& image_id) {
    const auto& image = state.image(image_id);
    if (!image.consensus.settled_label) {
        throw Error(ErrorCode::NotSettled, "image '" + image_id + "' has no settled label");
    }
    const auto label = *image.consensus.settled_label;

    std::vector<std::pair<double, bool>> weighted;
    for (auto index : image.annotations) {
        const auto& annotation = state.annotations[index];
        if (!state.counted(annotation)) continue;
        const auto* profile = state.annotator(annotation.annotator_id);
        weighted.emplace_back(profile ? profile->weight : 1.0, annotation.label == label);
    }
    return weighted_agreement(weighted);
}

}  // namespace skintone::consensus
