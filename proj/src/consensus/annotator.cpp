#include "skintone/consensus/annotator.hpp"

#include <algorithm>

#include "skintone/core/error.hpp"

namespace skintone::consensus {

namespace {

double match_fraction(const std::deque<bool>& window) {
    if (window.empty()) return 1.0;
    const auto matches = std::count(window.begin(), window.end(), true);
    return static_cast<double>(matches) / static_cast<double>(window.size());
}

// matches/len >= threshold without trusting the double division at the boundary.
bool meets(const std::deque<bool>& window, double threshold) {
    const auto matches = static_cast<double>(std::count(window.begin(), window.end(), true));
    return matches + 1e-9 >= threshold * static_cast<double>(window.size());
}

void push_bounded(std::deque<bool>& window, bool bit, int capacity) {
    window.push_back(bit);
    while (window.size() > static_cast<std::size_t>(capacity)) window.pop_front();
}

}  // namespace

double AnnotatorProfile::windowed_agreement() const noexcept { return match_fraction(score_window); }

QualificationState score_and_requalify(AnnotatorProfile& profile, bool matched, bool against_gold,
                                       const ProtocolConfig& config) {
    if (profile.state == QualificationState::Disqualified && !config.allow_requalification) {
        throw Error(ErrorCode::ScoringDisqualified, "annotator '" + profile.annotator_id + "' is disqualified");
    }

    push_bounded(profile.score_window, matched, config.qual_window);
    ++profile.scored_total;
    if (against_gold) {
        push_bounded(profile.gold_window, matched, config.qual_window);
        ++profile.gold_scored;
    }
    profile.weight = config.weights_from_gold_only ? match_fraction(profile.gold_window)
                                                   : match_fraction(profile.score_window);

    const bool passing = meets(profile.score_window, config.qual_min_agreement);
    switch (profile.state) {
        case QualificationState::NonQualified:
        case QualificationState::Disqualified:
            if (passing && profile.scored_total >= config.qual_min_scored) {
                profile.state = QualificationState::Qualified;
            }
            break;
        case QualificationState::Qualified:
            if (!passing) profile.state = QualificationState::Disqualified;
            break;
    }
    return profile.state;
}

}  // namespace skintone::consensus
