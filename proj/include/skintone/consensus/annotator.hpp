#pragma once

#include <deque>
#include <string>

#include "skintone/consensus/protocol.hpp"
#include "skintone/core/records.hpp"

namespace skintone::consensus {

/// Qualification record for one crowd annotator.
///
/// `score_window` holds the most recent match bits (oldest first), capped at
/// the configured window length. `gold_window` is the same stream restricted
/// to gold-scored annotations and only feeds the weight when
/// `weights_from_gold_only` is set.
struct AnnotatorProfile {
    std::string annotator_id;
    QualificationState state = QualificationState::NonQualified;
    std::deque<bool> score_window;
    int scored_total = 0;
    std::deque<bool> gold_window;
    int gold_scored = 0;
    double weight = 1.0;

    double windowed_agreement() const noexcept;

    bool operator==(const AnnotatorProfile&) const = default;
};

/// Pushes one match bit, trims the window, recomputes the weight and applies
/// the qualification transitions. Returns the new state.
///
/// Weight is the window's match fraction; an annotator with an empty window
/// has weight 1. Throws ScoringDisqualified for a Disqualified annotator
/// unless requalification is allowed.
QualificationState score_and_requalify(AnnotatorProfile& profile, bool matched, bool against_gold,
                                       const ProtocolConfig& config);

}  // namespace skintone::consensus
