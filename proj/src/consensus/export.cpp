#include "skintone/consensus/export.hpp"

#include <cstdio>

#include "skintone/consensus/metrics.hpp"
#include "skintone/core/csv.hpp"
#include "skintone/core/error.hpp"

namespace skintone::consensus {

namespace {

std::string fixed6(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.6f", value);
    return buffer;
}

}  // namespace

std::string consensus_csv(const PlatformState& state) {
    std::string out =
        "image_id,status,label,total_qualified,agreement,difficulty,incorrect_flags,inappropriate_flags\n";
    for (const auto& image_id : state.ingest_order) {
        const auto& c = state.images.at(image_id).consensus;
        std::string agreement;
        std::string difficulty;
        if (c.settled_label && c.tally.total_qualified > 0) {
            const auto metrics = compute_agreement_difficulty(state, image_id);
            agreement = fixed6(metrics.agreement);
            difficulty = fixed6(metrics.difficulty);
        }
        out += csv::join({image_id, std::string(to_string(c.status)),
                          c.settled_label ? std::string(to_string(*c.settled_label)) : std::string(),
                          std::to_string(c.tally.total_qualified), agreement, difficulty,
                          std::to_string(c.incorrect_flags), std::to_string(c.inappropriate_flags)});
        out += '\n';
    }
    return out;
}

std::string annotations_csv(const PlatformState& state) {
    std::string out = "image_id,annotator_id,label,seq,qualified\n";
    for (const auto& a : state.annotations) {
        out += csv::join({a.image_id, a.annotator_id, std::string(to_string(a.label)),
                          std::to_string(a.submitted_at), a.qualified_at_submission ? "true" : "false"});
        out += '\n';
    }
    return out;
}

}  // namespace skintone::consensus
