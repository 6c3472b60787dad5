#include "skintone/consensus/protocol.hpp"

#include <algorithm>

#include "skintone/core/error.hpp"

namespace skintone::consensus {

void ProtocolConfig::validate() const {
    const bool counts_ok = lead_margin > 0 && max_annotations > 0 && qual_min_scored > 0 &&
                           qual_window > 0 && incorrect_halt > 0 && inappropriate_halt > 0;
    if (!counts_ok) throw Error(ErrorCode::InvalidInput, "protocol counts must be positive");
    if (!(qual_min_agreement >= 0.0 && qual_min_agreement <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "qual_min_agreement must lie in [0, 1]");
    }
}

nlohmann::json to_json(const ProtocolConfig& c) {
    return {{"lead_margin", c.lead_margin},
            {"max_annotations", c.max_annotations},
            {"qual_min_agreement", c.qual_min_agreement},
            {"qual_min_scored", c.qual_min_scored},
            {"qual_window", c.qual_window},
            {"incorrect_halt", c.incorrect_halt},
            {"inappropriate_halt", c.inappropriate_halt},
            {"raw_mode", c.raw_mode},
            {"allow_requalification", c.allow_requalification},
            {"weights_from_gold_only", c.weights_from_gold_only}};
}

ProtocolConfig protocol_config_from_json(const nlohmann::json& doc) {
    ProtocolConfig c;
    c.lead_margin = doc.value("lead_margin", c.lead_margin);
    c.max_annotations = doc.value("max_annotations", c.max_annotations);
    c.qual_min_agreement = doc.value("qual_min_agreement", c.qual_min_agreement);
    c.qual_min_scored = doc.value("qual_min_scored", c.qual_min_scored);
    c.qual_window = doc.value("qual_window", c.qual_window);
    c.incorrect_halt = doc.value("incorrect_halt", c.incorrect_halt);
    c.inappropriate_halt = doc.value("inappropriate_halt", c.inappropriate_halt);
    c.raw_mode = doc.value("raw_mode", c.raw_mode);
    c.allow_requalification = doc.value("allow_requalification", c.allow_requalification);
    c.weights_from_gold_only = doc.value("weights_from_gold_only", c.weights_from_gold_only);
    c.validate();
    return c;
}

ConsensusDecision check_consensus(const Tally& tally, const ProtocolConfig& config) {
    // Leader and runner-up over all seven categories.
    std::size_t leader = 0;
    for (std::size_t i = 1; i < kLabelCount; ++i) {
        if (tally.counts[i] > tally.counts[leader]) leader = i;
    }
    int runner_up = 0;
    bool tied = false;
    for (std::size_t i = 0; i < kLabelCount; ++i) {
        if (i == leader) continue;
        runner_up = std::max(runner_up, tally.counts[i]);
        if (tally.counts[i] == tally.counts[leader]) tied = true;
    }

    if (tally.counts[leader] - runner_up >= config.lead_margin) {
        return {ConsensusDecision::Kind::Consensus, label_at(leader)};
    }
    if (tally.total_qualified >= config.max_annotations) {
        if (tied) return {ConsensusDecision::Kind::TieAtCap, FstLabel::NotApplicable};
        return {ConsensusDecision::Kind::Consensus, label_at(leader)};
    }
    return {};
}

}  // namespace skintone::consensus
