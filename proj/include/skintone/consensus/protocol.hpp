#pragma once

#include <array>

#include <json.hpp>

#include "skintone/core/fst_label.hpp"

namespace skintone::consensus {

/// Tunable parameters of the dynamic consensus protocol. Defaults are the
/// deployed values: settle on a lead of 3 or by majority at 20 qualified
/// annotations, qualify at >= 40% agreement after 25 scored images over a
/// sliding window of 50, halt after 2 "incorrect" or 1 "inappropriate" flag.
///
/// Qualification compares inclusively (agreement >= qual_min_agreement);
/// disqualification triggers strictly below it.
struct ProtocolConfig {
    int lead_margin = 3;
    int max_annotations = 20;
    double qual_min_agreement = 0.40;
    int qual_min_scored = 25;
    int qual_window = 50;
    int incorrect_halt = 2;
    int inappropriate_halt = 1;
    /// Count every annotation in tallies regardless of qualification.
    bool raw_mode = false;
    /// Let a Disqualified annotator qualify again (terminal otherwise).
    bool allow_requalification = false;
    /// Derive agreement weights from gold-scored annotations only.
    bool weights_from_gold_only = false;

    /// Throws InvalidInput when a count is non-positive or the fraction is
    /// outside [0, 1].
    void validate() const;

    bool operator==(const ProtocolConfig&) const = default;
};

nlohmann::json to_json(const ProtocolConfig& config);
/// Missing keys keep their defaults.
ProtocolConfig protocol_config_from_json(const nlohmann::json& doc);

struct Tally {
    std::array<int, kLabelCount> counts{};
    int total_qualified = 0;
    int total_all = 0;

    int count(FstLabel label) const noexcept { return counts[index_of(label)]; }
    void add_counted(FstLabel label) noexcept {
        ++counts[index_of(label)];
        ++total_qualified;
    }

    bool operator==(const Tally&) const = default;
};

struct ConsensusDecision {
    enum class Kind { NoConsensus, Consensus, TieAtCap };
    Kind kind = Kind::NoConsensus;
    FstLabel label = FstLabel::NotApplicable;  // meaningful for Consensus only

    bool operator==(const ConsensusDecision&) const = default;
};

/// Lead rule first, then the annotation cap (majority, or TieAtCap).
ConsensusDecision check_consensus(const Tally& tally, const ProtocolConfig& config);

}  // namespace skintone::consensus
