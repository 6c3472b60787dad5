#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "skintone/consensus/platform.hpp"

namespace skintone::consensus {

/// One stratification cell: images whose first label is `stratum`, split by
/// whether the two labels disagree by more than the threshold.
struct ReviewCell {
    FstLabel stratum = FstLabel::NotApplicable;
    bool discrepant = false;
    std::vector<std::string> members;
    std::vector<std::string> selected;
    /// Fewer members than requested; all of them were taken.
    bool short_stratum = false;
};

struct ReviewSelection {
    std::vector<std::string> selected;
    std::vector<std::string> discrepant;
    std::vector<ReviewCell> cells;
    bool any_short = false;
};

/// Two labels are discrepant when they differ by more than `threshold` units
/// or when exactly one of them is NotApplicable.
bool is_discrepant(FstLabel a, FstLabel b, int threshold) noexcept;

/// Stratified random review sample: `n_per_stratum` images per (label_a,
/// discrepant) cell, drawn without replacement under `seed`. Candidates are
/// the keys of labels_a; each must also appear in labels_b (MissingLabel).
ReviewSelection select_review_set(const std::map<std::string, FstLabel>& labels_a,
                                  const std::map<std::string, FstLabel>& labels_b, std::size_t n_per_stratum,
                                  int discrepancy_threshold, std::uint64_t seed);

struct ReviewItem {
    std::string image_id;
    std::string file_path;
    /// "tie" for escalated images, "flagged" for halted ones.
    std::string reason;
};

/// Images awaiting expert adjudication, in ingest order. Carries no tally
/// information.
std::vector<ReviewItem> review_queue(const PlatformState& state);

}  // namespace skintone::consensus
