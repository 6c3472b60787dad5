#pragma once

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "skintone/core/fst_label.hpp"

namespace skintone::stats {

using LabelMap = std::map<std::string, FstLabel>;

/// Per-image label pairs from two methods.
struct LabelVectorPair {
    std::vector<std::pair<FstLabel, FstLabel>> pairs;

    /// Pairs where neither side is NotApplicable.
    std::size_t n_effective() const noexcept;
};

/// Pairs over the images both maps label, in image-id order.
LabelVectorPair pair_labels(const LabelMap& a, const LabelMap& b);

/// Sample Pearson correlation. Throws DegenerateInput when fewer than three
/// values or either side is constant.
double pearson(std::span<const double> x, std::span<const double> y);

/// Pearson over the numeric projections, NA pairs dropped.
double pearson(const LabelVectorPair& pairs);

}  // namespace skintone::stats
