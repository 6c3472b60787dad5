#pragma once

#include <array>
#include <string>

#include "skintone/stats/correlation.hpp"

namespace skintone::stats {

/// 7x7 label cross-tabulation; rows are method A, columns method B, both in
/// the order NA, I..VI.
struct ConfusionMatrix {
    std::array<std::array<int, kLabelCount>, kLabelCount> counts{};
    int total = 0;

    int row_total(std::size_t row) const noexcept;
    int column_total(std::size_t column) const noexcept;
    int trace() const noexcept;
    /// Percent of the column total (0 for an empty column).
    double column_percent(std::size_t row, std::size_t column) const noexcept;
    double row_percent(std::size_t row, std::size_t column) const noexcept;
};

/// Throws EmptyInput when there are no pairs.
ConfusionMatrix confusion_matrix(const LabelVectorPair& pairs);

/// Fraction of NA-free pairs whose labels differ by at most k. Throws
/// NoApplicablePairs.
double within_k_agreement(const LabelVectorPair& pairs, int k);

/// `a\b,NA,I,...,VI` with counts, one row per A label.
std::string confusion_csv(const ConfusionMatrix& matrix);

}  // namespace skintone::stats
