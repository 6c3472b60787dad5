#include "skintone/stats/agreement.hpp"

#include <cstdlib>

#include "skintone/core/error.hpp"

namespace skintone::stats {

int ConfusionMatrix::row_total(std::size_t row) const noexcept {
    int sum = 0;
    for (int c : counts[row]) sum += c;
    return sum;
}

int ConfusionMatrix::column_total(std::size_t column) const noexcept {
    int sum = 0;
    for (const auto& row : counts) sum += row[column];
    return sum;
}

int ConfusionMatrix::trace() const noexcept {
    int sum = 0;
    for (std::size_t i = 0; i < kLabelCount; ++i) sum += counts[i][i];
    return sum;
}

double ConfusionMatrix::column_percent(std::size_t row, std::size_t column) const noexcept {
    const int total_col = column_total(column);
    return total_col ? 100.0 * counts[row][column] / total_col : 0.0;
}

double ConfusionMatrix::row_percent(std::size_t row, std::size_t column) const noexcept {
    const int total_row = row_total(row);
    return total_row ? 100.0 * counts[row][column] / total_row : 0.0;
}

ConfusionMatrix confusion_matrix(const LabelVectorPair& pairs) {
    if (pairs.pairs.empty()) throw Error(ErrorCode::EmptyInput, "confusion matrix of no pairs");
    ConfusionMatrix m;
    for (const auto& [a, b] : pairs.pairs) {
        ++m.counts[index_of(a)][index_of(b)];
        ++m.total;
    }
    return m;
}

double within_k_agreement(const LabelVectorPair& pairs, int k) {
    std::size_t applicable = 0;
    std::size_t within = 0;
    for (const auto& [a, b] : pairs.pairs) {
        const auto na = numeric(a);
        const auto nb = numeric(b);
        if (!na || !nb) continue;
        ++applicable;
        if (std::abs(*na - *nb) <= k) ++within;
    }
    if (applicable == 0) throw Error(ErrorCode::NoApplicablePairs, "no pairs with both labels applicable");
    return static_cast<double>(within) / static_cast<double>(applicable);
}

std::string confusion_csv(const ConfusionMatrix& matrix) {
    std::string out = "a\\b";
    for (auto label : kAllLabels) out += "," + std::string(to_string(label));
    out += '\n';
    for (std::size_t r = 0; r < kLabelCount; ++r) {
        out += to_string(label_at(r));
        for (std::size_t c = 0; c < kLabelCount; ++c) out += "," + std::to_string(matrix.counts[r][c]);
        out += '\n';
    }
    return out;
}

}  // namespace skintone::stats
