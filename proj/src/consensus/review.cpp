#include "skintone/consensus/review.hpp"

#include <algorithm>
#include <cstdlib>
#include <random>

#include "skintone/core/error.hpp"

namespace skintone::consensus {

bool is_discrepant(FstLabel a, FstLabel b, int threshold) noexcept {
    const auto na = numeric(a);
    const auto nb = numeric(b);
    if (!na && !nb) return false;
    if (!na || !nb) return true;
    return std::abs(*na - *nb) > threshold;
}

ReviewSelection select_review_set(const std::map<std::string, FstLabel>& labels_a,
                                  const std::map<std::string, FstLabel>& labels_b, std::size_t n_per_stratum,
                                  int discrepancy_threshold, std::uint64_t seed) {
    std::vector<ReviewCell> cells(kLabelCount * 2);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        cells[i].stratum = label_at(i / 2);
        cells[i].discrepant = (i % 2) == 1;
    }

    ReviewSelection selection;
    for (const auto& [image_id, a] : labels_a) {
        auto it = labels_b.find(image_id);
        if (it == labels_b.end()) throw Error(ErrorCode::MissingLabel, "no second label for '" + image_id + "'");
        const bool discrepant = is_discrepant(a, it->second, discrepancy_threshold);
        cells[index_of(a) * 2 + (discrepant ? 1 : 0)].members.push_back(image_id);
        if (discrepant) selection.discrepant.push_back(image_id);
    }

    std::mt19937_64 rng(seed);
    for (auto& cell : cells) {
        auto pool = cell.members;
        const auto take = std::min(n_per_stratum, pool.size());
        for (std::size_t i = 0; i < take; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
            std::swap(pool[i], pool[pick(rng)]);
        }
        pool.resize(take);
        std::sort(pool.begin(), pool.end());
        cell.selected = std::move(pool);
        cell.short_stratum = !cell.members.empty() && cell.members.size() < n_per_stratum;
        selection.any_short = selection.any_short || cell.short_stratum;
        selection.selected.insert(selection.selected.end(), cell.selected.begin(), cell.selected.end());
    }
    std::sort(selection.selected.begin(), selection.selected.end());
    selection.cells = std::move(cells);
    return selection;
}

std::vector<ReviewItem> review_queue(const PlatformState& state) {
    std::vector<ReviewItem> items;
    for (const auto& image_id : state.ingest_order) {
        const auto& image = state.images.at(image_id);
        const auto status = image.consensus.status;
        if (status == ImageStatus::Escalated) {
            items.push_back({image_id, image.record.file_path, "tie"});
        } else if (status == ImageStatus::Halted) {
            items.push_back({image_id, image.record.file_path, "flagged"});
        }
    }
    return items;
}

}  // namespace skintone::consensus
