#include "skintone/service/routing.hpp"

namespace skintone::service {

std::string_view to_string(AssignmentReason reason) noexcept {
    return reason == AssignmentReason::GoldProbe ? "GoldProbe" : "LeastAnnotated";
}

std::optional<TaskAssignment> next_task(const consensus::PlatformState& state, const std::string& annotator_id,
                                        double gold_probe_rate, std::mt19937_64& rng) {
    // The coin is always drawn so the stream advances identically whether or
    // not a gold image happens to be eligible.
    const bool probe = gold_probe_rate > 0.0 && std::uniform_real_distribution<double>(0.0, 1.0)(rng) < gold_probe_rate;

    const consensus::ImageState* best = nullptr;
    const consensus::ImageState* best_gold = nullptr;
    auto better = [](const consensus::ImageState* current, const consensus::ImageState& candidate) {
        return current == nullptr ||
               candidate.consensus.tally.total_qualified < current->consensus.tally.total_qualified;
    };
    // std::map iterates in image-id order, so strict comparison keeps the smallest id on ties.
    for (const auto& [image_id, image] : state.images) {
        if (image.consensus.status != ImageStatus::Open) continue;
        if (image.annotators.count(annotator_id) != 0) continue;
        if (better(best, image)) best = &image;
        if (image.record.is_gold_seed && better(best_gold, image)) best_gold = &image;
    }
    if (best == nullptr) return std::nullopt;

    TaskAssignment task;
    task.assigned_to = annotator_id;
    const auto* chosen = best;
    if (probe && best_gold != nullptr) {
        chosen = best_gold;
        task.reason = AssignmentReason::GoldProbe;
    }
    task.image_id = chosen->record.image_id;
    task.file_path = chosen->record.file_path;
    return task;
}

}  // namespace skintone::service
