#pragma once

#include <optional>
#include <random>
#include <string>

#include "skintone/consensus/platform.hpp"

namespace skintone::service {

enum class AssignmentReason { LeastAnnotated, GoldProbe };

std::string_view to_string(AssignmentReason reason) noexcept;

struct TaskAssignment {
    std::string image_id;
    std::string file_path;
    std::string assigned_to;
    AssignmentReason reason = AssignmentReason::LeastAnnotated;
};

/// Picks the next image for an annotator among Open images they have not
/// labeled: fewest counted annotations first, ties broken by image id. With
/// probability `gold_probe_rate` an eligible gold image is preferred instead,
/// chosen by the same ordering. Returns nullopt when nothing is eligible.
std::optional<TaskAssignment> next_task(const consensus::PlatformState& state, const std::string& annotator_id,
                                        double gold_probe_rate, std::mt19937_64& rng);

}  // namespace skintone::service
