#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "skintone/core/fst_label.hpp"

namespace skintone {

using Seq = std::uint64_t;

/// One image in a dataset. Gold labels keep manifest column order; the first
/// entry is the scoring reference.
struct ImageRecord {
    std::string image_id;
    std::string file_path;
    std::string source;
    std::vector<std::pair<std::string, FstLabel>> gold_labels;
    bool is_gold_seed = false;

    std::optional<FstLabel> gold_label(std::string_view expert_id) const;
    std::optional<FstLabel> reference_gold() const;

    bool operator==(const ImageRecord&) const = default;
};

struct Annotation {
    std::string annotation_id;
    std::string image_id;
    std::string annotator_id;
    FstLabel label = FstLabel::NotApplicable;
    Seq submitted_at = 0;
    bool qualified_at_submission = false;

    bool operator==(const Annotation&) const = default;
};

enum class FailureKind { IncorrectLabel, InappropriateOrIrrelevant };

struct FailureReport {
    std::string image_id;
    std::string annotator_id;
    FailureKind kind = FailureKind::IncorrectLabel;
    std::string text;

    bool operator==(const FailureReport&) const = default;
};

enum class ImageStatus { Open, Settled, Halted, Escalated, Adjudicated };

enum class QualificationState { NonQualified, Qualified, Disqualified };

std::string_view to_string(FailureKind kind) noexcept;
std::string_view to_string(ImageStatus status) noexcept;
std::string_view to_string(QualificationState state) noexcept;

std::optional<FailureKind> parse_failure_kind(std::string_view text) noexcept;
std::optional<ImageStatus> parse_image_status(std::string_view text) noexcept;
std::optional<QualificationState> parse_qualification_state(std::string_view text) noexcept;

}  // namespace skintone

namespace skintone {

enum class Role { Annotator, Expert, Admin };

std::string_view to_string(Role role) noexcept;
std::optional<Role> parse_role(std::string_view text) noexcept;

}  // namespace skintone
