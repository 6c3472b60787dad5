#include "skintone/core/records.hpp"

#include <array>

namespace skintone {

std::optional<FstLabel> ImageRecord::gold_label(std::string_view expert_id) const {
    for (const auto& [expert, label] : gold_labels) {
        if (expert == expert_id) return label;
    }
    return std::nullopt;
}

std::optional<FstLabel> ImageRecord::reference_gold() const {
    if (gold_labels.empty()) return std::nullopt;
    return gold_labels.front().second;
}

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view text) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == text) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, 2> kFailureKinds{"IncorrectLabel",
                                                        "InappropriateOrIrrelevant"};
constexpr std::array<std::string_view, 5> kStatuses{"Open", "Settled", "Halted", "Escalated",
                                                    "Adjudicated"};
constexpr std::array<std::string_view, 3> kQualification{"NonQualified", "Qualified",
                                                         "Disqualified"};

}  // namespace

std::string_view to_string(FailureKind kind) noexcept {
    return kFailureKinds[static_cast<std::size_t>(kind)];
}
std::string_view to_string(ImageStatus status) noexcept {
    return kStatuses[static_cast<std::size_t>(status)];
}
std::string_view to_string(QualificationState state) noexcept {
    return kQualification[static_cast<std::size_t>(state)];
}

std::optional<FailureKind> parse_failure_kind(std::string_view text) noexcept {
    return lookup<FailureKind>(kFailureKinds, text);
}
std::optional<ImageStatus> parse_image_status(std::string_view text) noexcept {
    return lookup<ImageStatus>(kStatuses, text);
}
std::optional<QualificationState> parse_qualification_state(std::string_view text) noexcept {
    return lookup<QualificationState>(kQualification, text);
}

}  // namespace skintone

namespace skintone {

namespace {
constexpr std::array<std::string_view, 3> kRoles{"Annotator", "Expert", "Admin"};
}

std::string_view to_string(Role role) noexcept { return kRoles[static_cast<std::size_t>(role)]; }

std::optional<Role> parse_role(std::string_view text) noexcept {
    return lookup<Role>(kRoles, text);
}

}  // namespace skintone
