#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace skintone {

/// Estimated Fitzpatrick skin type, plus the "not applicable" answer.
///
/// The underlying value doubles as a dense index: NotApplicable is 0 and
/// types I..VI are 1..6, which is also their numeric projection.
enum class FstLabel : std::uint8_t {
    NotApplicable = 0,
    I = 1,
    II = 2,
    III = 3,
    IV = 4,
    V = 5,
    VI = 6,
};

inline constexpr std::size_t kLabelCount = 7;

/// NA first, then I..VI. Matches the row/column order of confusion matrices.
inline constexpr std::array<FstLabel, kLabelCount> kAllLabels{
    FstLabel::NotApplicable, FstLabel::I,  FstLabel::II, FstLabel::III,
    FstLabel::IV,            FstLabel::V,  FstLabel::VI,
};

constexpr std::size_t index_of(FstLabel label) noexcept {
    return static_cast<std::size_t>(label);
}

constexpr FstLabel label_at(std::size_t index) noexcept {
    return static_cast<FstLabel>(index);
}

constexpr bool is_applicable(FstLabel label) noexcept {
    return label != FstLabel::NotApplicable;
}

/// 1..6 for I..VI; nullopt for NotApplicable.
constexpr std::optional<int> numeric(FstLabel label) noexcept {
    if (!is_applicable(label)) return std::nullopt;
    return static_cast<int>(label);
}

/// Inverse of numeric(); nullopt outside 1..6.
constexpr std::optional<FstLabel> from_numeric(int value) noexcept {
    if (value < 1 || value > 6) return std::nullopt;
    return static_cast<FstLabel>(value);
}

/// "I".."VI" or "NA".
std::string_view to_string(FstLabel label) noexcept;

/// Accepts roman numerals, digits 1..6, "NA" and "N/A" (case-insensitive).
std::optional<FstLabel> parse_label(std::string_view text) noexcept;

}  // namespace skintone
