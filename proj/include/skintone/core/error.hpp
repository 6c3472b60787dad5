#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace skintone {

// Stable identifiers; the HTTP layer exposes these verbatim as `error.code`.
enum class ErrorCode {
    InvalidInput,
    Storage,
    CorruptLog,
    ManifestParse,
    MissingImageFile,
    UnknownImage,
    DuplicateImage,
    DuplicateAnnotation,
    ImageNotOpen,
    NotReviewable,
    PermissionDenied,
    NotSettled,
    NoQualifiedAnnotations,
    ScoringDisqualified,
    NoSkinDetected,
    CalibrationUnderdetermined,
    CalibrationDegenerate,
    DegenerateInput,
    InvalidRho,
    SampleTooSmall,
    EmptyInput,
    NoApplicablePairs,
    PoolTooSmall,
    UnknownMethod,
    MissingLabel,
    Unauthenticated,
    NoWork,
    NotFound,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace skintone
