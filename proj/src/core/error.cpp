#include "skintone/core/error.hpp"

namespace skintone {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidInput: return "InvalidInput";
        case ErrorCode::Storage: return "Storage";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::ManifestParse: return "ManifestParseError";
        case ErrorCode::MissingImageFile: return "MissingImageFile";
        case ErrorCode::UnknownImage: return "UnknownImage";
        case ErrorCode::DuplicateImage: return "DuplicateImage";
        case ErrorCode::DuplicateAnnotation: return "DuplicateAnnotation";
        case ErrorCode::ImageNotOpen: return "ImageNotOpen";
        case ErrorCode::NotReviewable: return "NotReviewable";
        case ErrorCode::PermissionDenied: return "PermissionDenied";
        case ErrorCode::NotSettled: return "NotSettled";
        case ErrorCode::NoQualifiedAnnotations: return "NoQualifiedAnnotations";
        case ErrorCode::ScoringDisqualified: return "ScoringDisqualified";
        case ErrorCode::NoSkinDetected: return "NoSkinDetected";
        case ErrorCode::CalibrationUnderdetermined: return "CalibrationUnderdetermined";
        case ErrorCode::CalibrationDegenerate: return "CalibrationDegenerate";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::InvalidRho: return "InvalidRho";
        case ErrorCode::SampleTooSmall: return "SampleTooSmall";
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::NoApplicablePairs: return "NoApplicablePairs";
        case ErrorCode::PoolTooSmall: return "PoolTooSmall";
        case ErrorCode::UnknownMethod: return "UnknownMethod";
        case ErrorCode::MissingLabel: return "MissingLabel";
        case ErrorCode::Unauthenticated: return "Unauthenticated";
        case ErrorCode::NoWork: return "NoWork";
        case ErrorCode::NotFound: return "NotFound";
    }
    return "Unknown";
}

}  // namespace skintone
