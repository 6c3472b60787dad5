#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "skintone/core/records.hpp"

namespace skintone {

// Input events carry an external action; derived events record consequences
// the protocol computed from an input event. Replay recomputes the derived
// events and checks them against the log.

struct DatasetIngested {
    std::vector<ImageRecord> images;
    bool operator==(const DatasetIngested&) const = default;
};

struct AnnotationSubmitted {
    Annotation annotation;
    bool operator==(const AnnotationSubmitted&) const = default;
};

struct FlagFiled {
    FailureReport report;
    bool operator==(const FlagFiled&) const = default;
};

struct Adjudicated {
    std::string image_id;
    std::string expert_id;
    FstLabel label = FstLabel::NotApplicable;
    bool operator==(const Adjudicated&) const = default;
};

struct ConsensusSettled {
    std::string image_id;
    FstLabel label = FstLabel::NotApplicable;
    bool operator==(const ConsensusSettled&) const = default;
};

struct ImageHalted {
    std::string image_id;
    bool operator==(const ImageHalted&) const = default;
};

struct ImageEscalated {
    std::string image_id;
    bool operator==(const ImageEscalated&) const = default;
};

struct QualificationChanged {
    std::string annotator_id;
    QualificationState from = QualificationState::NonQualified;
    QualificationState to = QualificationState::NonQualified;
    bool operator==(const QualificationChanged&) const = default;
};

using EventPayload = std::variant<DatasetIngested, AnnotationSubmitted, FlagFiled, ConsensusSettled,
                                  ImageHalted, ImageEscalated, Adjudicated, QualificationChanged>;

struct Event {
    Seq seq = 0;
    EventPayload payload;
    bool operator==(const Event&) const = default;
};

bool is_derived(const EventPayload& payload) noexcept;
std::string_view event_type(const EventPayload& payload) noexcept;

nlohmann::json to_json(const Event& event);
Event event_from_json(const nlohmann::json& doc);

/// Single-line JSON encoding used by the event log.
std::string encode_event(const Event& event);
Event decode_event(std::string_view line);

nlohmann::json to_json(const ImageRecord& record);
ImageRecord image_record_from_json(const nlohmann::json& doc);

}  // namespace skintone
