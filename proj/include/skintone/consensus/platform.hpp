#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "skintone/consensus/annotator.hpp"
#include "skintone/consensus/protocol.hpp"
#include "skintone/core/event_log.hpp"

namespace skintone::consensus {

struct ConsensusState {
    std::string image_id;
    Tally tally;
    ImageStatus status = ImageStatus::Open;
    std::optional<FstLabel> settled_label;
    int incorrect_flags = 0;
    int inappropriate_flags = 0;

    bool operator==(const ConsensusState&) const = default;
};

struct ImageState {
    ImageRecord record;
    ConsensusState consensus;
    /// Indices into PlatformState::annotations, in submission order.
    std::vector<std::size_t> annotations;
    std::set<std::string> annotators;
    /// Expert who adjudicated, when status is Adjudicated.
    std::optional<std::string> adjudicated_by;

    bool operator==(const ImageState&) const = default;
};

/// Everything the event log determines. Equality is exact: replaying the
/// same events under the same config yields an identical value.
struct PlatformState {
    ProtocolConfig config;
    std::map<std::string, ImageState> images;
    std::vector<std::string> ingest_order;
    std::map<std::string, AnnotatorProfile> annotators;
    std::vector<Annotation> annotations;
    /// Parallel to annotations: has this annotation been scored yet.
    std::vector<bool> scored;
    std::vector<FailureReport> flags;
    Seq last_seq = 0;

    const ImageState& image(const std::string& image_id) const;
    const AnnotatorProfile* annotator(const std::string& annotator_id) const;
    QualificationState qualification(const std::string& annotator_id) const;
    /// Whether an annotation contributes to its image's tally.
    bool counted(const Annotation& annotation) const noexcept;

    bool operator==(const PlatformState&) const = default;
};

/// Throws the domain error (UnknownImage, DuplicateAnnotation, ImageNotOpen,
/// NotReviewable, DuplicateImage, ...) an input event would trigger, without
/// touching the state.
void validate_input(const PlatformState& state, const EventPayload& payload);

/// Applies an input event and returns the derived events it causes, in the
/// order they must appear in the log. Throws on invalid input.
std::vector<EventPayload> apply_input(PlatformState& state, const Event& event);

struct ReplayResult {
    PlatformState state;
    /// Derived events implied by the final input event but missing from the
    /// stream (a crash between the input and its consequences).
    std::vector<EventPayload> pending_derived;
};

/// Rebuilds state from an event stream. Throws CorruptLog on a seq gap,
/// an invalid input event, or a derived event that disagrees with the
/// recomputed consequences.
ReplayResult replay_detailed(std::span<const Event> events, const ProtocolConfig& config);

PlatformState replay(std::span<const Event> events, const ProtocolConfig& config);

struct SubmissionOutcome {
    bool accepted = false;
    std::string annotation_id;
    Seq seq = 0;
    ImageStatus new_status = ImageStatus::Open;
    QualificationState qualification_state = QualificationState::NonQualified;
};

struct DatasetSummary {
    std::size_t n_images = 0;
    std::size_t n_gold = 0;
};

/// The protocol engine: validates commands, writes them to the log and
/// applies them. Single writer; callers serialize access.
class Platform {
public:
    explicit Platform(ProtocolConfig config = {});
    /// Replays an existing log, appending any derived events it is missing.
    Platform(ProtocolConfig config, EventLog log);

    DatasetSummary ingest(std::vector<ImageRecord> images);
    SubmissionOutcome submit_annotation(const std::string& annotator_id, const std::string& image_id,
                                        FstLabel label);
    ImageStatus file_failure_report(FailureReport report);
    ConsensusState adjudicate(const std::string& image_id, const std::string& expert_id, FstLabel label,
                              Role role);

    const PlatformState& state() const noexcept { return state_; }
    const EventLog& log() const noexcept { return log_; }

private:
    Seq commit(EventPayload input);

    PlatformState state_;
    EventLog log_;
};

}  // namespace skintone::consensus
