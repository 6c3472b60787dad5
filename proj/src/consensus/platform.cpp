#include "skintone/consensus/platform.hpp"

#include <deque>

#include "skintone/core/error.hpp"

namespace skintone::consensus {

namespace {

ImageState& image_mut(PlatformState& state, const std::string& image_id) {
    auto it = state.images.find(image_id);
    if (it == state.images.end()) throw Error(ErrorCode::UnknownImage, "unknown image '" + image_id + "'");
    return it->second;
}

AnnotatorProfile& profile_mut(PlatformState& state, const std::string& annotator_id) {
    auto [it, inserted] = state.annotators.try_emplace(annotator_id);
    if (inserted) it->second.annotator_id = annotator_id;
    return it->second;
}

// Scores one annotation against a reference label; emits a
// QualificationChanged when the annotator's state moves.
void score_annotation(PlatformState& state, std::size_t index, FstLabel reference, bool against_gold,
                      std::vector<EventPayload>& derived) {
    state.scored[index] = true;
    const auto& annotation = state.annotations[index];
    auto& profile = profile_mut(state, annotation.annotator_id);
    if (profile.state == QualificationState::Disqualified && !state.config.allow_requalification) return;

    const auto before = profile.state;
    const auto after = score_and_requalify(profile, annotation.label == reference, against_gold, state.config);
    if (after != before) derived.emplace_back(QualificationChanged{profile.annotator_id, before, after});
}

void score_pending(PlatformState& state, ImageState& image, FstLabel reference,
                   std::vector<EventPayload>& derived) {
    for (auto index : image.annotations) {
        if (!state.scored[index]) score_annotation(state, index, reference, false, derived);
    }
}

void apply(PlatformState& state, const DatasetIngested& e, std::vector<EventPayload>&) {
    for (const auto& record : e.images) {
        ImageState image;
        image.record = record;
        image.record.is_gold_seed = !record.gold_labels.empty();
        image.consensus.image_id = record.image_id;
        state.ingest_order.push_back(record.image_id);
        state.images.emplace(record.image_id, std::move(image));
    }
}

void apply(PlatformState& state, const AnnotationSubmitted& e, std::vector<EventPayload>& derived) {
    const auto& annotation = e.annotation;
    auto& image = image_mut(state, annotation.image_id);
    profile_mut(state, annotation.annotator_id);

    const auto index = state.annotations.size();
    state.annotations.push_back(annotation);
    state.scored.push_back(false);
    image.annotations.push_back(index);
    image.annotators.insert(annotation.annotator_id);

    auto& consensus = image.consensus;
    ++consensus.tally.total_all;
    const bool counted = state.counted(annotation);
    if (counted) consensus.tally.add_counted(annotation.label);

    if (auto gold = image.record.reference_gold()) score_annotation(state, index, *gold, true, derived);

    if (!counted) return;
    const auto decision = check_consensus(consensus.tally, state.config);
    switch (decision.kind) {
        case ConsensusDecision::Kind::NoConsensus:
            break;
        case ConsensusDecision::Kind::Consensus:
            consensus.status = ImageStatus::Settled;
            consensus.settled_label = decision.label;
            derived.emplace_back(ConsensusSettled{image.record.image_id, decision.label});
            score_pending(state, image, decision.label, derived);
            break;
        case ConsensusDecision::Kind::TieAtCap:
            consensus.status = ImageStatus::Escalated;
            derived.emplace_back(ImageEscalated{image.record.image_id});
            break;
    }
}

void apply(PlatformState& state, const FlagFiled& e, std::vector<EventPayload>& derived) {
    auto& image = image_mut(state, e.report.image_id);
    auto& consensus = image.consensus;
    if (e.report.kind == FailureKind::IncorrectLabel) {
        ++consensus.incorrect_flags;
    } else {
        ++consensus.inappropriate_flags;
    }
    state.flags.push_back(e.report);

    const bool halt = consensus.inappropriate_flags >= state.config.inappropriate_halt ||
                      consensus.incorrect_flags >= state.config.incorrect_halt;
    if (halt && consensus.status == ImageStatus::Open) {
        consensus.status = ImageStatus::Halted;
        derived.emplace_back(ImageHalted{image.record.image_id});
    }
}

void apply(PlatformState& state, const Adjudicated& e, std::vector<EventPayload>& derived) {
    auto& image = image_mut(state, e.image_id);
    image.consensus.status = ImageStatus::Adjudicated;
    image.consensus.settled_label = e.label;
    image.adjudicated_by = e.expert_id;
    score_pending(state, image, e.label, derived);
}

template <typename T>
void apply(PlatformState&, const T&, std::vector<EventPayload>&) {
    throw Error(ErrorCode::InvalidInput, "derived events cannot be applied as input");
}

}  // namespace

const ImageState& PlatformState::image(const std::string& image_id) const {
    auto it = images.find(image_id);
    if (it == images.end()) throw Error(ErrorCode::UnknownImage, "unknown image '" + image_id + "'");
    return it->second;
}

const AnnotatorProfile* PlatformState::annotator(const std::string& annotator_id) const {
    auto it = annotators.find(annotator_id);
    return it == annotators.end() ? nullptr : &it->second;
}

QualificationState PlatformState::qualification(const std::string& annotator_id) const {
    const auto* profile = annotator(annotator_id);
    return profile ? profile->state : QualificationState::NonQualified;
}

bool PlatformState::counted(const Annotation& annotation) const noexcept {
    return config.raw_mode || annotation.qualified_at_submission;
}

void validate_input(const PlatformState& state, const EventPayload& payload) {
    if (const auto* e = std::get_if<DatasetIngested>(&payload)) {
        std::set<std::string> batch;
        for (const auto& record : e->images) {
            if (record.image_id.empty()) throw Error(ErrorCode::InvalidInput, "empty image_id");
            if (state.images.count(record.image_id) || !batch.insert(record.image_id).second) {
                throw Error(ErrorCode::DuplicateImage, "image '" + record.image_id + "' already exists");
            }
        }
    } else if (const auto* e = std::get_if<AnnotationSubmitted>(&payload)) {
        const auto& image = state.image(e->annotation.image_id);
        if (e->annotation.annotator_id.empty()) throw Error(ErrorCode::InvalidInput, "empty annotator_id");
        if (image.annotators.count(e->annotation.annotator_id)) {
            throw Error(ErrorCode::DuplicateAnnotation, "annotator '" + e->annotation.annotator_id +
                                                            "' already labeled '" + image.record.image_id + "'");
        }
        if (image.consensus.status != ImageStatus::Open) {
            throw Error(ErrorCode::ImageNotOpen, "image '" + image.record.image_id + "' is " +
                                                     std::string(to_string(image.consensus.status)));
        }
    } else if (const auto* e = std::get_if<FlagFiled>(&payload)) {
        state.image(e->report.image_id);
    } else if (const auto* e = std::get_if<Adjudicated>(&payload)) {
        const auto status = state.image(e->image_id).consensus.status;
        if (status != ImageStatus::Halted && status != ImageStatus::Escalated && status != ImageStatus::Settled) {
            throw Error(ErrorCode::NotReviewable,
                        "image '" + e->image_id + "' is " + std::string(to_string(status)));
        }
    } else {
        throw Error(ErrorCode::InvalidInput, "derived events cannot be submitted");
    }
}

std::vector<EventPayload> apply_input(PlatformState& state, const Event& event) {
    validate_input(state, event.payload);
    std::vector<EventPayload> derived;
    std::visit([&](const auto& e) { apply(state, e, derived); }, event.payload);
    state.last_seq = event.seq;
    return derived;
}

ReplayResult replay_detailed(std::span<const Event> events, const ProtocolConfig& config) {
    check_sequence(events);
    ReplayResult result;
    result.state.config = config;
    std::deque<EventPayload> expected;

    for (const auto& event : events) {
        if (is_derived(event.payload)) {
            if (expected.empty() || !(expected.front() == event.payload)) {
                throw Error(ErrorCode::CorruptLog, "seq " + std::to_string(event.seq) + ": unexpected " +
                                                       std::string(event_type(event.payload)));
            }
            expected.pop_front();
            result.state.last_seq = event.seq;
            continue;
        }
        if (!expected.empty()) {
            throw Error(ErrorCode::CorruptLog, "seq " + std::to_string(event.seq) +
                                                   ": derived events missing before next input");
        }
        if (const auto* submitted = std::get_if<AnnotationSubmitted>(&event.payload)) {
            const auto& a = submitted->annotation;
            const bool qualified = result.state.qualification(a.annotator_id) == QualificationState::Qualified;
            if (a.qualified_at_submission != qualified) {
                throw Error(ErrorCode::CorruptLog,
                            "seq " + std::to_string(event.seq) + ": qualified flag disagrees with state");
            }
        }
        try {
            for (auto& d : apply_input(result.state, event)) expected.push_back(std::move(d));
        } catch (const Error& e) {
            if (e.code() == ErrorCode::CorruptLog) throw;
            throw Error(ErrorCode::CorruptLog, "seq " + std::to_string(event.seq) + ": " + e.what());
        }
    }
    result.pending_derived.assign(expected.begin(), expected.end());
    return result;
}

PlatformState replay(std::span<const Event> events, const ProtocolConfig& config) {
    return replay_detailed(events, config).state;
}

Platform::Platform(ProtocolConfig config) {
    config.validate();
    state_.config = config;
}

Platform::Platform(ProtocolConfig config, EventLog log) : log_(std::move(log)) {
    config.validate();
    auto result = replay_detailed(log_.events(), config);
    state_ = std::move(result.state);
    for (auto& payload : result.pending_derived) state_.last_seq = log_.append(std::move(payload));
}

Seq Platform::commit(EventPayload input) {
    validate_input(state_, input);
    const Seq seq = log_.append(std::move(input));
    auto derived = apply_input(state_, log_.events().back());
    for (auto& payload : derived) state_.last_seq = log_.append(std::move(payload));
    return seq;
}

DatasetSummary Platform::ingest(std::vector<ImageRecord> images) {
    DatasetSummary summary;
    summary.n_images = images.size();
    for (auto& image : images) {
        image.is_gold_seed = !image.gold_labels.empty();
        if (image.is_gold_seed) ++summary.n_gold;
    }
    if (!images.empty()) commit(DatasetIngested{std::move(images)});
    return summary;
}

SubmissionOutcome Platform::submit_annotation(const std::string& annotator_id, const std::string& image_id,
                                              FstLabel label) {
    Annotation annotation;
    annotation.annotation_id = "a" + std::to_string(log_.last_seq() + 1);
    annotation.image_id = image_id;
    annotation.annotator_id = annotator_id;
    annotation.label = label;
    annotation.qualified_at_submission = state_.qualification(annotator_id) == QualificationState::Qualified;

    SubmissionOutcome outcome;
    outcome.annotation_id = annotation.annotation_id;
    outcome.seq = commit(AnnotationSubmitted{std::move(annotation)});
    outcome.accepted = true;
    outcome.new_status = state_.image(image_id).consensus.status;
    outcome.qualification_state = state_.qualification(annotator_id);
    return outcome;
}

ImageStatus Platform::file_failure_report(FailureReport report) {
    const auto image_id = report.image_id;
    commit(FlagFiled{std::move(report)});
    return state_.image(image_id).consensus.status;
}

ConsensusState Platform::adjudicate(const std::string& image_id, const std::string& expert_id, FstLabel label,
                                    Role role) {
    if (role != Role::Expert) throw Error(ErrorCode::PermissionDenied, "adjudication requires the Expert role");
    commit(Adjudicated{image_id, expert_id, label});
    return state_.image(image_id).consensus;
}

}  // namespace skintone::consensus
