#include "skintone/core/events.hpp"

#include "skintone/core/error.hpp"

namespace skintone {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

FstLabel label_field(const json& doc, const char* key) {
    const auto text = doc.at(key).get<std::string>();
    auto label = parse_label(text);
    if (!label) throw Error(ErrorCode::CorruptLog, "bad label '" + text + "'");
    return *label;
}

template <typename T, typename Parser>
T enum_field(const json& doc, const char* key, Parser parse) {
    const auto text = doc.at(key).get<std::string>();
    auto value = parse(text);
    if (!value) throw Error(ErrorCode::CorruptLog, std::string("bad ") + key + " '" + text + "'");
    return *value;
}

}  // namespace

bool is_derived(const EventPayload& payload) noexcept {
    return std::holds_alternative<ConsensusSettled>(payload) ||
           std::holds_alternative<ImageHalted>(payload) ||
           std::holds_alternative<ImageEscalated>(payload) ||
           std::holds_alternative<QualificationChanged>(payload);
}

std::string_view event_type(const EventPayload& payload) noexcept {
    return std::visit(overloaded{
                          [](const DatasetIngested&) { return std::string_view{"DatasetIngested"}; },
                          [](const AnnotationSubmitted&) { return std::string_view{"AnnotationSubmitted"}; },
                          [](const FlagFiled&) { return std::string_view{"FlagFiled"}; },
                          [](const ConsensusSettled&) { return std::string_view{"ConsensusSettled"}; },
                          [](const ImageHalted&) { return std::string_view{"ImageHalted"}; },
                          [](const ImageEscalated&) { return std::string_view{"ImageEscalated"}; },
                          [](const Adjudicated&) { return std::string_view{"Adjudicated"}; },
                          [](const QualificationChanged&) { return std::string_view{"QualificationChanged"}; },
                      },
                      payload);
}

json to_json(const ImageRecord& record) {
    json gold = json::array();
    for (const auto& [expert, label] : record.gold_labels) {
        gold.push_back({{"expert", expert}, {"label", to_string(label)}});
    }
    return {{"image_id", record.image_id},
            {"file_path", record.file_path},
            {"source", record.source},
            {"gold", gold}};
}

ImageRecord image_record_from_json(const json& doc) {
    ImageRecord record;
    record.image_id = doc.at("image_id").get<std::string>();
    record.file_path = doc.at("file_path").get<std::string>();
    record.source = doc.at("source").get<std::string>();
    for (const auto& entry : doc.at("gold")) {
        record.gold_labels.emplace_back(entry.at("expert").get<std::string>(),
                                        label_field(entry, "label"));
    }
    record.is_gold_seed = !record.gold_labels.empty();
    return record;
}

json to_json(const Event& event) {
    json doc{{"seq", event.seq}, {"type", event_type(event.payload)}};
    std::visit(overloaded{
                   [&](const DatasetIngested& e) {
                       json images = json::array();
                       for (const auto& image : e.images) images.push_back(to_json(image));
                       doc["images"] = std::move(images);
                   },
                   [&](const AnnotationSubmitted& e) {
                       const auto& a = e.annotation;
                       doc["annotation_id"] = a.annotation_id;
                       doc["image_id"] = a.image_id;
                       doc["annotator_id"] = a.annotator_id;
                       doc["label"] = to_string(a.label);
                       doc["qualified"] = a.qualified_at_submission;
                   },
                   [&](const FlagFiled& e) {
                       doc["image_id"] = e.report.image_id;
                       doc["annotator_id"] = e.report.annotator_id;
                       doc["kind"] = to_string(e.report.kind);
                       doc["text"] = e.report.text;
                   },
                   [&](const ConsensusSettled& e) {
                       doc["image_id"] = e.image_id;
                       doc["label"] = to_string(e.label);
                   },
                   [&](const ImageHalted& e) { doc["image_id"] = e.image_id; },
                   [&](const ImageEscalated& e) { doc["image_id"] = e.image_id; },
                   [&](const Adjudicated& e) {
                       doc["image_id"] = e.image_id;
                       doc["expert_id"] = e.expert_id;
                       doc["label"] = to_string(e.label);
                   },
                   [&](const QualificationChanged& e) {
                       doc["annotator_id"] = e.annotator_id;
                       doc["from"] = to_string(e.from);
                       doc["to"] = to_string(e.to);
                   },
               },
               event.payload);
    return doc;
}

Event event_from_json(const json& doc) {
    try {
        Event event;
        event.seq = doc.at("seq").get<Seq>();
        const auto type = doc.at("type").get<std::string>();
        if (type == "DatasetIngested") {
            DatasetIngested e;
            for (const auto& image : doc.at("images")) e.images.push_back(image_record_from_json(image));
            event.payload = std::move(e);
        } else if (type == "AnnotationSubmitted") {
            Annotation a;
            a.annotation_id = doc.at("annotation_id").get<std::string>();
            a.image_id = doc.at("image_id").get<std::string>();
            a.annotator_id = doc.at("annotator_id").get<std::string>();
            a.label = label_field(doc, "label");
            a.submitted_at = event.seq;
            a.qualified_at_submission = doc.at("qualified").get<bool>();
            event.payload = AnnotationSubmitted{std::move(a)};
        } else if (type == "FlagFiled") {
            FailureReport r;
            r.image_id = doc.at("image_id").get<std::string>();
            r.annotator_id = doc.at("annotator_id").get<std::string>();
            r.kind = enum_field<FailureKind>(doc, "kind", parse_failure_kind);
            r.text = doc.at("text").get<std::string>();
            event.payload = FlagFiled{std::move(r)};
        } else if (type == "ConsensusSettled") {
            event.payload = ConsensusSettled{doc.at("image_id").get<std::string>(), label_field(doc, "label")};
        } else if (type == "ImageHalted") {
            event.payload = ImageHalted{doc.at("image_id").get<std::string>()};
        } else if (type == "ImageEscalated") {
            event.payload = ImageEscalated{doc.at("image_id").get<std::string>()};
        } else if (type == "Adjudicated") {
            event.payload = Adjudicated{doc.at("image_id").get<std::string>(),
                                        doc.at("expert_id").get<std::string>(), label_field(doc, "label")};
        } else if (type == "QualificationChanged") {
            event.payload = QualificationChanged{
                doc.at("annotator_id").get<std::string>(),
                enum_field<QualificationState>(doc, "from", parse_qualification_state),
                enum_field<QualificationState>(doc, "to", parse_qualification_state)};
        } else {
            throw Error(ErrorCode::CorruptLog, "unknown event type '" + type + "'");
        }
        return event;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::CorruptLog, std::string("malformed event: ") + e.what());
    }
}

std::string encode_event(const Event& event) { return to_json(event).dump(); }

Event decode_event(std::string_view line) {
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorCode::CorruptLog, "event line is not valid JSON");
    return event_from_json(doc);
}

}  // namespace skintone
