#include "skintone/service/service.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <httplib.h>

#include "skintone/consensus/export.hpp"
#include "skintone/consensus/review.hpp"
#include "skintone/core/error.hpp"
#include "skintone/ita/image_io.hpp"
#include "skintone/service/ingest.hpp"
#include "skintone/service/routing.hpp"
#include "skintone/service/storage.hpp"
#include "skintone/stats/agreement.hpp"
#include "skintone/stats/report.hpp"

namespace skintone::service {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

Response json_response(int status, const json& body) {
    return {status, "application/json", body.dump()};
}

Response error_response(ErrorCode code, const std::string& message, json details = nullptr) {
    json error{{"code", std::string(to_string(code))}, {"message", message}};
    if (!details.is_null()) error["details"] = std::move(details);
    return json_response(http_status(code), {{"error", error}});
}

void require(const Principal& who, std::initializer_list<Role> roles) {
    if (std::find(roles.begin(), roles.end(), who.role) == roles.end()) {
        throw Error(ErrorCode::PermissionDenied, "role " + std::string(to_string(who.role)) + " may not do this");
    }
}

json parse_body(const Request& request) {
    try {
        auto doc = json::parse(request.body);
        if (!doc.is_object()) throw Error(ErrorCode::InvalidInput, "request body must be a JSON object");
        return doc;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("malformed JSON body: ") + e.what());
    }
}

std::string field(const json& body, const char* name) {
    auto it = body.find(name);
    if (it == body.end() || !it->is_string()) {
        throw Error(ErrorCode::InvalidInput, std::string("missing string field '") + name + "'");
    }
    return it->get<std::string>();
}

FstLabel label_field(const json& body) {
    const auto text = field(body, "label");
    const auto label = parse_label(text);
    if (!label) throw Error(ErrorCode::InvalidInput, "unknown label '" + text + "'");
    return *label;
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string query(const Request& request, const std::string& name, const std::string& fallback = {}) {
    auto it = request.query.find(name);
    return it == request.query.end() ? fallback : it->second;
}

long long query_int(const Request& request, const std::string& name, long long fallback) {
    auto it = request.query.find(name);
    if (it == request.query.end()) return fallback;
    try {
        std::size_t used = 0;
        const auto value = std::stoll(it->second, &used);
        if (used != it->second.size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidInput, "query parameter '" + name + "' must be an integer");
    }
}

std::string file_url(const std::string& image_id) { return "/images/" + httplib::detail::encode_url(image_id) + "/file"; }

json qualification_json(const consensus::PlatformState& state, const std::string& annotator_id) {
    const auto* profile = state.annotator(annotator_id);
    json out{{"annotator_id", annotator_id},
             {"state", std::string(to_string(state.qualification(annotator_id)))},
             {"scored", profile ? profile->scored_total : 0},
             {"windowed_agreement", nullptr}};
    if (profile && !profile->score_window.empty()) out["windowed_agreement"] = profile->windowed_agreement();
    return out;
}

json optional_label(const std::optional<FstLabel>& label) {
    return label ? json(std::string(to_string(*label))) : json(nullptr);
}

std::string content_type_for(const fs::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    return "application/octet-stream";
}

}  // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidInput:
        case ErrorCode::ManifestParse:
        case ErrorCode::InvalidRho:
        case ErrorCode::SampleTooSmall:
            return 400;
        case ErrorCode::Unauthenticated: return 401;
        case ErrorCode::PermissionDenied: return 403;
        case ErrorCode::UnknownImage:
        case ErrorCode::UnknownMethod:
        case ErrorCode::NotFound:
        case ErrorCode::NoWork:
            return 404;
        case ErrorCode::DuplicateImage:
        case ErrorCode::DuplicateAnnotation:
        case ErrorCode::ImageNotOpen:
        case ErrorCode::NotReviewable:
        case ErrorCode::NotSettled:
        case ErrorCode::NoQualifiedAnnotations:
            return 409;
        case ErrorCode::MissingImageFile:
        case ErrorCode::DegenerateInput:
        case ErrorCode::EmptyInput:
        case ErrorCode::NoApplicablePairs:
        case ErrorCode::PoolTooSmall:
        case ErrorCode::MissingLabel:
        case ErrorCode::NoSkinDetected:
        case ErrorCode::CalibrationUnderdetermined:
        case ErrorCode::CalibrationDegenerate:
            return 422;
        case ErrorCode::Storage:
        case ErrorCode::CorruptLog:
        case ErrorCode::ScoringDisqualified:
            return 500;
    }
    return 500;
}

Service::Service(ServiceConfig config) : config_(std::move(config)), routing_rng_(config_.routing_seed) {
    platform_ = open_platform(config_.data_dir, config_.protocol);
}

Service::~Service() { stop(); }

consensus::PlatformState Service::snapshot() const {
    std::shared_lock lock(mutex_);
    return platform_->state();
}

Response Service::handle(const Request& request) {
    try {
        return dispatch(request);
    } catch (const MissingFilesError& e) {
        return error_response(e.code(), e.what(), json{{"missing", e.missing()}});
    } catch (const Error& e) {
        return error_response(e.code(), e.what());
    } catch (const json::exception& e) {
        return error_response(ErrorCode::InvalidInput, e.what());
    } catch (const fs::filesystem_error& e) {
        return error_response(ErrorCode::Storage, e.what());
    }
}

Response Service::dispatch(const Request& request) {
    std::vector<std::string> parts;
    {
        std::stringstream in(request.path);
        std::string part;
        while (std::getline(in, part, '/')) {
            if (!part.empty()) parts.push_back(httplib::detail::decode_url(part, false));
        }
    }
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";

    if (get && parts == std::vector<std::string>{"health"}) {
        std::shared_lock lock(mutex_);
        return json_response(200, {{"status", "ok"}, {"last_seq", platform_->state().last_seq}});
    }

    constexpr std::string_view bearer = "Bearer ";
    if (request.authorization.compare(0, bearer.size(), bearer) != 0) {
        throw Error(ErrorCode::Unauthenticated, "missing bearer token");
    }
    auto token = config_.tokens.find(request.authorization.substr(bearer.size()));
    if (token == config_.tokens.end()) throw Error(ErrorCode::Unauthenticated, "unknown bearer token");
    const Principal& who = token->second;

    const auto n = parts.size();
    auto is = [&](std::initializer_list<const char*> expected) {
        if (expected.size() != n) return false;
        std::size_t i = 0;
        for (const char* e : expected) {
            if (*e != '*' && parts[i] != e) return false;
            ++i;
        }
        return true;
    };

    if (post && is({"datasets"})) return post_dataset(who, request);
    if (get && is({"tasks", "next"})) return next_task(who, request);
    if (post && is({"annotations"})) return post_annotation(who, request);
    if (post && is({"flags"})) return post_flag(who, request);
    if (get && is({"images", "*"})) return get_image(who, parts[1]);
    if (get && is({"images", "*", "file"})) return get_image_file(parts[1]);
    if (get && is({"annotators", "*"})) return get_annotator(who, parts[1]);
    if (get && is({"review", "queue"})) {
        require(who, {Role::Expert, Role::Admin});
        return review_queue(request);
    }
    if (post && is({"review", "*", "adjudicate"})) return adjudicate(who, parts[1], request);
    if (get && n == 2 && parts[0] == "reports") {
        require(who, {Role::Expert, Role::Admin});
        if (parts[1] == "irr") return report_irr(request);
        if (parts[1] == "confusion") return report_confusion(request);
        if (parts[1] == "crowd-curve") return report_crowd_curve(request);
        if (parts[1] == "ita") return report_ita(request);
    }
    if (get && is({"exports", "*"})) {
        require(who, {Role::Admin});
        return export_file(parts[1]);
    }
    throw Error(ErrorCode::NotFound, "no route for " + request.method + " " + request.path);
}

Response Service::post_dataset(const Principal& who, const Request& request) {
    require(who, {Role::Admin});
    const auto body = parse_body(request);
    std::string manifest;
    fs::path root;
    if (body.contains("manifest_path")) {
        const fs::path path = field(body, "manifest_path");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::InvalidInput, "cannot read manifest " + path.string());
        manifest.assign(std::istreambuf_iterator<char>(in), {});
        root = path.parent_path();
    } else {
        manifest = field(body, "manifest");
        root = config_.data_dir / "images";
    }
    if (body.contains("image_root")) root = field(body, "image_root");

    std::unique_lock lock(mutex_);
    const auto summary = ingest_manifest(*platform_, manifest, root);
    return json_response(201, {{"n_images", summary.n_images}, {"n_gold", summary.n_gold}});
}

Response Service::next_task(const Principal& who, const Request& request) {
    require(who, {Role::Annotator, Role::Admin});
    const auto annotator = query(request, "annotator", who.id);
    if (who.role == Role::Annotator && annotator != who.id) {
        throw Error(ErrorCode::PermissionDenied, "annotators may only request their own tasks");
    }
    std::unique_lock lock(mutex_);
    const auto task = service::next_task(platform_->state(), annotator, config_.gold_probe_rate, routing_rng_);
    if (!task) throw Error(ErrorCode::NoWork, "no eligible image for " + annotator);
    return json_response(200, {{"image_id", task->image_id},
                               {"file_url", file_url(task->image_id)},
                               {"assigned_to", task->assigned_to},
                               {"reason", std::string(to_string(task->reason))}});
}

Response Service::post_annotation(const Principal& who, const Request& request) {
    require(who, {Role::Annotator});
    const auto body = parse_body(request);
    const auto image_id = field(body, "image_id");
    const auto label = label_field(body);
    if (body.contains("annotator_id") && field(body, "annotator_id") != who.id) {
        throw Error(ErrorCode::PermissionDenied, "annotator_id must match the authenticated principal");
    }
    std::unique_lock lock(mutex_);
    const auto outcome = platform_->submit_annotation(who.id, image_id, label);
    return json_response(201, {{"accepted", outcome.accepted},
                               {"annotation_id", outcome.annotation_id},
                               {"seq", outcome.seq},
                               {"image_status", std::string(to_string(outcome.new_status))},
                               {"qualification", qualification_json(platform_->state(), who.id)}});
}

Response Service::post_flag(const Principal& who, const Request& request) {
    require(who, {Role::Annotator});
    const auto body = parse_body(request);
    FailureReport report;
    report.image_id = field(body, "image_id");
    report.annotator_id = who.id;
    const auto kind_text = field(body, "kind");
    const auto kind = parse_failure_kind(kind_text);
    if (!kind) throw Error(ErrorCode::InvalidInput, "unknown flag kind '" + kind_text + "'");
    report.kind = *kind;
    if (body.contains("text")) report.text = field(body, "text");
    std::unique_lock lock(mutex_);
    const auto status = platform_->file_failure_report(report);
    return json_response(201, {{"image_id", report.image_id}, {"image_status", std::string(to_string(status))}});
}

Response Service::get_image(const Principal& who, const std::string& image_id) {
    std::shared_lock lock(mutex_);
    const auto& image = platform_->state().image(image_id);
    json out{{"image_id", image_id},
             {"file_url", file_url(image_id)},
             {"source", image.record.source},
             {"is_gold", image.record.is_gold_seed},
             {"status", std::string(to_string(image.consensus.status))},
             {"label", optional_label(image.consensus.settled_label)}};
    // Tallies, flag counts and gold labels are operator data; experts and
    // annotators label without seeing them.
    if (who.role == Role::Admin) {
        json counts = json::object();
        for (auto label : kAllLabels) counts[std::string(to_string(label))] = image.consensus.tally.count(label);
        out["tally"] = {{"counts", counts},
                        {"total_qualified", image.consensus.tally.total_qualified},
                        {"total_all", image.consensus.tally.total_all}};
        out["incorrect_flags"] = image.consensus.incorrect_flags;
        out["inappropriate_flags"] = image.consensus.inappropriate_flags;
        json gold = json::array();
        for (const auto& [expert, label] : image.record.gold_labels) {
            gold.push_back({{"expert", expert}, {"label", std::string(to_string(label))}});
        }
        out["gold"] = gold;
    }
    return json_response(200, out);
}

Response Service::get_image_file(const std::string& image_id) {
    fs::path path;
    {
        std::shared_lock lock(mutex_);
        path = platform_->state().image(image_id).record.file_path;
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::MissingImageFile, "image file unavailable: " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(in)), {});
    return {200, content_type_for(path), std::move(bytes)};
}

Response Service::get_annotator(const Principal& who, const std::string& annotator_id) {
    if (who.role == Role::Annotator && who.id != annotator_id) {
        throw Error(ErrorCode::PermissionDenied, "annotators may only read their own qualification");
    }
    std::shared_lock lock(mutex_);
    return json_response(200, qualification_json(platform_->state(), annotator_id));
}

Response Service::review_queue(const Request& request) {
    const auto offset = query_int(request, "offset", 0);
    const auto limit = query_int(request, "limit", 100);
    if (offset < 0 || limit < 0) throw Error(ErrorCode::InvalidInput, "offset and limit must be non-negative");
    std::shared_lock lock(mutex_);
    const auto queue = consensus::review_queue(platform_->state());
    json items = json::array();
    for (std::size_t i = static_cast<std::size_t>(offset);
         i < queue.size() && i < static_cast<std::size_t>(offset + limit); ++i) {
        items.push_back({{"image_id", queue[i].image_id},
                         {"file_url", file_url(queue[i].image_id)},
                         {"reason", queue[i].reason}});
    }
    return json_response(200, {{"items", items}, {"total", queue.size()}, {"offset", offset}});
}

Response Service::adjudicate(const Principal& who, const std::string& image_id, const Request& request) {
    const auto body = parse_body(request);
    const auto label = label_field(body);
    std::unique_lock lock(mutex_);
    const auto state = platform_->adjudicate(image_id, who.id, label, who.role);
    return json_response(200, {{"image_id", image_id},
                               {"status", std::string(to_string(state.status))},
                               {"label", optional_label(state.settled_label)}});
}

std::vector<std::string> Service::default_experts() const {
    if (!config_.experts.empty()) return config_.experts;
    std::vector<std::string> experts;
    for (const auto& id : platform_->state().ingest_order) {
        for (const auto& [expert, label] : platform_->state().image(id).record.gold_labels) {
            if (std::find(experts.begin(), experts.end(), expert) == experts.end()) experts.push_back(expert);
        }
    }
    return experts;
}

std::vector<std::string> Service::default_methods() const {
    auto methods = default_experts();
    methods.push_back("consensus");
    for (const auto& [name, path] : config_.methods) {
        if (std::find(methods.begin(), methods.end(), name) == methods.end()) methods.push_back(name);
    }
    return methods;
}

stats::LabelMap Service::method_labels(const std::string& name) {
    if (auto it = config_.methods.find(name); it != config_.methods.end()) return read_label_csv(it->second);
    const auto& state = platform_->state();
    stats::LabelMap labels;
    if (name == "consensus") {
        for (const auto& [id, image] : state.images) {
            if (image.consensus.settled_label) labels[id] = *image.consensus.settled_label;
        }
        return labels;
    }
    if (name == "ita") {
        refresh_ita();
        std::lock_guard guard(ita_mutex_);
        for (const auto& [id, result] : ita_cache_) labels[id] = result.fst.value_or(FstLabel::NotApplicable);
        return labels;
    }
    bool known = false;
    for (const auto& [id, image] : state.images) {
        if (auto label = image.record.gold_label(name)) {
            labels[id] = *label;
            known = true;
        } else {
            for (const auto& [expert, l] : image.record.gold_labels) known = known || expert == name;
        }
    }
    if (!known) throw Error(ErrorCode::UnknownMethod, "unknown method '" + name + "'");
    return labels;
}

void Service::refresh_ita() {
    std::lock_guard guard(ita_mutex_);
    for (const auto& id : platform_->state().ingest_order) {
        if (ita_cache_.count(id) != 0 || ita_errors_.count(id) != 0) continue;
        try {
            const auto raster = ita::load_image(platform_->state().image(id).record.file_path);
            ita_cache_[id] = ita::annotate(raster, config_.thresholds, config_.skin_rule, config_.aggregation);
        } catch (const Error& e) {
            ita_errors_[id] = e.what();
        }
    }
}

Response Service::report_irr(const Request& request) {
    std::shared_lock lock(mutex_);
    const auto names = request.query.count("methods") ? split_list(query(request, "methods")) : default_methods();
    auto experts = request.query.count("experts") ? split_list(query(request, "experts")) : default_experts();
    experts.erase(std::remove_if(experts.begin(), experts.end(),
                                 [&](const auto& e) { return std::find(names.begin(), names.end(), e) == names.end(); }),
                  experts.end());
    stats::MethodLabels methods;
    for (const auto& name : names) methods.emplace_back(name, method_labels(name));
    const auto report = stats::build_irr_report(methods, experts);
    if (query(request, "format") == "text") return {200, "text/plain", stats::to_text(report)};
    return json_response(200, stats::to_json(report));
}

Response Service::report_confusion(const Request& request) {
    const auto a = query(request, "a");
    const auto b = query(request, "b");
    if (a.empty() || b.empty()) throw Error(ErrorCode::InvalidInput, "query parameters a and b are required");
    const auto k = query_int(request, "k", 1);
    std::shared_lock lock(mutex_);
    const auto pairs = stats::pair_labels(method_labels(a), method_labels(b));
    const auto matrix = stats::confusion_matrix(pairs);
    const auto format = query(request, "format");
    if (format == "csv") return {200, "text/csv", stats::confusion_csv(matrix)};
    if (format == "text") return {200, "text/plain", stats::to_text(matrix)};

    json out{{"a", a}, {"b", b}, {"total", matrix.total}, {"n_effective", pairs.n_effective()},
             {"matrix", stats::to_json(matrix)}};
    auto rate = [&](int units) -> json {
        try {
            return stats::within_k_agreement(pairs, units);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::NoApplicablePairs) throw;
            return nullptr;
        }
    };
    out["exact_agreement"] = rate(0);
    out["within_k"] = {{"k", k}, {"agreement", rate(static_cast<int>(k))}};
    try {
        out["rho"] = stats::pearson(pairs);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateInput) throw;
        out["rho"] = nullptr;
    }
    return json_response(200, out);
}

Response Service::report_crowd_curve(const Request& request) {
    auto options = config_.crowd_curve;
    if (request.query.count("sizes")) {
        options.sizes.clear();
        for (const auto& s : split_list(query(request, "sizes"))) {
            try {
                options.sizes.push_back(std::stoi(s));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidInput, "sizes must be integers");
            }
        }
    }
    options.draws = static_cast<int>(query_int(request, "draws", options.draws));
    options.seed = static_cast<std::uint64_t>(query_int(request, "seed", static_cast<long long>(options.seed)));
    if (request.query.count("with_replacement")) options.with_replacement = query(request, "with_replacement") == "true";

    std::shared_lock lock(mutex_);
    std::string reference_name = query(request, "reference");
    if (reference_name.empty()) {
        const auto experts = default_experts();
        if (experts.empty()) throw Error(ErrorCode::UnknownMethod, "no reference method available");
        reference_name = experts.front();
    }
    const auto reference = method_labels(reference_name);
    const bool qualified_only = query(request, "qualified_only") == "true";
    stats::AnnotationPool pool;
    const auto& state = platform_->state();
    for (const auto& a : state.annotations) {
        if (!qualified_only || a.qualified_at_submission) pool[a.image_id].push_back(a.label);
    }
    const auto curve = stats::bootstrap_crowd_curve(pool, reference, options);
    if (query(request, "format") == "text") return {200, "text/plain", stats::to_text(curve)};
    return json_response(200, {{"reference", reference_name},
                               {"draws", options.draws},
                               {"with_replacement", options.with_replacement},
                               {"points", stats::to_json(curve)}});
}

Response Service::report_ita(const Request& request) {
    std::shared_lock lock(mutex_);
    refresh_ita();
    std::lock_guard guard(ita_mutex_);
    std::vector<ita::ItaRow> rows;
    for (const auto& id : platform_->state().ingest_order) {
        if (auto it = ita_cache_.find(id); it != ita_cache_.end()) rows.push_back({id, it->second});
    }
    if (query(request, "format") == "csv") return {200, "text/csv", ita::ita_results_csv(rows)};
    json items = json::array();
    for (const auto& row : rows) {
        items.push_back({{"image_id", row.image_id},
                         {"mean_ita_deg", row.result.masked_pixel_count ? json(row.result.mean_ita_deg) : json(nullptr)},
                         {"masked_pixel_count", row.result.masked_pixel_count},
                         {"fst", optional_label(row.result.fst)}});
    }
    json errors = json::array();
    for (const auto& [id, message] : ita_errors_) errors.push_back({{"image_id", id}, {"message", message}});
    return json_response(200, {{"thresholds", ita::to_json(config_.thresholds)},
                               {"aggregation", config_.aggregation == ita::Aggregation::Mean ? "mean" : "median"},
                               {"rows", items},
                               {"errors", errors}});
}

Response Service::export_file(const std::string& name) {
    std::shared_lock lock(mutex_);
    if (name == "consensus.csv") return {200, "text/csv", consensus::consensus_csv(platform_->state())};
    if (name == "annotations.csv") return {200, "text/csv", consensus::annotations_csv(platform_->state())};
    if (name == "thresholds.json") return {200, "application/json", ita::to_json(config_.thresholds).dump(2)};
    throw Error(ErrorCode::NotFound, "unknown export '" + name + "'");
}

void Service::install_handlers() {
    server_ = std::make_unique<httplib::Server>();
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        Request request;
        request.method = req.method;
        request.path = req.path;
        for (const auto& [key, value] : req.params) request.query.emplace(key, value);
        request.body = req.body;
        request.authorization = req.get_header_value("Authorization");
        const auto response = handle(request);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
    };
    server_->Get(".*", handler);
    server_->Post(".*", handler);
}

int Service::bind_any_port(const std::string& host) {
    install_handlers();
    const int port = server_->bind_to_any_port(host);
    if (port < 0) throw Error(ErrorCode::Storage, "cannot bind " + host);
    return port;
}

void Service::serve_bound() {
    if (!server_) throw Error(ErrorCode::InvalidInput, "server is not bound");
    server_->listen_after_bind();
}

void Service::serve() {
    install_handlers();
    std::cerr << "listening on " << config_.listen_host << ':' << config_.listen_port << std::endl;
    if (!server_->listen(config_.listen_host, config_.listen_port)) {
        throw Error(ErrorCode::Storage,
                    "cannot listen on " + config_.listen_host + ":" + std::to_string(config_.listen_port));
    }
}

void Service::stop() {
    if (server_) server_->stop();
}

}  // namespace skintone::service
