// Command-line entry points for the annotation platform.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "skintone/consensus/export.hpp"
#include "skintone/consensus/review.hpp"
#include "skintone/core/csv.hpp"
#include "skintone/core/error.hpp"
#include "skintone/core/manifest.hpp"
#include "skintone/ita/calibration.hpp"
#include "skintone/ita/image_io.hpp"
#include "skintone/service/config.hpp"
#include "skintone/service/ingest.hpp"
#include "skintone/service/service.hpp"
#include "skintone/service/storage.hpp"
#include "skintone/sim/simulation.hpp"
#include "skintone/stats/agreement.hpp"
#include "skintone/stats/report.hpp"

using namespace skintone;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), {}};
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
    out << text;
    if (!out) throw Error(ErrorCode::Storage, "cannot write " + out_path);
}

/// "name=path" or a bare path named after its stem.
std::pair<std::string, stats::LabelMap> load_method(const std::string& spec) {
    const auto eq = spec.find('=');
    const fs::path path = eq == std::string::npos ? spec : spec.substr(eq + 1);
    const auto name = eq == std::string::npos ? path.stem().string() : spec.substr(0, eq);
    return {name, service::read_label_csv(path)};
}

/// Expert columns of a manifest as named label sets, in column order.
stats::MethodLabels manifest_experts(const fs::path& manifest) {
    stats::MethodLabels out;
    for (const auto& image : read_manifest(manifest)) {
        for (const auto& [expert, label] : image.gold_labels) {
            auto it = std::find_if(out.begin(), out.end(), [&](const auto& m) { return m.first == expert; });
            if (it == out.end()) {
                out.emplace_back(expert, stats::LabelMap{});
                it = out.end() - 1;
            }
            it->second[image.image_id] = label;
        }
    }
    return out;
}

stats::AnnotationPool read_pool(const fs::path& path) {
    const auto table = csv::read_file(path);
    const auto id = table.column("image_id");
    const auto label = table.column("label");
    if (id == std::string::npos || label == std::string::npos) {
        throw Error(ErrorCode::InvalidInput, path.string() + ": needs image_id and label columns");
    }
    stats::AnnotationPool pool;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto parsed = parse_label(table.rows[r].at(label));
        if (!parsed) {
            throw Error(ErrorCode::InvalidInput,
                        path.string() + " line " + std::to_string(table.line_numbers[r]) + ": bad label");
        }
        pool[table.rows[r].at(id)].push_back(*parsed);
    }
    return pool;
}

struct Globals {
    std::string config_path;
    std::string data_dir;

    service::ServiceConfig load() const {
        std::string path = config_path;
        if (path.empty()) {
            if (const char* env = std::getenv(service::kConfigEnv); env && *env) path = env;
        }
        auto config = path.empty() ? service::ServiceConfig{} : service::load_service_config(path);
        service::apply_environment(config);
        if (!data_dir.empty()) config.data_dir = data_dir;
        return config;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Skin-tone annotation platform: consensus labeling, ITA estimation and reliability reports"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals globals;
    app.add_option("-c,--config", globals.config_path, "JSON config file (default: $SKINTONE_CONFIG)");
    app.add_option("-d,--data-dir", globals.data_dir, "Directory holding the event log");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load a dataset manifest into the event log");
    std::string manifest_path, image_root;
    ingest->add_option("manifest", manifest_path, "Manifest CSV")->required();
    ingest->add_option("--image-root", image_root, "Directory the manifest paths are relative to");

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    std::string listen;
    serve->add_option("--listen", listen, "host:port (overrides config and $SKINTONE_LISTEN)");

    // ita
    auto* ita_cmd = app.add_subcommand("ita", "Algorithmic ITA-based labels");
    ita_cmd->require_subcommand(1);
    auto* ita_compute = ita_cmd->add_subcommand("compute", "ITA and FST per image");
    std::string ita_manifest, ita_images, ita_thresholds, out_path, aggregation = "mean";
    ita_compute->add_option("--manifest", ita_manifest, "Manifest listing the images");
    ita_compute->add_option("--images", ita_images, "Directory of PNG/JPEG images (alternative to --manifest)");
    ita_compute->add_option("--image-root", image_root, "Root for manifest paths");
    ita_compute->add_option("--thresholds", ita_thresholds, "Thresholds JSON");
    ita_compute->add_option("--aggregation", aggregation, "mean or median")->check(CLI::IsMember({"mean", "median"}));
    ita_compute->add_option("-o,--out", out_path, "Output CSV (default stdout)");

    auto* ita_calibrate = ita_cmd->add_subcommand("calibrate", "Fit thresholds to two experts' gold labels");
    std::string ita_results, gold_manifest, expert_a, expert_b;
    ita_calibrate->add_option("--ita", ita_results, "ITA results CSV from `ita compute`")->required();
    ita_calibrate->add_option("--gold", gold_manifest, "Manifest with expert columns")->required();
    ita_calibrate->add_option("--expert-a", expert_a, "First expert column (default: first)");
    ita_calibrate->add_option("--expert-b", expert_b, "Second expert column (default: second)");
    ita_calibrate->add_option("-o,--out", out_path, "Write calibrated thresholds JSON here");

    // report
    auto* report = app.add_subcommand("report", "Inter-rater reliability reports");
    report->require_subcommand(1);
    std::vector<std::string> method_specs, expert_names;
    std::string format = "text", spec_a, spec_b, report_manifest;
    int k = 1;

    auto* irr = report->add_subcommand("irr", "Pairwise Pearson matrix with Fisher-Z minimum p-values");
    irr->add_option("-m,--method", method_specs, "Label CSV as name=path (repeatable)");
    irr->add_option("--manifest", report_manifest, "Add the manifest's expert columns as methods");
    irr->add_option("-e,--expert", expert_names, "Method names that are experts (default: manifest experts)");
    irr->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* confusion = report->add_subcommand("confusion", "7x7 confusion matrix");
    auto* within = report->add_subcommand("within-k", "Share of labels within k units");
    for (auto* cmd : {confusion, within}) {
        cmd->add_option("-a", spec_a, "First label CSV (name=path)")->required();
        cmd->add_option("-b", spec_b, "Second label CSV (name=path)")->required();
    }
    confusion->add_option("--format", format)->check(CLI::IsMember({"text", "json", "csv"}));
    within->add_option("-k", k, "Units of tolerance")->check(CLI::NonNegativeNumber);

    auto* curve = report->add_subcommand("crowd-curve", "Crowd-size bootstrap curve");
    std::string pool_path, reference_spec;
    stats::CrowdCurveOptions curve_options;
    curve->add_option("--pool", pool_path, "CSV with one row per annotation (image_id,label)")->required();
    curve->add_option("--reference", reference_spec, "Reference label CSV (name=path)")->required();
    curve->add_option("--sizes", curve_options.sizes, "Crowd sizes")->delimiter(',');
    curve->add_option("--draws", curve_options.draws, "Draws per size");
    curve->add_option("--seed", curve_options.seed, "RNG seed");
    curve->add_flag("--with-replacement", curve_options.with_replacement, "Sample with replacement");
    curve->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    // review
    auto* review = app.add_subcommand("review", "Expert review sampling");
    review->require_subcommand(1);
    auto* select = review->add_subcommand("select", "Stratified review sample of two label sets");
    std::size_t per_stratum = 10;
    int threshold = 1;
    std::uint64_t seed = 0;
    select->add_option("-a", spec_a, "Label CSV stratified on (name=path)")->required();
    select->add_option("-b", spec_b, "Label CSV compared against (name=path)")->required();
    select->add_option("-n,--per-stratum", per_stratum, "Images per cell");
    select->add_option("--threshold", threshold, "Discrepancy threshold in units");
    select->add_option("--seed", seed, "RNG seed");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run synthetic annotators through the protocol");
    std::string sim_config_path, log_out;
    simulate->add_option("sim_config", sim_config_path, "Simulation config JSON")->required();
    simulate->add_option("--log", log_out, "Write the simulated event log (JSON lines)");

    // export
    auto* exporter = app.add_subcommand("export", "Export CSVs from the event log");
    std::string what;
    exporter->add_option("what", what, "consensus, annotations or thresholds")
        ->required()
        ->check(CLI::IsMember({"consensus", "annotations", "thresholds"}));
    exporter->add_option("-o,--out", out_path, "Output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) {
            const auto config = globals.load();
            auto platform = service::open_platform(config.data_dir, config.protocol);
            const fs::path root = image_root.empty() ? fs::path(manifest_path).parent_path() : fs::path(image_root);
            const auto summary = service::ingest_manifest(*platform, read_text(manifest_path), root);
            std::cout << json{{"n_images", summary.n_images}, {"n_gold", summary.n_gold}}.dump() << '\n';
        } else if (*serve) {
            auto config = globals.load();
            if (!listen.empty()) std::tie(config.listen_host, config.listen_port) = service::parse_listen(listen);
            service::Service service(config);
            service.serve();
        } else if (*ita_compute) {
            const auto config = globals.load();
            const auto thresholds =
                ita_thresholds.empty() ? config.thresholds : ita::thresholds_from_json(json::parse(read_text(ita_thresholds)));
            const auto agg = aggregation == "median" ? ita::Aggregation::Median : config.aggregation;
            std::vector<std::pair<std::string, fs::path>> images;
            if (!ita_manifest.empty()) {
                const fs::path root = image_root.empty() ? fs::path(ita_manifest).parent_path() : fs::path(image_root);
                for (const auto& image : read_manifest(ita_manifest)) images.emplace_back(image.image_id, root / image.file_path);
            } else if (!ita_images.empty()) {
                for (const auto& entry : fs::directory_iterator(ita_images)) {
                    auto ext = entry.path().extension().string();
                    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
                    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") images.emplace_back(entry.path().stem().string(), entry.path());
                }
                std::sort(images.begin(), images.end());
            } else {
                throw Error(ErrorCode::InvalidInput, "give --manifest or --images");
            }
            std::vector<ita::ItaRow> rows;
            for (const auto& [id, path] : images) {
                rows.push_back({id, ita::annotate(ita::load_image(path), thresholds, config.skin_rule, agg)});
            }
            emit(ita::ita_results_csv(rows), out_path);
        } else if (*ita_calibrate) {
            std::map<std::string, double> ita_by_image;
            for (const auto& row : ita::parse_ita_results_csv(read_text(ita_results))) {
                if (row.result.masked_pixel_count > 0) ita_by_image[row.image_id] = row.result.mean_ita_deg;
            }
            const auto experts = manifest_experts(gold_manifest);
            auto pick = [&](const std::string& name, std::size_t fallback) -> const stats::LabelMap& {
                if (name.empty()) {
                    if (experts.size() <= fallback) throw Error(ErrorCode::InvalidInput, "manifest needs two expert columns");
                    return experts[fallback].second;
                }
                for (const auto& [n, labels] : experts)
                    if (n == name) return labels;
                throw Error(ErrorCode::UnknownMethod, "no expert column '" + name + "'");
            };
            const auto result = ita::calibrate_thresholds(ita_by_image, pick(expert_a, 0), pick(expert_b, 1));
            const json doc{{"initial", ita::to_json(result.initial)},
                           {"calibrated", ita::to_json(result.calibrated)},
                           {"offsets", result.offsets},
                           {"initial_concordance", result.initial_concordance},
                           {"final_concordance", result.final_concordance}};
            std::cout << doc.dump(2) << '\n';
            if (!out_path.empty()) emit(ita::to_json(result.calibrated).dump(2), out_path);
        } else if (*irr) {
            stats::MethodLabels methods;
            std::vector<std::string> experts = expert_names;
            if (!report_manifest.empty()) {
                for (auto& method : manifest_experts(report_manifest)) {
                    if (expert_names.empty()) experts.push_back(method.first);
                    methods.push_back(std::move(method));
                }
            }
            for (const auto& spec : method_specs) methods.push_back(load_method(spec));
            const auto result = stats::build_irr_report(methods, experts);
            emit(format == "json" ? stats::to_json(result).dump(2) : stats::to_text(result), "");
        } else if (*confusion) {
            const auto a = load_method(spec_a);
            const auto b = load_method(spec_b);
            const auto pairs = stats::pair_labels(a.second, b.second);
            const auto matrix = stats::confusion_matrix(pairs);
            if (format == "csv") {
                emit(stats::confusion_csv(matrix), "");
            } else if (format == "json") {
                emit(json{{"a", a.first}, {"b", b.first}, {"n_effective", pairs.n_effective()},
                          {"matrix", stats::to_json(matrix)}}.dump(2),
                     "");
            } else {
                emit(a.first + " (rows) vs " + b.first + " (columns)\n" + stats::to_text(matrix), "");
            }
        } else if (*within) {
            const auto a = load_method(spec_a);
            const auto b = load_method(spec_b);
            const auto pairs = stats::pair_labels(a.second, b.second);
            std::cout << json{{"a", a.first}, {"b", b.first}, {"k", k}, {"n_effective", pairs.n_effective()},
                              {"agreement", stats::within_k_agreement(pairs, k)}}
                             .dump()
                      << '\n';
        } else if (*curve) {
            const auto reference = load_method(reference_spec);
            const auto points = stats::bootstrap_crowd_curve(read_pool(pool_path), reference.second, curve_options);
            emit(format == "json" ? stats::to_json(points).dump(2) : stats::to_text(points), "");
        } else if (*select) {
            const auto a = load_method(spec_a);
            const auto b = load_method(spec_b);
            const auto selection = consensus::select_review_set(a.second, b.second, per_stratum, threshold, seed);
            json cells = json::array();
            for (const auto& cell : selection.cells) {
                cells.push_back({{"stratum", std::string(to_string(cell.stratum))},
                                 {"discrepant", cell.discrepant},
                                 {"members", cell.members.size()},
                                 {"selected", cell.selected},
                                 {"short", cell.short_stratum}});
            }
            std::cout << json{{"selected", selection.selected},
                              {"discrepant_count", selection.discrepant.size()},
                              {"total", a.second.size()},
                              {"cells", cells},
                              {"any_short", selection.any_short}}
                             .dump(2)
                      << '\n';
        } else if (*simulate) {
            const auto config = sim::sim_config_from_json(json::parse(read_text(sim_config_path)));
            const auto transcript = sim::run_simulation(config);
            if (!log_out.empty()) {
                std::string lines;
                for (const auto& event : transcript.events) lines += encode_event(event) + "\n";
                emit(lines, log_out);
            }
            std::cout << sim::to_json(transcript.summary).dump(2) << '\n';
        } else if (*exporter) {
            const auto config = globals.load();
            if (what == "thresholds") {
                emit(ita::to_json(config.thresholds).dump(2), out_path);
            } else {
                auto platform = service::open_platform(config.data_dir, config.protocol);
                emit(what == "consensus" ? consensus::consensus_csv(platform->state())
                                         : consensus::annotations_csv(platform->state()),
                     out_path);
            }
        }
    } catch (const Error& e) {
        std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
