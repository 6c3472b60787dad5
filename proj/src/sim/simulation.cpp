#include "skintone/sim/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "skintone/core/error.hpp"
#include "skintone/service/routing.hpp"

namespace skintone::sim {

namespace {

constexpr const char* kSimExpert = "sim-expert";

std::string image_name(int i) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "img%04d", i);
    return buffer;
}

FstLabel emit(const ConfusionKernel& kernel, FstLabel truth, std::mt19937_64& rng) {
    const auto& row = kernel[index_of(truth)];
    std::discrete_distribution<std::size_t> pick(row.begin(), row.end());
    return label_at(pick(rng));
}

bool has_work(const consensus::PlatformState& state, const std::string& annotator_id) {
    for (const auto& [id, image] : state.images) {
        if (image.consensus.status == ImageStatus::Open && image.annotators.count(annotator_id) == 0) return true;
    }
    return false;
}

}  // namespace

ConfusionKernel off_by_one_kernel(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidInput, "match probability must be in [0, 1]");
    ConfusionKernel k{};
    k[0][0] = p;
    for (std::size_t e = 1; e < kLabelCount; ++e) k[0][e] = (1.0 - p) / 6.0;
    for (std::size_t t = 1; t < kLabelCount; ++t) {
        k[t][t] = p;
        if (t == 1) {
            k[t][2] = 1.0 - p;
        } else if (t == kLabelCount - 1) {
            k[t][t - 1] = 1.0 - p;
        } else {
            k[t][t - 1] = k[t][t + 1] = (1.0 - p) / 2.0;
        }
    }
    return k;
}

ConfusionKernel identity_kernel() { return off_by_one_kernel(1.0); }

void AnnotatorSpec::validate() const {
    if (annotator_id.empty()) throw Error(ErrorCode::InvalidInput, "annotator id is empty");
    if (!(arrival_rate > 0.0)) throw Error(ErrorCode::InvalidInput, annotator_id + ": arrival_rate must be positive");
    for (const auto& row : kernel) {
        double sum = 0.0;
        for (double v : row) {
            if (!(v >= 0.0)) throw Error(ErrorCode::InvalidInput, annotator_id + ": negative kernel entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::InvalidInput, annotator_id + ": kernel row does not sum to 1");
    }
}

void SimConfig::validate() const {
    if (!(gold_fraction >= 0.0 && gold_fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "gold_fraction must be in [0, 1]");
    }
    if (n_images < 0) throw Error(ErrorCode::InvalidInput, "n_images must be non-negative");
    if (!(gold_probe_rate >= 0.0 && gold_probe_rate <= 1.0)) {
        throw Error(ErrorCode::InvalidInput, "gold_probe_rate must be in [0, 1]");
    }
    std::set<std::string> ids;
    for (const auto& a : population) {
        a.validate();
        if (!ids.insert(a.annotator_id).second) throw Error(ErrorCode::InvalidInput, "duplicate annotator " + a.annotator_id);
    }
    protocol.validate();
}

nlohmann::json to_json(const SimConfig& config) {
    nlohmann::json population = nlohmann::json::array();
    for (const auto& a : config.population) {
        population.push_back({{"annotator_id", a.annotator_id}, {"arrival_rate", a.arrival_rate}, {"kernel", a.kernel}});
    }
    nlohmann::json truth = nlohmann::json::object();
    for (const auto& [id, label] : config.truth) truth[id] = to_string(label);
    return {{"n_images", config.n_images},
            {"truth", truth},
            {"population", population},
            {"protocol", consensus::to_json(config.protocol)},
            {"gold_fraction", config.gold_fraction},
            {"seed", config.seed},
            {"max_submissions", config.max_submissions},
            {"gold_probe_rate", config.gold_probe_rate}};
}

SimConfig sim_config_from_json(const nlohmann::json& doc) {
    SimConfig config;
    try {
        config.n_images = doc.value("n_images", 0);
        if (doc.contains("truth")) {
            for (const auto& [id, value] : doc.at("truth").items()) {
                const auto label = parse_label(value.get<std::string>());
                if (!label) throw Error(ErrorCode::InvalidInput, "bad truth label for " + id);
                config.truth[id] = *label;
            }
        }
        for (const auto& entry : doc.value("population", nlohmann::json::array())) {
            AnnotatorSpec spec;
            spec.annotator_id = entry.at("annotator_id").get<std::string>();
            spec.arrival_rate = entry.value("arrival_rate", 1.0);
            if (entry.contains("kernel")) {
                spec.kernel = entry.at("kernel").get<ConfusionKernel>();
            } else {
                spec.kernel = off_by_one_kernel(entry.value("match_probability", 0.6));
            }
            config.population.push_back(std::move(spec));
        }
        if (doc.contains("protocol")) config.protocol = consensus::protocol_config_from_json(doc.at("protocol"));
        config.gold_fraction = doc.value("gold_fraction", 0.0);
        config.seed = doc.value("seed", std::uint64_t{0});
        config.max_submissions = doc.value("max_submissions", std::size_t{0});
        config.gold_probe_rate = doc.value("gold_probe_rate", 0.1);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidInput, std::string("simulation config: ") + e.what());
    }
    config.validate();
    return config;
}

nlohmann::json to_json(const SimSummary& s) {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    return {{"n_images", s.n_images},
            {"submissions", s.submissions},
            {"settled", s.settled},
            {"escalated", s.escalated},
            {"halted", s.halted},
            {"settlement_rate", s.settlement_rate},
            {"mean_annotations_to_settle", opt(s.mean_annotations_to_settle)},
            {"truth_agreement", opt(s.truth_agreement)},
            {"qualification",
             {{"NonQualified", s.qualification.non_qualified},
              {"Qualified", s.qualification.qualified},
              {"Disqualified", s.qualification.disqualified}}},
            {"budget_exhausted", s.budget_exhausted}};
}

std::map<std::string, FstLabel> random_truth(int n_images, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(1, 6);
    std::map<std::string, FstLabel> truth;
    for (int i = 0; i < n_images; ++i) truth[image_name(i)] = *from_numeric(pick(rng));
    return truth;
}

Transcript run_simulation(const SimConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);

    Transcript transcript;
    transcript.truth = config.truth.empty() ? random_truth(config.n_images, rng()) : config.truth;
    for (const auto& a : config.population) transcript.population.push_back(a.annotator_id);

    std::vector<std::string> ids;
    for (const auto& [id, label] : transcript.truth) ids.push_back(id);
    const auto n_gold = static_cast<std::size_t>(std::llround(config.gold_fraction * static_cast<double>(ids.size())));
    std::vector<std::string> shuffled = ids;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const std::set<std::string> gold(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(n_gold));

    consensus::Platform platform(config.protocol);
    std::vector<ImageRecord> records;
    for (const auto& id : ids) {
        ImageRecord record;
        record.image_id = id;
        record.file_path = id + ".png";
        record.source = "simulation";
        if (gold.count(id) != 0) {
            record.gold_labels.emplace_back(kSimExpert, transcript.truth.at(id));
            record.is_gold_seed = true;
        }
        records.push_back(std::move(record));
    }
    platform.ingest(std::move(records));

    const std::size_t budget = config.max_submissions != 0 ? config.max_submissions : 50 * ids.size();
    std::size_t submissions = 0;
    std::vector<double> credit(config.population.size(), 0.0);
    std::vector<std::size_t> slots;

    auto any_open = [&] {
        for (const auto& [id, image] : platform.state().images)
            if (image.consensus.status == ImageStatus::Open) return true;
        return false;
    };

    while (!config.population.empty() && any_open()) {
        // One weighted round: credit accrues by arrival rate, whole units become slots.
        const double top = std::max_element(config.population.begin(), config.population.end(),
                                            [](const auto& a, const auto& b) { return a.arrival_rate < b.arrival_rate; })
                               ->arrival_rate;
        slots.clear();
        for (std::size_t i = 0; i < config.population.size(); ++i) {
            credit[i] += config.population[i].arrival_rate / top;
            while (credit[i] >= 1.0 - 1e-12) {
                slots.push_back(i);
                credit[i] -= 1.0;
            }
        }
        std::shuffle(slots.begin(), slots.end(), rng);

        bool progressed = false;
        for (auto i : slots) {
            if (submissions >= budget) break;
            const auto& spec = config.population[i];
            const auto task = service::next_task(platform.state(), spec.annotator_id, config.gold_probe_rate, rng);
            if (!task) continue;
            const auto label = emit(spec.kernel, transcript.truth.at(task->image_id), rng);
            platform.submit_annotation(spec.annotator_id, task->image_id, label);
            ++submissions;
            progressed = true;
        }
        if (submissions >= budget) {
            transcript.budget_exhausted = any_open();
            break;
        }
        if (!progressed) {
            bool anyone = false;
            for (const auto& spec : config.population) anyone = anyone || has_work(platform.state(), spec.annotator_id);
            if (!anyone) break;
        }
    }

    transcript.events = platform.log().events();
    transcript.state = platform.state();
    transcript.summary = summarize(transcript);
    return transcript;
}

SimSummary summarize(const Transcript& transcript) {
    SimSummary s;
    s.n_images = 0;
    s.budget_exhausted = transcript.budget_exhausted;
    std::map<std::string, std::size_t> submitted;
    std::map<std::string, QualificationState> qualification;
    std::vector<std::size_t> to_settle;
    std::size_t correct = 0;
    for (const auto& event : transcript.events) {
        std::visit(
            [&](const auto& p) {
                using T = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<T, DatasetIngested>) {
                    s.n_images += p.images.size();
                } else if constexpr (std::is_same_v<T, AnnotationSubmitted>) {
                    ++s.submissions;
                    ++submitted[p.annotation.image_id];
                } else if constexpr (std::is_same_v<T, ConsensusSettled>) {
                    ++s.settled;
                    to_settle.push_back(submitted[p.image_id]);
                    auto truth = transcript.truth.find(p.image_id);
                    if (truth != transcript.truth.end() && truth->second == p.label) ++correct;
                } else if constexpr (std::is_same_v<T, ImageEscalated>) {
                    ++s.escalated;
                } else if constexpr (std::is_same_v<T, ImageHalted>) {
                    ++s.halted;
                } else if constexpr (std::is_same_v<T, QualificationChanged>) {
                    qualification[p.annotator_id] = p.to;
                }
            },
            event.payload);
    }
    if (s.n_images > 0) s.settlement_rate = static_cast<double>(s.settled) / static_cast<double>(s.n_images);
    if (!to_settle.empty()) {
        double total = 0.0;
        for (auto n : to_settle) total += static_cast<double>(n);
        s.mean_annotations_to_settle = total / static_cast<double>(to_settle.size());
        s.truth_agreement = static_cast<double>(correct) / static_cast<double>(to_settle.size());
    }
    for (const auto& id : transcript.population) {
        auto it = qualification.find(id);
        const auto state = it == qualification.end() ? QualificationState::NonQualified : it->second;
        switch (state) {
            case QualificationState::NonQualified: ++s.qualification.non_qualified; break;
            case QualificationState::Qualified: ++s.qualification.qualified; break;
            case QualificationState::Disqualified: ++s.qualification.disqualified; break;
        }
    }
    return s;
}

stats::AnnotationPool simulate_pool(const std::map<std::string, FstLabel>& truth,
                                    const std::vector<AnnotatorSpec>& population, int per_image, std::uint64_t seed) {
    if (population.empty()) throw Error(ErrorCode::InvalidInput, "population is empty");
    if (per_image < 1) throw Error(ErrorCode::InvalidInput, "per_image must be positive");
    for (const auto& a : population) a.validate();
    std::mt19937_64 rng(seed);
    std::vector<double> rates;
    for (const auto& a : population) rates.push_back(a.arrival_rate);
    std::discrete_distribution<std::size_t> who(rates.begin(), rates.end());
    stats::AnnotationPool pool;
    for (const auto& [id, label] : truth) {
        auto& labels = pool[id];
        for (int k = 0; k < per_image; ++k) labels.push_back(emit(population[who(rng)].kernel, label, rng));
    }
    return pool;
}

}  // namespace skintone::sim
