#include <doctest.h>

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "../support/temp_dir.hpp"
#include "skintone/core/csv.hpp"
#include "skintone/ita/image_io.hpp"

using namespace skintone;
namespace fs = std::filesystem;

namespace {

struct Run {
    int status = -1;
    std::string out;
};

Run run(const std::string& args) {
    Run result;
    const std::string command = std::string(SKINTONE_CLI) + " " + args + " 2>&1";
    FILE* pipe = ::popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buffer[4096];
    std::size_t n = 0;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) result.out.append(buffer, n);
    const int raw = ::pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("command line workflow") {
    testing::TempDir dir("skintone-cli");
    const ita::Rgb8 shades[] = {{235, 200, 180}, {220, 180, 150}, {200, 150, 120},
                                {170, 120, 90},  {130, 90, 70},   {110, 80, 70}};
    std::string manifest = "image_id,file_path,source,expert1,expert2\n";
    std::string crowd = "image_id,label\n";
    for (int i = 0; i < 36; ++i) {
        const auto id = "im" + std::to_string(100 + i);
        ita::save_image(ita::Raster(6, 6, shades[i % 6]), dir / (id + ".png"));
        const int truth = 1 + i % 6;
        manifest += id + "," + id + ".png,synthetic," + std::to_string(truth) + "," +
                    std::to_string(i % 5 == 0 ? std::min(truth + 1, 6) : truth) + "\n";
        for (int k = 0; k < 4; ++k) crowd += id + "," + std::to_string(std::clamp(truth + (k % 3) - 1, 1, 6)) + "\n";
    }
    write_file(dir / "manifest.csv", manifest);
    write_file(dir / "crowd.csv", crowd);
    const auto d = dir.path().string();

    auto r = run("-d " + d + "/data ingest " + d + "/manifest.csv");
    CHECK(r.status == 0);
    CHECK(nlohmann::json::parse(r.out) == nlohmann::json{{"n_images", 36}, {"n_gold", 36}});
    r = run("ingest " + d + "/manifest.csv -d " + d + "/data");
    CHECK(r.status == 2);
    CHECK(r.out.find("DuplicateImage") != std::string::npos);

    r = run("ita compute --manifest " + d + "/manifest.csv -o " + d + "/ita.csv");
    REQUIRE(r.status == 0);
    const auto ita_table = csv::read_file(dir / "ita.csv");
    CHECK(ita_table.rows.size() == 36);

    r = run("ita calibrate --ita " + d + "/ita.csv --gold " + d + "/manifest.csv -o " + d + "/th.json");
    REQUIRE(r.status == 0);
    const auto calibration = nlohmann::json::parse(r.out);
    CHECK(calibration["final_concordance"].get<int>() >= calibration["initial_concordance"].get<int>());
    CHECK(fs::exists(dir / "th.json"));

    r = run("report irr --manifest " + d + "/manifest.csv -m crowd=" + d + "/crowd_labels.csv --format json");
    CHECK(r.status != 0);
    write_file(dir / "crowd_labels.csv", "image_id,label\n" + [&] {
        std::string rows;
        for (int i = 0; i < 36; ++i) rows += "im" + std::to_string(100 + i) + "," + std::to_string(1 + (i + i / 9) % 6) + "\n";
        return rows;
    }());
    r = run("report irr --manifest " + d + "/manifest.csv -m crowd=" + d + "/crowd_labels.csv --format json");
    REQUIRE(r.status == 0);
    const auto irr = nlohmann::json::parse(r.out);
    CHECK(irr["methods"] == nlohmann::json{"expert1", "expert2", "crowd"});
    CHECK(irr["min_p"].size() == 2);
    for (const auto& row : irr["min_p"]) CHECK(row["method"] == "crowd");
    r = run("report confusion -a e=" + d + "/crowd_labels.csv -b c=" + d + "/crowd_labels.csv --format csv");
    CHECK(r.out.rfind("a\\b,NA,I,II,III,IV,V,VI", 0) == 0);
    r = run("report within-k -a " + d + "/crowd_labels.csv -b " + d + "/crowd_labels.csv -k 0");
    CHECK(nlohmann::json::parse(r.out)["agreement"] == 1.0);
    r = run("report crowd-curve --pool " + d + "/crowd.csv --reference " + d + "/crowd_labels.csv --sizes 1,2,4 --format json");
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out).size() == 3);
    r = run("report crowd-curve --pool " + d + "/crowd.csv --reference " + d + "/crowd_labels.csv --sizes 3,96");
    CHECK(r.status == 2);
    CHECK(r.out.find("PoolTooSmall") != std::string::npos);

    r = run("review select -a " + d + "/crowd_labels.csv -b " + d + "/crowd_labels.csv -n 2 --seed 3");
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out)["selected"].size() == 12);

    write_file(dir / "sim.json", R"({"n_images": 20, "gold_fraction": 0.5, "seed": 1,
        "population": [{"annotator_id": "s1", "match_probability": 1.0}, {"annotator_id": "s2", "match_probability": 1.0},
                       {"annotator_id": "s3", "match_probability": 1.0}, {"annotator_id": "s4", "match_probability": 1.0}],
        "protocol": {"qual_min_scored": 3}})");
    r = run("simulate " + d + "/sim.json --log " + d + "/sim.jsonl");
    REQUIRE(r.status == 0);
    CHECK(nlohmann::json::parse(r.out)["truth_agreement"] == 1.0);
    CHECK(fs::file_size(dir / "sim.jsonl") > 0);

    r = run("export annotations -d " + d + "/data");
    CHECK(r.out == "image_id,annotator_id,label,seq,qualified\n");
    r = run("export consensus -d " + d + "/data -o " + d + "/consensus.csv");
    CHECK(csv::read_file(dir / "consensus.csv").rows.size() == 36);
    CHECK(run("bogus").status != 0);
}
