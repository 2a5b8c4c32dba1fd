#include <doctest.h>

#include <fstream>
#include <iterator>
#include <json.hpp>
#include <sstream>

#include "lorasim/cli.hpp"
#include "lorasim/dataio.hpp"
#include "oracle.hpp"

using lorasim::cli::run;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

std::vector<std::string> csv_row(const std::string& text, std::size_t index) {
    std::istringstream in(text);
    std::string line;
    for (std::size_t i = 0; i <= index; ++i) std::getline(in, line);
    std::vector<std::string> out;
    std::istringstream fields(line);
    for (std::string f; std::getline(fields, f, ',');) out.push_back(f);
    return out;
}

}  // namespace

TEST_CASE("link") {
    const auto dir = oracle::scratch("link");
    const auto out = (dir / "sweep.csv").string();
    CHECK(run({"link", "--axis", "lambda_sf", "--from", "0", "--to", "4", "--points", "41", "-o", out}) == 0);
    const auto text = slurp(out);
    CHECK(lines(text) == 42);
    CHECK(text.rfind("axis_value,sf7,sf8,sf9,sf10,sf11,sf12,average\n", 0) == 0);

    CHECK(run({"link", "--axis", "r", "--from", "0", "--to", "5", "--points", "51", "--lambda-sf", "0.5", "-o", out}) == 0);
    const auto row = csv_row(slurp(out), 41);  // r = 4
    REQUIRE(row.size() == 8);
    CHECK(std::stod(row[0]) == doctest::Approx(4.0));
    CHECK(std::stod(row[7]) == doctest::Approx(oracle::kAvgLsf05Li005R4).epsilon(1e-12));

    CHECK(run({"link", "--axis", "bogus"}) == 2);
    CHECK(run({"link", "--alpha", "1.5"}) == 2);
    CHECK(run({"link", "--k-variant", "nope"}) == 2);
    CHECK(run({"link", "--grid", "1,x"}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    CHECK(run({}) == 2);
    CHECK(run({"--help"}) == 0);
}

TEST_CASE("config file with flag override") {
    const auto dir = oracle::scratch("config");
    const auto cfg = dir / "run.ini";
    std::ofstream(cfg) << "[link]\naxis=r\ngrid=4\nlambda-sf=0.5\n";
    const auto out = (dir / "a.csv").string();
    CHECK(run({"--config", cfg.string(), "link", "-o", out}) == 0);
    CHECK(std::stod(csv_row(slurp(out), 1)[7]) == doctest::Approx(oracle::kAvgLsf05Li005R4).epsilon(1e-12));
    CHECK(run({"--config", cfg.string(), "link", "--grid", "1.5", "-o", out}) == 0);
    CHECK(std::stod(csv_row(slurp(out), 1)[0]) == 1.5);
}

TEST_CASE("validate") {
    const auto dir = oracle::scratch("validate");
    const auto out = (dir / "v.csv").string();
    CHECK(run({"validate", "--lambda-sf-grid", "", "-o", out}) == 0);
    CHECK(slurp(out) == "lambda_sf,lambda_i,r,sf,closed_canonical,closed_printed,empirical,ci95,pass_canonical,pass_printed\n");
    CHECK(run({"validate", "--trials", "0"}) == 2);
    CHECK(run({"validate", "--sfs", "6"}) == 2);
    CHECK(run({"validate", "--lambda-sf-grid", "1", "--lambda-i-grid", "0.05", "--r-grid", "1.5", "--trials", "3000",
               "-o", out}) == 0);
    CHECK(lines(slurp(out)) == 3);
}

TEST_CASE("gen-synthetic, sample, evaluate, plan") {
    const auto dir = oracle::scratch("pipeline");
    const auto corpus = (dir / "corpus").string();
    CHECK(run({"gen-synthetic", "--households", "3", "--days", "1", "--seed", "4", "-o", corpus}) == 0);

    const auto time_csv = (dir / "time.csv").string();
    CHECK(run({"sample", "--corpus", corpus, "--strategy", "time", "-o", time_csv}) == 0);
    CHECK(lines(slurp(time_csv)) == 1 + 3 * 48);

    SUBCASE("event sampling on a constant 1 kW household") {
        const auto flat = dir / "flat";
        lorasim::SyntheticLoadConfig cfg;
        cfg.base_load = 1.0;
        cfg.events_per_day = 0.0;
        cfg.diurnal_amplitude = 0.0;
        lorasim::write_corpus(flat, lorasim::generate_synthetic(cfg, 1, 1).series);
        const auto ev = (dir / "event.csv").string();
        const auto log = (dir / "log.csv").string();
        CHECK(run({"sample", "--corpus", flat.string(), "--strategy", "event", "-o", ev, "--log", log}) == 0);
        CHECK(lines(slurp(ev)) == 1 + 13);
        CHECK(lines(slurp(log)) == 2);
    }
    SUBCASE("bad corpus") {
        const auto bad = dir / "bad";
        std::filesystem::create_directories(bad);
        std::ofstream(bad / "x.csv") << "timestamp,household_id,power_kw\n2016-10-03T00:00:00Z,h,-1\n";
        CHECK(run({"sample", "--corpus", bad.string()}) == 2);
        CHECK(run({"sample"}) == 2);
    }

    const auto results = (dir / "results.csv").string();
    const auto report = (dir / "report.csv").string();
    const auto diffs = (dir / "diff.csv").string();
    CHECK(run({"evaluate", "--corpus", corpus, "--runs", "5", "--seed", "3", "-o", results, "--report", report,
               "--differences", diffs}) == 0);
    CHECK(lines(slurp(results)) == 1 + 3 * 2 * 4 * 5);
    CHECK(lines(slurp(report)) == 1 + 4 * 3);
    CHECK(lines(slurp(diffs)) == 1 + 4);
    CHECK(run({"evaluate", "--corpus", corpus, "--runs", "0"}) == 2);

    const auto plan = (dir / "plan.json").string();
    CHECK(run({"plan", "--target-outage", "0.30", "--lambda-sf", "0.5", "--lambda-i", "0.05", "-o", plan}) == 0);
    const auto j = nlohmann::json::parse(slurp(plan));
    CHECK(j.at("max_range_km").get<double>() == doctest::Approx(oracle::kRangeTarget030).epsilon(1e-6));

    CHECK(run({"plan", "--target-outage", "0"}) == 2);
    CHECK(run({"plan", "--max-cv-rmse", "4"}) == 2);
    CHECK(run({"plan"}) == 2);
    CHECK(run({"plan", "--max-cv-rmse", "1000", "--evaluation", results, "--lambda-sf", "0.5", "-o", plan}) == 0);
    CHECK(nlohmann::json::parse(slurp(plan)).at("target_outage").get<double>() == doctest::Approx(0.3));
    // unreachable quality bound is a runtime failure, not a usage error
    CHECK(run({"plan", "--max-cv-rmse", "0", "--evaluation", results}) == 1);
}
