#include <doctest.h>

#include <json.hpp>
#include <sstream>

#include "lorasim/error.hpp"
#include "lorasim/planner.hpp"
#include "oracle.hpp"

using namespace lorasim;

namespace {

const SfTable kTable = SfTable::lora_default();

LinkParams densities(double lambda_sf, double lambda_i) {
    LinkParams p;
    p.lambda_sf = lambda_sf;
    p.lambda_i = lambda_i;
    return p;
}

EvaluationResult result(std::string id, Strategy s, double outage, double cv) {
    EvaluationResult r;
    r.household_id = std::move(id);
    r.strategy = s;
    r.outage_probability = outage;
    r.cv_rmse_samples = {cv};
    r.runs = 1;
    return r;
}

// Ten households whose event-based CV(RMSE) grows linearly with outage.
std::vector<EvaluationResult> corpus() {
    std::vector<EvaluationResult> out;
    for (int h = 0; h < 10; ++h) {
        for (const double p : {0.0, 0.1, 0.2, 0.3}) {
            out.push_back(result("h" + std::to_string(h), Strategy::event, p, 1.0 + h * 0.1 + 10.0 * p));
            out.push_back(result("h" + std::to_string(h), Strategy::time, p, 3.0 + h * 0.1 + 2.0 * p));
        }
    }
    return out;
}

}  // namespace

TEST_CASE("max_range") {
    const auto sparse = densities(0.5, 0.05);
    const auto r30 = max_range(0.30, sparse, kTable);
    CHECK(r30.max_range_km == doctest::Approx(oracle::kRangeTarget030).epsilon(1e-6));
    CHECK(r30.avg_outage <= 0.30 + 1e-12);
    CHECK(r30.target_outage == 0.30);

    CHECK(max_range(0.695, sparse, kTable).max_range_km == doctest::Approx(oracle::kRangeTarget0695).epsilon(1e-6));
    CHECK(max_range(1e-9, sparse, kTable).max_range_km < 1e-3);

    CHECK_THROWS_AS(max_range(0.0, sparse, kTable), DomainError);
    CHECK_THROWS_AS(max_range(1.0, sparse, kTable), DomainError);
    CHECK_THROWS_AS(max_range(0.3, densities(0.0, 0.0), kTable), DomainError);
}

TEST_CASE("inversion consistency") {
    const LinkParams p;
    for (double t = 0.011; t < 0.99; t += 0.0317) {
        const auto res = max_range(t, p, kTable);
        LinkParams at = p;
        at.r = res.max_range_km;
        CHECK(std::abs(avg_outage(at, kTable) - t) <= 1e-6);
    }
}

TEST_CASE("range monotonicity") {
    double prev = 0.0;
    for (const double t : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const double r = max_range(t, LinkParams{}, kTable).max_range_km;
        CHECK(r >= prev);
        prev = r;
    }
    for (const double lsf : {0.5, 1.0, 2.0}) {
        CHECK(max_range(0.3, densities(lsf * 2, 0.05), kTable).max_range_km <=
              max_range(0.3, densities(lsf, 0.05), kTable).max_range_km);
        CHECK(max_range(0.3, densities(1.0, lsf * 0.2), kTable).max_range_km <=
              max_range(0.3, densities(1.0, lsf * 0.1), kTable).max_range_km);
    }
}

TEST_CASE("resolve_outage_target") {
    const auto c = corpus();
    // event 90th percentile at outage p: 1.0 + 0.81 + 10 p (percentile of 1.0..1.9 = 1.81)
    QualityTarget t{2.81, 0.9, Strategy::event};
    CHECK(resolve_outage_target(t, c) == doctest::Approx(0.1));
    t.max_cv_rmse = 3.31;
    CHECK(resolve_outage_target(t, c) == doctest::Approx(0.15));
    t.max_cv_rmse = 100.0;
    CHECK(resolve_outage_target(t, c) == 0.3);
    t.max_cv_rmse = 1.5;
    CHECK_THROWS_AS(resolve_outage_target(t, c), InfeasibleError);

    QualityTarget none{4.0, 0.9, Strategy::time};
    CHECK_THROWS_AS(resolve_outage_target(none, {result("a", Strategy::event, 0.0, 1.0)}), ConfigError);
}

TEST_CASE("plan") {
    PlanRequest direct{densities(0.5, 0.05), OutageTarget{0.3}};
    CHECK(plan(direct, kTable).max_range_km == doctest::Approx(oracle::kRangeTarget030).epsilon(1e-6));

    PlanRequest quality{densities(0.5, 0.05), QualityTarget{4.81, 0.9, Strategy::event}};
    CHECK_THROWS_AS(plan(quality, kTable), ConfigError);
    const auto res = plan(quality, kTable, corpus());
    CHECK(res.target_outage == doctest::Approx(0.3));
    CHECK(res.max_range_km == doctest::Approx(oracle::kRangeTarget030).epsilon(1e-6));

    // bound met exactly at zero outage only
    PlanRequest zero{densities(0.5, 0.05), QualityTarget{1.0, 0.9, Strategy::event}};
    const std::vector<EvaluationResult> tight{result("a", Strategy::event, 0.0, 1.0),
                                              result("a", Strategy::event, 0.1, 2.0)};
    CHECK_THROWS_AS(plan(zero, kTable, tight), InfeasibleError);
}

TEST_CASE("plan JSON") {
    std::ostringstream out;
    write_plan_json(out, max_range(0.3, densities(0.5, 0.05), kTable));
    const auto j = nlohmann::json::parse(out.str());
    CHECK(j.at("max_range_km").get<double>() == doctest::Approx(oracle::kRangeTarget030).epsilon(1e-6));
    CHECK(j.at("target_outage").get<double>() == 0.3);
    CHECK(j.at("per_sf_outage").size() == 6);
    CHECK(j.at("per_sf_outage").at("sf7").get<double>() > j.at("per_sf_outage").at("sf12").get<double>());
    CHECK(j.at("avg_effective_bitrate_kbps").get<double>() > 0.0);
}
