#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "lorasim/dataio.hpp"
#include "lorasim/error.hpp"
#include "lorasim/reconstruction.hpp"

using namespace lorasim;
using std::chrono::minutes;

namespace {

PowerSeries series_of(std::vector<double> values, std::string id = "h") {
    PowerSeries s;
    s.household_id = std::move(id);
    s.start = std::chrono::sys_days{std::chrono::year{2016} / 10 / 3};
    s.values = std::move(values);
    return s;
}

SampleSet samples_at(std::initializer_list<std::pair<std::size_t, double>> pts) {
    SampleSet s;
    s.household_id = "h";
    for (const auto& [slot, p] : pts) s.samples.push_back({slot, p, Trigger::time});
    return s;
}

}  // namespace

TEST_CASE("apply_loss") {
    SampleSet many;
    for (std::size_t i = 0; i < 10'000; ++i) many.samples.push_back({i, 1.0, Trigger::time});

    CHECK(apply_loss(many, {0.0, 1}).samples == many.samples);
    CHECK(apply_loss(many, {1.0, 1}).size() == 0);

    const auto kept = apply_loss(many, {0.3, 12345});
    CHECK(kept.size() >= 6816);
    CHECK(kept.size() <= 7184);
    for (std::size_t k = 1; k < kept.size(); ++k) CHECK(kept.samples[k].slot_index > kept.samples[k - 1].slot_index);
    CHECK(apply_loss(many, {0.3, 12345}).samples == kept.samples);
    CHECK_THROWS_AS(apply_loss(many, {1.5, 1}), DomainError);
}

TEST_CASE("reconstruct") {
    const auto grid = series_of(std::vector<double>(13, 0.0));

    SUBCASE("midpoint") {
        const auto r = reconstruct(samples_at({{0, 1.0}, {12, 3.0}}), grid);
        CHECK_FALSE(r.empty);
        CHECK(r.series.values[6] == doctest::Approx(2.0));
        CHECK(r.series.values[0] == 1.0);
        CHECK(r.series.values[12] == 3.0);
    }
    SUBCASE("hold at the edges") {
        const auto r = reconstruct(samples_at({{4, 2.0}, {8, 6.0}}), grid);
        for (std::size_t i = 0; i <= 4; ++i) CHECK(r.series.values[i] == 2.0);
        CHECK(r.series.values[6] == doctest::Approx(4.0));
        for (std::size_t i = 8; i < 13; ++i) CHECK(r.series.values[i] == 6.0);
    }
    SUBCASE("empty input") {
        const auto r = reconstruct(SampleSet{}, grid);
        CHECK(r.empty);
        for (const double v : r.series.values) CHECK(v == 0.0);
    }
    SUBCASE("identity sampling reproduces the original") {
        const auto original = series_of({0.3, 1.2, 0.0, 5.5, 2.25, 0.7});
        const auto r = reconstruct(time_sample(original, minutes(10)), original);
        CHECK(r.series.values == original.values);
    }
    SUBCASE("piecewise linear between 30-minute knots") {
        std::vector<double> knots{0.5, 2.0, 1.0, 4.0, 0.25, 3.0, 3.0};
        std::vector<double> v;
        for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
            for (int j = 0; j < 3; ++j) v.push_back(knots[k] + (knots[k + 1] - knots[k]) * j / 3.0);
        }
        v.push_back(knots.back());
        v.push_back(knots.back());
        v.push_back(knots.back());
        const auto original = series_of(v);
        const auto r = reconstruct(time_sample(original, minutes(30)), original);
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(r.series.values[i] == doctest::Approx(v[i]).epsilon(1e-14));
        CHECK(cv_rmse(original, r.series) < 1e-14);
    }
}

TEST_CASE("daily reconstruction uses only the day's samples") {
    PowerSeries two_days = series_of(std::vector<double>(288, 0.0));
    const auto r = reconstruct_daily(samples_at({{10, 1.0}, {150, 5.0}}), two_days);
    for (std::size_t i = 0; i < 144; ++i) CHECK(r.series.values[i] == 1.0);
    for (std::size_t i = 144; i < 288; ++i) CHECK(r.series.values[i] == 5.0);

    const auto partial = reconstruct_daily(samples_at({{10, 1.0}}), two_days);
    CHECK_FALSE(partial.empty);
    CHECK(partial.series.values[200] == 0.0);
}

TEST_CASE("cv_rmse") {
    const auto a = series_of({1, 2, 3, 4});
    CHECK(cv_rmse(a, a) == 0.0);
    CHECK(cv_rmse(a, series_of({1, 2, 3, 8})) == doctest::Approx(0.8));
    CHECK(cv_rmse(series_of({2, 2, 2}), series_of({2.5, 2.5, 2.5})) == doctest::Approx(0.25));
    CHECK_THROWS_AS(cv_rmse(series_of({0, 0}), series_of({1, 1})), DomainError);
    CHECK_THROWS_AS(cv_rmse(a, series_of({1, 2})), DomainError);

    for (const double c : {0.1, 1.0, 10.0}) {
        std::vector<double> x{1, 2, 3, 4}, y{1.5, 2, 2, 8};
        for (auto& v : x) v *= c;
        for (auto& v : y) v *= c;
        CHECK(cv_rmse(series_of(x), series_of(y)) == doctest::Approx(cv_rmse(a, series_of({1.5, 2, 2, 8}))).epsilon(1e-13));
    }
}

TEST_CASE("percentiles") {
    CHECK(percentile({3.0}, 0.9) == 3.0);
    CHECK(percentile({1, 2, 3, 4, 5}, 0.5) == 3.0);
    CHECK(percentile({1, 2, 3, 4, 5}, 0.25) == 2.0);
    CHECK(percentile({0, 10}, 0.9) == doctest::Approx(9.0));
    CHECK_THROWS_AS(percentile({}, 0.5), DomainError);
}

TEST_CASE("evaluate") {
    SyntheticLoadConfig cfg;
    cfg.seed = 8;
    const auto corpus = generate_synthetic(cfg, 3, 2);
    const auto& s = corpus.series[0];
    const auto samples = time_sample(s, minutes(30));

    SUBCASE("zero outage has zero spread") {
        const auto res = evaluate(s, samples, {0.0}, 5, 1);
        REQUIRE(res.size() == 1);
        CHECK(res[0].runs == 5);
        CHECK(res[0].summary.min == res[0].summary.max);
    }
    SUBCASE("constant household, event sampling, no loss") {
        const auto flat = series_of(std::vector<double>(144, 0.8));
        const auto res = evaluate(flat, event_sample(flat, EventThresholds{}), {0.0}, 3, 1);
        for (const double v : res[0].cv_rmse_samples) CHECK(v == 0.0);
    }
    SUBCASE("deterministic and worker-count independent") {
        const auto a = evaluate(s, samples, kDefaultOutageGrid, 20, 77, 1);
        const auto b = evaluate(s, samples, kDefaultOutageGrid, 20, 77, 8);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].cv_rmse_samples == b[i].cv_rmse_samples);
    }
    SUBCASE("scaling the household leaves CV(RMSE) unchanged") {
        PowerSeries scaled = s;
        for (auto& v : scaled.values) v *= 10.0;
        const auto a = evaluate(s, time_sample(s, minutes(30)), {0.2}, 10, 3);
        const auto b = evaluate(scaled, time_sample(scaled, minutes(30)), {0.2}, 10, 3);
        for (std::size_t i = 0; i < 10; ++i) {
            CHECK(a[0].cv_rmse_samples[i] == doctest::Approx(b[0].cv_rmse_samples[i]).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(evaluate(s, samples, {0.0}, 0, 1), ConfigError);
    CHECK_THROWS_AS(evaluate(s, samples, {1.2}, 1, 1), ConfigError);
}

TEST_CASE("corpus report") {
    auto result = [](std::string id, Strategy st, double p, std::vector<double> v) {
        EvaluationResult r;
        r.household_id = std::move(id);
        r.strategy = st;
        r.outage_probability = p;
        r.cv_rmse_samples = std::move(v);
        r.runs = r.cv_rmse_samples.size();
        return r;
    };
    SUBCASE("single household collapses the bands") {
        const auto rep = corpus_report({result("a", Strategy::time, 0.1, {0.5, 0.7})});
        REQUIRE(rep.bands.size() == 1);
        const auto& b = rep.bands[0].bands;
        CHECK(b.min == doctest::Approx(0.6));
        CHECK(b.p10 == b.max);
        CHECK(b.p50 == b.p90);
        CHECK(rep.differences.empty());
    }
    SUBCASE("two identical households") {
        const auto rep = corpus_report({result("a", Strategy::event, 0.0, {0.4}), result("b", Strategy::event, 0.0, {0.4})});
        REQUIRE(rep.bands.size() == 1);
        CHECK(rep.bands[0].bands.min == rep.bands[0].bands.max);
    }
    SUBCASE("difference sign: positive means event-based is better") {
        const auto rep = corpus_report({result("a", Strategy::time, 0.1, {1.0}), result("a", Strategy::event, 0.1, {0.4}),
                                        result("b", Strategy::time, 0.1, {0.3}), result("b", Strategy::event, 0.1, {0.5})});
        REQUIRE(rep.differences.size() == 1);
        CHECK(rep.differences[0].households == 2);
        CHECK(rep.differences[0].fraction_event_better == 0.5);
        const auto diff = std::find_if(rep.bands.begin(), rep.bands.end(),
                                       [](const BandRow& r) { return r.strategy == "time_minus_event"; });
        REQUIRE(diff != rep.bands.end());
        CHECK(diff->bands.max == doctest::Approx(0.6));
        CHECK(diff->bands.min == doctest::Approx(-0.2));
    }
}

TEST_CASE("evaluation CSV round trip") {
    EvaluationResult r;
    r.household_id = "h0007";
    r.strategy = Strategy::event;
    r.outage_probability = 0.2;
    r.cv_rmse_samples = {0.125, 0.3333333333333333, 1e-17};
    r.runs = 3;
    std::stringstream io;
    write_evaluation_csv_header(io);
    write_evaluation_csv_rows(io, r);
    const auto back = read_evaluation_csv(io);
    REQUIRE(back.size() == 1);
    CHECK(back[0].household_id == "h0007");
    CHECK(back[0].strategy == Strategy::event);
    CHECK(back[0].outage_probability == 0.2);
    CHECK(back[0].cv_rmse_samples == r.cv_rmse_samples);

    std::istringstream bad("household_id,strategy,outage,run,cv_rmse\nh,zigzag,0.1,0,1\n");
    CHECK_THROWS_AS(read_evaluation_csv(bad), LoadError);
}
