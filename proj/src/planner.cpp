#include "lorasim/planner.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <string>

#include <json.hpp>

#include "lorasim/error.hpp"

namespace lorasim {

double resolve_outage_target(const QualityTarget& target, const std::vector<EvaluationResult>& corpus) {
    if (!(target.household_quantile >= 0.0 && target.household_quantile <= 1.0)) {
        throw ConfigError("household quantile must be in [0, 1]");
    }
    if (!(target.max_cv_rmse >= 0.0)) throw ConfigError("CV(RMSE) bound must be nonnegative");

    std::map<double, std::vector<double>> by_outage;
    for (const auto& r : corpus) {
        if (r.strategy == target.strategy) by_outage[r.outage_probability].push_back(r.mean());
    }
    if (by_outage.empty()) {
        throw ConfigError("evaluation corpus has no results for the " + std::string(to_string(target.strategy)) +
                          " strategy");
    }

    double prev_outage = 0.0;
    double prev_error = 0.0;
    bool first = true;
    for (const auto& [outage, values] : by_outage) {
        const double error = percentile(values, target.household_quantile);
        if (error > target.max_cv_rmse) {
            if (first) {
                throw InfeasibleError("CV(RMSE) bound " + std::to_string(target.max_cv_rmse) +
                                      " not met even at outage " + std::to_string(outage));
            }
            const double w = (target.max_cv_rmse - prev_error) / (error - prev_error);
            return prev_outage + w * (outage - prev_outage);
        }
        prev_outage = outage;
        prev_error = error;
        first = false;
    }
    return prev_outage;
}

namespace {

double avg_outage_at(LinkParams p, double r, const SfTable& table) {
    p.r = r;
    return avg_outage(p, table);
}

}  // namespace

PlanResult max_range(double target_outage, const LinkParams& params, const SfTable& table, double range_tolerance) {
    if (!(target_outage > 0.0 && target_outage < 1.0)) {
        throw DomainError("target outage must be in (0, 1)");
    }
    if (!(range_tolerance > 0.0)) throw DomainError("range tolerance must be positive");
    LinkParams p = params;
    p.r = 0.0;
    p.validate();

    double lo = 0.0;
    double hi = 1.0;
    int iterations = 0;
    while (avg_outage_at(p, hi, table) <= target_outage) {
        lo = hi;
        hi *= 2.0;
        if (++iterations > 64) throw DomainError("average outage never exceeds the target; range is unbounded");
    }
    for (int i = 0; i < 200; ++i, ++iterations) {
        const double f_lo = avg_outage_at(p, lo, table);
        const double f_hi = avg_outage_at(p, hi, table);
        if (hi - lo <= range_tolerance && f_hi - f_lo <= kOutageTolerance) break;
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (avg_outage_at(p, mid, table) <= target_outage ? lo : hi) = mid;
    }

    PlanResult result;
    result.max_range_km = lo;
    result.target_outage = target_outage;
    result.iterations = iterations;
    p.r = lo;
    for (const auto sf : SpreadingFactor::all()) result.per_sf_outage[sf.slot()] = total_outage(sf, p, table);
    result.avg_outage = avg_outage(p, table);
    result.avg_effective_bitrate_kbps = avg_effective_bitrate(p, table);
    return result;
}

PlanResult plan(const PlanRequest& request, const SfTable& table, const std::vector<EvaluationResult>& corpus) {
    double target = 0.0;
    if (const auto* direct = std::get_if<OutageTarget>(&request.target)) {
        target = direct->max_outage;
    } else {
        if (corpus.empty()) throw ConfigError("a quality target needs evaluation results");
        target = resolve_outage_target(std::get<QualityTarget>(request.target), corpus);
        if (!(target > 0.0)) throw InfeasibleError("quality target resolves to zero outage; no positive range");
    }
    return max_range(target, request.params, table);
}

void write_plan_json(std::ostream& out, const PlanResult& result) {
    nlohmann::ordered_json per_sf;
    for (const auto sf : SpreadingFactor::all()) {
        per_sf["sf" + std::to_string(sf.index())] = result.per_sf_outage[sf.slot()];
    }
    nlohmann::ordered_json j;
    j["max_range_km"] = result.max_range_km;
    j["target_outage"] = result.target_outage;
    j["per_sf_outage"] = per_sf;
    j["avg_effective_bitrate_kbps"] = result.avg_effective_bitrate_kbps;
    out << j.dump(2) << '\n';
}

}  // namespace lorasim
