#pragma once

// Largest gateway range whose average outage stays within a target, where the
// target comes either directly or from a CV(RMSE) quality bound.

#include <array>
#include <iosfwd>
#include <variant>
#include <vector>

#include "lorasim/link_model.hpp"
#include "lorasim/reconstruction.hpp"

namespace lorasim {

struct OutageTarget {
    double max_outage;
};

struct QualityTarget {
    double max_cv_rmse = 4.0;
    double household_quantile = 0.9;
    Strategy strategy = Strategy::event;
};

struct PlanRequest {
    LinkParams params;  ///< r is ignored
    std::variant<OutageTarget, QualityTarget> target;
};

struct PlanResult {
    double max_range_km = 0.0;
    double target_outage = 0.0;
    std::array<double, SpreadingFactor::kCount> per_sf_outage{};
    double avg_outage = 0.0;
    double avg_effective_bitrate_kbps = 0.0;
    int iterations = 0;
};

/// Largest outage level at which the chosen household quantile of mean
/// CV(RMSE) stays within the bound, interpolating linearly between grid
/// levels and saturating at the largest level. Throws InfeasibleError when
/// the bound fails already at the smallest level, ConfigError when the
/// corpus has no results for the strategy.
double resolve_outage_target(const QualityTarget& target, const std::vector<EvaluationResult>& corpus);

inline constexpr double kRangeTolerance = 1e-4;    ///< km
inline constexpr double kOutageTolerance = 1e-10;  ///< on avg_outage at the answer

/// Bisection on r (avg_outage is strictly increasing in r when any density is
/// positive). The returned range satisfies avg_outage <= target.
/// Throws DomainError for targets outside (0, 1) or when no range reaches the
/// target (all densities zero).
PlanResult max_range(double target_outage, const LinkParams& params, const SfTable& table,
                     double range_tolerance = kRangeTolerance);

/// `corpus` is only consulted for quality targets; throws ConfigError if it is
/// needed and empty.
PlanResult plan(const PlanRequest& request, const SfTable& table, const std::vector<EvaluationResult>& corpus = {});

/// `{max_range_km, target_outage, per_sf_outage: {sf7..sf12}, avg_effective_bitrate_kbps}`
void write_plan_json(std::ostream& out, const PlanResult& result);

}  // namespace lorasim
