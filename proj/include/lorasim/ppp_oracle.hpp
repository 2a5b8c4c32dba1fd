#pragma once

// Monte Carlo realization of the interference field behind the closed-form
// outage: PPP interferers on a disk around the gateway, unit-mean Rayleigh
// power gains, r^-alpha path loss, no noise.

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "lorasim/link_model.hpp"
#include "lorasim/rng.hpp"

namespace lorasim {

struct Point {
    double x;
    double y;
};

/// Draws a homogeneous PPP on the disk of `radius` km centered at the origin
/// into `out` (cleared first).
void sample_ppp(double density, double radius, Engine& rng, std::vector<Point>& out);
std::vector<Point> sample_ppp(double density, double radius, Engine& rng);

enum class FadingMode {
    shared_gain,               ///< one desired-link gain for both SIR conditions
    independent_per_condition  ///< fresh desired-link gain per condition
};

std::string_view to_string(FadingMode m) noexcept;
FadingMode parse_fading_mode(std::string_view name);

struct OracleConfig {
    LinkParams params;
    SpreadingFactor sf{7};
    std::uint64_t trials = 100'000;
    double sim_radius = 15.0;  ///< km, at least 10 * params.r
    std::uint64_t seed = 1;
    FadingMode fading_mode = FadingMode::independent_per_condition;
};

struct OracleResult {
    double empirical_outage = 0.0;
    std::uint64_t trials = 0;
    std::uint64_t outages = 0;
    double ci95_halfwidth = 0.0;
};

/// 1.96 * sqrt(p (1 - p) / trials).
double ci95_halfwidth(double p_hat, std::uint64_t trials);

/// Trials are grouped into fixed blocks, each with its own stream seeded from
/// (seed, block index), so the result is identical for any worker count.
/// Throws ConfigError if sim_radius < 10 * r or trials == 0.
OracleResult simulate_outage(const OracleConfig& cfg, const SfTable& table, unsigned workers = 1);

inline constexpr std::uint64_t kOracleBlockTrials = 1024;

struct GridPoint {
    double lambda_sf;
    double lambda_i;
    double r;
};

struct ValidationRow {
    GridPoint point;
    int sf;
    double closed_canonical;
    double closed_printed;
    OracleResult empirical;
    bool pass_canonical;
    bool pass_printed;
};

struct ValidationSettings {
    LinkParams base;  ///< everything except lambda_sf, lambda_i, r
    std::vector<int> sfs{7, 12};
    std::uint64_t trials = 100'000;
    std::uint64_t seed = 1;
    double radius_factor = 10.0;  ///< sim_radius = radius_factor * r
    FadingMode fading_mode = FadingMode::independent_per_condition;
    double sigma_multiple = 3.0;  ///< pass iff |empirical - closed| <= multiple * ci95
};

/// lambda_sf in {0.5,1,2,4} x lambda_i in {0.01,0.05,0.1,0.2} x r in {0.5,1.5,3}.
std::vector<GridPoint> default_validation_grid();

std::vector<ValidationRow> validate_grid(const std::vector<GridPoint>& grid, const ValidationSettings& settings,
                                         const SfTable& table, unsigned workers = 1);

void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows);

}  // namespace lorasim
