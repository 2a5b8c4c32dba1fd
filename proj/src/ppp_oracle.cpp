#include "lorasim/ppp_oracle.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>

#include "lorasim/csv.hpp"
#include "lorasim/error.hpp"
#include "lorasim/parallel.hpp"

namespace lorasim {

void sample_ppp(double density, double radius, Engine& rng, std::vector<Point>& out) {
    out.clear();
    if (density <= 0.0 || radius <= 0.0) return;
    const double mean = density * std::numbers::pi * radius * radius;
    const auto count = std::poisson_distribution<std::uint64_t>(mean)(rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    out.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
        // sqrt of a uniform radius fraction gives uniform area density
        const double rho = radius * std::sqrt(unit(rng));
        const double theta = 2.0 * std::numbers::pi * unit(rng);
        out.push_back({rho * std::cos(theta), rho * std::sin(theta)});
    }
}

std::vector<Point> sample_ppp(double density, double radius, Engine& rng) {
    std::vector<Point> out;
    sample_ppp(density, radius, rng, out);
    return out;
}

std::string_view to_string(FadingMode m) noexcept {
    return m == FadingMode::shared_gain ? "shared_gain" : "independent_per_condition";
}

FadingMode parse_fading_mode(std::string_view name) {
    if (name == "shared_gain") return FadingMode::shared_gain;
    if (name == "independent_per_condition") return FadingMode::independent_per_condition;
    throw ConfigError("unknown fading mode '" + std::string(name) +
                      "' (shared_gain|independent_per_condition)");
}

double ci95_halfwidth(double p_hat, std::uint64_t trials) {
    if (trials == 0) return 0.0;
    return 1.96 * std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(trials));
}

namespace {

// Power received at the gateway from unit-power transmitters at `points`,
// each with an independent Exp(1) gain.
double aggregate_interference(const std::vector<Point>& points, double alpha, Engine& rng) {
    std::exponential_distribution<double> gain(1.0);
    double total = 0.0;
    for (const auto& p : points) {
        const double d2 = p.x * p.x + p.y * p.y;
        const double loss = alpha == 4.0 ? 1.0 / (d2 * d2) : std::pow(d2, -0.5 * alpha);
        total += gain(rng) * loss;
    }
    return total;
}

struct TrialContext {
    double cosf_density;
    double lambda_i;
    double radius;
    double alpha;
    double path_loss;  // r^-alpha
    double beta_cosf;
    double beta_sf;
    FadingMode mode;
};

bool trial_outage(const TrialContext& c, Engine& rng, std::vector<Point>& buffer) {
    std::exponential_distribution<double> gain(1.0);

    sample_ppp(c.cosf_density, c.radius, rng, buffer);
    const bool has_lora = !buffer.empty();
    const double lora = has_lora ? aggregate_interference(buffer, c.alpha, rng) : 0.0;

    sample_ppp(c.lambda_i, c.radius, rng, buffer);
    const bool has_external = !buffer.empty();
    const double external = has_external ? aggregate_interference(buffer, c.alpha, rng) : 0.0;

    const double h_lora = gain(rng);
    const double h_external = c.mode == FadingMode::shared_gain ? h_lora : gain(rng);

    // S / I < beta  <=>  S < beta * I; an empty field never causes outage.
    const bool lora_fail = has_lora && h_lora * c.path_loss < c.beta_cosf * lora;
    const bool external_fail = has_external && h_external * c.path_loss < c.beta_sf * external;
    return lora_fail || external_fail;
}

}  // namespace

OracleResult simulate_outage(const OracleConfig& cfg, const SfTable& table, unsigned workers) {
    cfg.params.validate();
    if (cfg.trials == 0) throw ConfigError("oracle needs at least one trial");
    if (!(cfg.sim_radius > 0.0) || cfg.sim_radius < 10.0 * cfg.params.r) {
        throw ConfigError("sim_radius must be positive and at least 10 * r");
    }

    const TrialContext ctx{
        cfg.params.cosf_density(),
        cfg.params.lambda_i,
        cfg.sim_radius,
        cfg.params.alpha,
        std::pow(cfg.params.r, -cfg.params.alpha),
        cfg.params.beta_cosf,
        table.at(cfg.sf).sir_threshold,
        cfg.fading_mode,
    };

    const std::uint64_t blocks = (cfg.trials + kOracleBlockTrials - 1) / kOracleBlockTrials;
    std::vector<std::uint64_t> outages(blocks, 0);
    parallel_for(blocks, workers, [&](std::size_t b) {
        Engine rng = make_engine(derive_seed(cfg.seed, b));
        std::vector<Point> buffer;
        const std::uint64_t first = b * kOracleBlockTrials;
        const std::uint64_t last = std::min(cfg.trials, first + kOracleBlockTrials);
        std::uint64_t count = 0;
        for (std::uint64_t t = first; t < last; ++t) count += trial_outage(ctx, rng, buffer) ? 1 : 0;
        outages[b] = count;
    });

    OracleResult result;
    result.trials = cfg.trials;
    for (const auto n : outages) result.outages += n;
    result.empirical_outage = static_cast<double>(result.outages) / static_cast<double>(cfg.trials);
    result.ci95_halfwidth = ci95_halfwidth(result.empirical_outage, cfg.trials);
    return result;
}

std::vector<GridPoint> default_validation_grid() {
    std::vector<GridPoint> grid;
    for (const double lsf : {0.5, 1.0, 2.0, 4.0}) {
        for (const double li : {0.01, 0.05, 0.1, 0.2}) {
            for (const double r : {0.5, 1.5, 3.0}) grid.push_back({lsf, li, r});
        }
    }
    return grid;
}

std::vector<ValidationRow> validate_grid(const std::vector<GridPoint>& grid, const ValidationSettings& settings,
                                         const SfTable& table, unsigned workers) {
    if (settings.trials == 0) throw ConfigError("validation needs at least one trial");
    std::vector<ValidationRow> rows;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& point = grid[i];
        for (const int sf_index : settings.sfs) {
            const SpreadingFactor sf(sf_index);
            LinkParams p = settings.base;
            p.lambda_sf = point.lambda_sf;
            p.lambda_i = point.lambda_i;
            p.r = point.r;

            p.k_variant = KVariant::canonical;
            const double closed_canonical = total_outage(sf, p, table);
            p.k_variant = KVariant::as_printed;
            const double closed_printed = total_outage(sf, p, table);

            OracleConfig cfg;
            cfg.params = p;
            cfg.sf = sf;
            cfg.trials = settings.trials;
            cfg.sim_radius = settings.radius_factor * std::max(point.r, 1e-3);
            cfg.seed = derive_seed(settings.seed, i, static_cast<std::uint64_t>(sf_index));
            cfg.fading_mode = settings.fading_mode;
            const OracleResult empirical = simulate_outage(cfg, table, workers);

            const double tol = settings.sigma_multiple * empirical.ci95_halfwidth;
            rows.push_back({point, sf_index, closed_canonical, closed_printed, empirical,
                            std::abs(empirical.empirical_outage - closed_canonical) <= tol,
                            std::abs(empirical.empirical_outage - closed_printed) <= tol});
        }
    }
    return rows;
}

void write_validation_csv(std::ostream& out, const std::vector<ValidationRow>& rows) {
    out << "lambda_sf,lambda_i,r,sf,closed_canonical,closed_printed,empirical,ci95,pass_canonical,pass_printed\n";
    for (const auto& row : rows) {
        out << csv::format_double(row.point.lambda_sf) << ',' << csv::format_double(row.point.lambda_i) << ','
            << csv::format_double(row.point.r) << ',' << row.sf << ','
            << csv::format_double(row.closed_canonical) << ',' << csv::format_double(row.closed_printed)
            << ',' << csv::format_double(row.empirical.empirical_outage) << ','
            << csv::format_double(row.empirical.ci95_halfwidth) << ','
            << (row.pass_canonical ? "true" : "false") << ',' << (row.pass_printed ? "true" : "false")
            << '\n';
    }
}

}  // namespace lorasim
