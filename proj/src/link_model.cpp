#include "lorasim/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "lorasim/csv.hpp"
#include "lorasim/error.hpp"

namespace lorasim {

SpreadingFactor::SpreadingFactor(int index) : index_(index) {
    if (index < kMin || index > kMax) {
        throw DomainError("spreading factor must be in [7, 12], got " + std::to_string(index));
    }
}

std::array<SpreadingFactor, SpreadingFactor::kCount> SpreadingFactor::all() {
    return {SpreadingFactor(7),  SpreadingFactor(8),  SpreadingFactor(9),
            SpreadingFactor(10), SpreadingFactor(11), SpreadingFactor(12)};
}

// ---- SfTable ---------------------------------------------------------------

SfTable SfTable::lora_default() {
    return from_entries({{7, 5.47, 0.25},
                         {8, 3.13, 0.125},
                         {9, 1.76, 0.06},
                         {10, 0.98, 0.03},
                         {11, 0.54, 0.017},
                         {12, 0.29, 0.01}});
}

SfTable SfTable::from_entries(std::vector<SfEntry> entries, bool allow_non_monotone) {
    if (entries.size() != SpreadingFactor::kCount) {
        throw ConfigError("SF table needs exactly 6 rows, got " + std::to_string(entries.size()));
    }
    SfTable table;
    std::array<bool, SpreadingFactor::kCount> seen{};
    for (const auto& e : entries) {
        if (e.sf < SpreadingFactor::kMin || e.sf > SpreadingFactor::kMax) {
            throw ConfigError("SF table: spreading factor out of range: " + std::to_string(e.sf));
        }
        const auto slot = static_cast<std::size_t>(e.sf - SpreadingFactor::kMin);
        if (seen[slot]) throw ConfigError("SF table: duplicate SF" + std::to_string(e.sf));
        seen[slot] = true;
        if (!(e.bit_rate_kbps > 0.0) || !std::isfinite(e.bit_rate_kbps)) {
            throw ConfigError("SF table: bit rate of SF" + std::to_string(e.sf) + " must be positive");
        }
        if (!(e.sir_threshold > 0.0) || !std::isfinite(e.sir_threshold)) {
            throw ConfigError("SF table: SIR threshold of SF" + std::to_string(e.sf) + " must be positive");
        }
        table.entries_[slot] = e;
    }
    if (!allow_non_monotone) {
        for (std::size_t i = 1; i < SpreadingFactor::kCount; ++i) {
            const auto& prev = table.entries_[i - 1];
            const auto& cur = table.entries_[i];
            if (!(cur.bit_rate_kbps < prev.bit_rate_kbps)) {
                throw ConfigError("SF table: bit rate must strictly decrease with SF (SF" +
                                  std::to_string(cur.sf) + ")");
            }
            if (!(cur.sir_threshold < prev.sir_threshold)) {
                throw ConfigError("SF table: SIR threshold must strictly decrease with SF (SF" +
                                  std::to_string(cur.sf) + ")");
            }
        }
    }
    return table;
}

SfTable SfTable::from_csv(std::istream& in, bool allow_non_monotone) {
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("SF table: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "sf,bit_rate_kbps,sir_threshold") {
        throw ConfigError("SF table: expected header 'sf,bit_rate_kbps,sir_threshold', got '" + line + "'");
    }
    std::vector<SfEntry> entries;
    int row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto f = csv::split(line);
        const auto sf = f.size() == 3 ? csv::parse_int(f[0]) : std::nullopt;
        const auto rate = f.size() == 3 ? csv::parse_double(f[1]) : std::nullopt;
        const auto sir = f.size() == 3 ? csv::parse_double(f[2]) : std::nullopt;
        if (!sf || !rate || !sir) throw ConfigError("SF table: malformed row " + std::to_string(row));
        entries.push_back({static_cast<int>(*sf), *rate, *sir});
    }
    return from_entries(std::move(entries), allow_non_monotone);
}

SfTable SfTable::load(const std::string& path, bool allow_non_monotone) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open SF table '" + path + "'");
    return from_csv(in, allow_non_monotone);
}

const SfEntry& SfTable::at(int sf) const {
    return at(SpreadingFactor(sf));
}

double SfTable::max_bit_rate() const noexcept {
    double best = 0.0;
    for (const auto& e : entries_) best = std::max(best, e.bit_rate_kbps);
    return best;
}

// ---- parameters -----------------------------------------------------------

std::string_view to_string(KVariant v) noexcept {
    return v == KVariant::canonical ? "canonical" : "as_printed";
}

KVariant parse_k_variant(std::string_view name) {
    if (name == "canonical") return KVariant::canonical;
    if (name == "as_printed") return KVariant::as_printed;
    throw ConfigError("unknown k variant '" + std::string(name) + "' (canonical|as_printed)");
}

void LinkParams::validate() const {
    auto require = [](bool ok, const char* what) {
        if (!ok) throw DomainError(what);
    };
    require(alpha > 2.0 && std::isfinite(alpha), "alpha must be finite and > 2");
    require(beta_cosf >= 0.0 && std::isfinite(beta_cosf), "beta_cosf must be finite and >= 0");
    require(p_active >= 0.0 && p_active <= 1.0, "p_active must be in [0, 1]");
    require(p_sf >= 0.0 && p_sf <= 1.0, "p_sf must be in [0, 1]");
    require(lambda_sf >= 0.0 && std::isfinite(lambda_sf), "lambda_sf must be finite and >= 0");
    require(lambda_i >= 0.0 && std::isfinite(lambda_i), "lambda_i must be finite and >= 0");
    require(r >= 0.0 && std::isfinite(r), "r must be finite and >= 0");
}

// ---- closed forms ---------------------------------------------------------

double geometry_constant(double alpha, KVariant variant) {
    if (!(alpha > 2.0)) throw DomainError("geometry constant requires alpha > 2");
    const double x = (variant == KVariant::canonical ? 2.0 : 1.0) / alpha;
    return std::numbers::pi * std::tgamma(1.0 + x) * std::tgamma(1.0 - x);
}

namespace {

// Exponent of the co-SF success probability: k * lambda * r^2 * beta^(2/alpha).
double lora_exponent(const LinkParams& p, double k) {
    return k * p.cosf_density() * p.r * p.r * std::pow(p.beta_cosf, 2.0 / p.alpha);
}

double external_exponent(double sir_threshold, const LinkParams& p, double k) {
    return k * p.lambda_i * p.r * p.r * std::pow(sir_threshold, 2.0 / p.alpha);
}

// 1 - exp(-x) without cancellation near 0.
double outage_from_exponent(double x) {
    return std::clamp(-std::expm1(-x), 0.0, 1.0);
}

}  // namespace

double lora_outage(const LinkParams& params) {
    params.validate();
    const double k = geometry_constant(params.alpha, params.k_variant);
    return outage_from_exponent(lora_exponent(params, k));
}

double external_outage(SpreadingFactor sf, const LinkParams& params, const SfTable& table) {
    params.validate();
    const double k = geometry_constant(params.alpha, params.k_variant);
    return outage_from_exponent(external_exponent(table.at(sf).sir_threshold, params, k));
}

double total_outage(SpreadingFactor sf, const LinkParams& params, const SfTable& table) {
    params.validate();
    const double k = geometry_constant(params.alpha, params.k_variant);
    return outage_from_exponent(lora_exponent(params, k) +
                                external_exponent(table.at(sf).sir_threshold, params, k));
}

double avg_outage(const LinkParams& params, const SfTable& table) {
    double sum = 0.0;
    for (const auto sf : SpreadingFactor::all()) sum += total_outage(sf, params, table);
    return std::clamp(params.p_sf * sum, 0.0, 1.0);
}

double effective_bitrate(SpreadingFactor sf, const LinkParams& params, const SfTable& table) {
    return (1.0 - total_outage(sf, params, table)) * table.at(sf).bit_rate_kbps;
}

double avg_effective_bitrate(const LinkParams& params, const SfTable& table) {
    double sum = 0.0;
    for (const auto sf : SpreadingFactor::all()) sum += effective_bitrate(sf, params, table);
    return params.p_sf * sum;
}

// ---- sweeps ---------------------------------------------------------------

std::string_view to_string(SweepAxis axis) noexcept {
    switch (axis) {
        case SweepAxis::lambda_sf: return "lambda_sf";
        case SweepAxis::lambda_i: return "lambda_i";
        case SweepAxis::r: return "r";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view name) {
    if (name == "lambda_sf") return SweepAxis::lambda_sf;
    if (name == "lambda_i") return SweepAxis::lambda_i;
    if (name == "r") return SweepAxis::r;
    throw ConfigError("unknown sweep axis '" + std::string(name) + "' (lambda_sf|lambda_i|r)");
}

LinkParams with_axis(LinkParams params, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::lambda_sf: params.lambda_sf = value; break;
        case SweepAxis::lambda_i: params.lambda_i = value; break;
        case SweepAxis::r: params.r = value; break;
    }
    return params;
}

std::vector<SweepRow> sweep(const LinkParams& base, SweepAxis axis, const std::vector<double>& grid,
                            const SfTable& table) {
    std::vector<SweepRow> rows;
    rows.reserve(grid.size());
    for (const double value : grid) {
        const LinkParams p = with_axis(base, axis, value);
        p.validate();
        SweepRow row{};
        row.axis_value = value;
        for (const auto sf : SpreadingFactor::all()) {
            row.outage[sf.slot()] = total_outage(sf, p, table);
            row.bitrate[sf.slot()] = effective_bitrate(sf, p, table);
        }
        row.avg_outage = avg_outage(p, table);
        row.avg_bitrate = avg_effective_bitrate(p, table);
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepMetric metric,
                     bool per_sf) {
    out << "axis_value";
    if (per_sf) {
        for (const auto sf : SpreadingFactor::all()) out << ",sf" << sf.index();
    }
    out << ",average\n";
    for (const auto& row : rows) {
        const auto& cols = metric == SweepMetric::outage ? row.outage : row.bitrate;
        out << csv::format_double(row.axis_value);
        if (per_sf) {
            for (const double v : cols) out << ',' << csv::format_double(v);
        }
        out << ',' << csv::format_double(metric == SweepMetric::outage ? row.avg_outage : row.avg_bitrate)
            << '\n';
    }
}

}  // namespace lorasim
