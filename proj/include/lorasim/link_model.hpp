#pragma once

// Closed-form outage and effective bit-rate of a LoRa uplink in an
// interference-limited Poisson field of co-SF LoRa and non-LoRa transmitters.

#include <array>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace lorasim {

/// LoRa spreading factor, SF7 through SF12.
class SpreadingFactor {
public:
    static constexpr int kMin = 7;
    static constexpr int kMax = 12;
    static constexpr std::size_t kCount = kMax - kMin + 1;

    /// Throws DomainError outside [7, 12].
    explicit SpreadingFactor(int index);

    constexpr int index() const noexcept { return index_; }
    /// Zero-based position in an SfTable (SF7 -> 0).
    constexpr std::size_t slot() const noexcept { return static_cast<std::size_t>(index_ - kMin); }

    static std::array<SpreadingFactor, kCount> all();

    friend constexpr bool operator==(SpreadingFactor, SpreadingFactor) = default;

private:
    int index_;
};

struct SfEntry {
    int sf;
    double bit_rate_kbps;
    double sir_threshold;
};

/// Per-SF bit-rate and minimum SIR. Always holds exactly SF7..SF12.
class SfTable {
public:
    /// LoRa defaults: 5.47/3.13/1.76/0.98/0.54/0.29 kb/s,
    /// SIR 0.25/0.125/0.06/0.03/0.017/0.01.
    static SfTable lora_default();

    /// Validates completeness, positivity and (unless allow_non_monotone)
    /// strictly decreasing rate and threshold in SF index. Throws ConfigError.
    static SfTable from_entries(std::vector<SfEntry> entries, bool allow_non_monotone = false);

    /// Parses the `sf,bit_rate_kbps,sir_threshold` CSV format.
    static SfTable from_csv(std::istream& in, bool allow_non_monotone = false);
    static SfTable load(const std::string& path, bool allow_non_monotone = false);

    const SfEntry& at(SpreadingFactor sf) const noexcept { return entries_[sf.slot()]; }
    /// Throws DomainError for indices without an entry.
    const SfEntry& at(int sf) const;
    const std::array<SfEntry, SpreadingFactor::kCount>& entries() const noexcept { return entries_; }
    double max_bit_rate() const noexcept;

private:
    std::array<SfEntry, SpreadingFactor::kCount> entries_{};
};

/// Which Gamma-function constant to use in the outage exponent.
enum class KVariant {
    canonical,   ///< pi * G(1 + 2/alpha) * G(1 - 2/alpha)
    as_printed,  ///< pi * G(1 + 1/alpha) * G(1 - 1/alpha)
};

std::string_view to_string(KVariant v) noexcept;
KVariant parse_k_variant(std::string_view name);

struct LinkParams {
    double alpha = 4.0;            ///< path-loss exponent, > 2
    double beta_cosf = 4.0;        ///< co-SF SIR threshold (6 dB)
    double p_active = 0.025;       ///< activity thinning
    double p_sf = 1.0 / 6.0;       ///< SF allocation probability
    double lambda_sf = 1.0;        ///< smart meters per km^2
    double lambda_i = 0.05;        ///< non-LoRa interferers per km^2
    double r = 1.5;                ///< link distance, km
    KVariant k_variant = KVariant::canonical;

    /// Density of active smart meters sharing the reference link's SF.
    double cosf_density() const noexcept { return p_sf * p_active * lambda_sf; }

    /// Throws DomainError on any invariant violation.
    void validate() const;
};

double geometry_constant(double alpha, KVariant variant);

/// Outage caused by co-SF LoRa interference alone.
double lora_outage(const LinkParams& params);
/// Outage caused by non-LoRa interference alone on `sf`.
double external_outage(SpreadingFactor sf, const LinkParams& params, const SfTable& table);
double total_outage(SpreadingFactor sf, const LinkParams& params, const SfTable& table);
/// p_sf-weighted sum of total_outage over all six SFs.
double avg_outage(const LinkParams& params, const SfTable& table);
double effective_bitrate(SpreadingFactor sf, const LinkParams& params, const SfTable& table);
double avg_effective_bitrate(const LinkParams& params, const SfTable& table);

// ---- sweeps --------------------------------------------------------------

enum class SweepAxis { lambda_sf, lambda_i, r };

std::string_view to_string(SweepAxis axis) noexcept;
/// Throws ConfigError for names other than lambda_sf, lambda_i, r.
SweepAxis parse_sweep_axis(std::string_view name);

LinkParams with_axis(LinkParams params, SweepAxis axis, double value);

struct SweepRow {
    double axis_value;
    std::array<double, SpreadingFactor::kCount> outage;
    double avg_outage;
    std::array<double, SpreadingFactor::kCount> bitrate;
    double avg_bitrate;
};

std::vector<SweepRow> sweep(const LinkParams& base, SweepAxis axis, const std::vector<double>& grid,
                            const SfTable& table);

enum class SweepMetric { outage, bitrate };

/// Writes `axis_value,sf7,...,sf12,average`; with per_sf false only
/// `axis_value,average`.
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, SweepMetric metric,
                     bool per_sf = true);

}  // namespace lorasim
