#pragma once

// Household load CSV ingestion/persistence and the synthetic load generator.
//
// Input schema, one row per household and slot:
//   timestamp,household_id,power_kw
//   2016-10-03T00:00:00Z,h0001,0.42
// Timestamps are UTC on exact 10-minute boundaries; each household must
// cover whole days starting at midnight with no gaps or duplicates.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "lorasim/power_series.hpp"

namespace lorasim {

struct ManifestEntry {
    std::string household_id;
    std::filesystem::path file;
    std::size_t days = 0;
};

struct CorpusManifest {
    std::vector<ManifestEntry> households;
    Duration slot = kDefaultSlot;
    std::vector<std::pair<std::filesystem::path, std::uint64_t>> checksums;  ///< FNV-1a of file bytes
};

struct Corpus {
    CorpusManifest manifest;
    std::vector<PowerSeries> series;  ///< same order as manifest.households
};

/// Parses one CSV stream. `source` is used in diagnostics. Throws LoadError.
std::vector<PowerSeries> read_series_csv(std::istream& in, const std::string& source);

/// Loads every *.csv in a directory (sorted by name), or a single file.
/// Household ids must be unique across files. Throws LoadError.
Corpus load_corpus(const std::filesystem::path& path);

void write_series_csv(std::ostream& out, const std::vector<PowerSeries>& series);
/// One `<household_id>.csv` per series in `dir` (created if missing).
void write_corpus(const std::filesystem::path& dir, const std::vector<PowerSeries>& series);

struct SyntheticLoadConfig {
    double base_load = 0.3;           ///< kW
    double events_per_day = 8.0;      ///< Poisson rate of appliance switch-ons
    double magnitude_min = 0.5;       ///< kW
    double magnitude_max = 3.0;       ///< kW
    int duration_min = 1;             ///< slots
    int duration_max = 6;             ///< slots
    double diurnal_amplitude = 0.5;   ///< relative, in [0, 1]
    std::uint64_t seed = 1;
    Timestamp start = std::chrono::sys_days{std::chrono::year{2016} / 10 / 3};
    Duration slot = kDefaultSlot;

    void validate() const;
};

struct SyntheticCorpus {
    std::vector<PowerSeries> series;
    std::vector<std::size_t> event_counts;  ///< appliance events drawn per household
};

/// Base load with a sinusoidal daily swing peaking at 18:00, plus
/// rectangular appliance events. Household h draws from stream (seed, h).
SyntheticCorpus generate_synthetic(const SyntheticLoadConfig& cfg, std::size_t households, std::size_t days,
                                   unsigned workers = 1);

}  // namespace lorasim
