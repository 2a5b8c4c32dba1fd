#pragma once

// Time-based and event-based (send-on-delta) sampling of household load.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lorasim/power_series.hpp"

namespace lorasim {

enum class Trigger { time, energy, power_change };
enum class Strategy { time, event };

std::string_view to_string(Trigger t) noexcept;
std::string_view to_string(Strategy s) noexcept;
Trigger parse_trigger(std::string_view name);
Strategy parse_strategy(std::string_view name);

struct Sample {
    std::size_t slot_index;
    double power;  ///< kW, equal to the series value at slot_index
    Trigger trigger;

    friend bool operator==(const Sample&, const Sample&) = default;
};

struct EventThresholds {
    double e_lim = 2.0;   ///< kWh accumulated since the last event
    double p_lim = 1.0;   ///< kW change w.r.t. the last emitted sample
    double p_step = 0.5;  ///< kW increment used by the tuner

    void validate() const;
    friend bool operator==(const EventThresholds&, const EventThresholds&) = default;
};

struct SampleSet {
    std::string household_id;
    Strategy strategy = Strategy::time;
    std::optional<EventThresholds> thresholds;
    std::vector<Sample> samples;  ///< strictly increasing slot_index

    std::size_t size() const noexcept { return samples.size(); }
    std::size_t count(Trigger t) const noexcept;
};

/// Samples slots 0, n, 2n, ... where n = interval / series.slot.
/// Throws ConfigError unless interval is a positive multiple of the slot.
SampleSet time_sample(const PowerSeries& series, Duration interval);

inline constexpr Duration kDefaultTimeInterval{std::chrono::minutes(30)};

/// Slot 0 is always emitted as a `time` baseline. After that a slot is
/// emitted as `power_change` when it differs from the last emitted power by at
/// least p_lim, otherwise as `energy` once the energy accumulated since the
/// last event reaches e_lim. Every event resets the accumulator; the baseline
/// does not, so the accumulator counts from the start of the series.
SampleSet event_sample(const PowerSeries& series, const EventThresholds& thresholds);

inline constexpr int kTuneIterationCap = 64;

struct TuneResult {
    EventThresholds thresholds;
    SampleSet samples;
    int iterations = 0;
    bool cap_reached = false;  ///< budget not met within kTuneIterationCap
};

/// Threshold search that brings the event-sample count strictly below the
/// time-sample budget: raise p_lim by p_step while the budget is exceeded;
/// when an over-budget set has no power_change samples, double e_lim and
/// reset p_lim to p_step. On hitting the cap, returns the smallest set seen.
TuneResult tune_thresholds(const PowerSeries& series, const EventThresholds& initial, const SampleSet& time_budget);

/// Writes `household_id,slot_index,timestamp,power_kw,trigger`.
void write_samples_csv_header(std::ostream& out);
void write_samples_csv_rows(std::ostream& out, const PowerSeries& series, const SampleSet& samples);

}  // namespace lorasim
