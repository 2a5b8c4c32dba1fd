#include "lorasim/sampling.hpp"

#include <cmath>
#include <ostream>

#include "lorasim/csv.hpp"
#include "lorasim/error.hpp"

namespace lorasim {

std::string_view to_string(Trigger t) noexcept {
    switch (t) {
        case Trigger::time: return "time";
        case Trigger::energy: return "energy";
        case Trigger::power_change: return "power_change";
    }
    return "?";
}

std::string_view to_string(Strategy s) noexcept { return s == Strategy::time ? "time" : "event"; }

Trigger parse_trigger(std::string_view name) {
    if (name == "time") return Trigger::time;
    if (name == "energy") return Trigger::energy;
    if (name == "power_change") return Trigger::power_change;
    throw ConfigError("unknown trigger '" + std::string(name) + "'");
}

Strategy parse_strategy(std::string_view name) {
    if (name == "time") return Strategy::time;
    if (name == "event") return Strategy::event;
    throw ConfigError("unknown strategy '" + std::string(name) + "' (time|event)");
}

void EventThresholds::validate() const {
    if (!(e_lim > 0.0) || !(p_lim > 0.0) || !(p_step > 0.0) || !std::isfinite(e_lim) || !std::isfinite(p_lim) ||
        !std::isfinite(p_step)) {
        throw ConfigError("event thresholds must be finite and strictly positive");
    }
}

std::size_t SampleSet::count(Trigger t) const noexcept {
    std::size_t n = 0;
    for (const auto& s : samples) n += s.trigger == t ? 1 : 0;
    return n;
}

SampleSet time_sample(const PowerSeries& series, Duration interval) {
    if (interval <= Duration::zero() || series.slot <= Duration::zero() ||
        interval % series.slot != Duration::zero()) {
        throw ConfigError("sampling interval must be a positive multiple of the series slot");
    }
    const auto stride = static_cast<std::size_t>(interval / series.slot);
    SampleSet out;
    out.household_id = series.household_id;
    out.strategy = Strategy::time;
    out.samples.reserve(series.size() / stride + 1);
    for (std::size_t i = 0; i < series.size(); i += stride) {
        out.samples.push_back({i, series.values[i], Trigger::time});
    }
    return out;
}

namespace {

// Absorbs the rounding of repeated per-slot energy sums (e.g. 12 * 1/6 kWh).
constexpr double kEnergyRelTolerance = 1e-9;

}  // namespace

SampleSet event_sample(const PowerSeries& series, const EventThresholds& th) {
    th.validate();
    SampleSet out;
    out.household_id = series.household_id;
    out.strategy = Strategy::event;
    out.thresholds = th;
    if (series.values.empty()) return out;

    const double slot_h = series.slot_hours();
    const double energy_trigger = th.e_lim * (1.0 - kEnergyRelTolerance);
    double last_power = series.values[0];
    double energy = series.values[0] * slot_h;
    out.samples.push_back({0, last_power, Trigger::time});

    for (std::size_t t = 1; t < series.size(); ++t) {
        const double p = series.values[t];
        energy += p * slot_h;
        std::optional<Trigger> fired;
        if (std::abs(p - last_power) >= th.p_lim) {
            fired = Trigger::power_change;
        } else if (energy >= energy_trigger) {
            fired = Trigger::energy;
        }
        if (fired) {
            out.samples.push_back({t, p, *fired});
            last_power = p;
            energy = 0.0;
        }
    }
    return out;
}

TuneResult tune_thresholds(const PowerSeries& series, const EventThresholds& initial, const SampleSet& time_budget) {
    initial.validate();
    const std::size_t budget = time_budget.size();

    TuneResult result;
    result.thresholds = initial;
    EventThresholds th = initial;
    bool have_best = false;
    for (int iter = 1; iter <= kTuneIterationCap; ++iter) {
        SampleSet events = event_sample(series, th);
        result.iterations = iter;
        if (events.size() < budget) {
            result.thresholds = th;
            result.samples = std::move(events);
            result.cap_reached = false;
            return result;
        }
        if (!have_best || events.size() < result.samples.size()) {
            result.thresholds = th;
            result.samples = events;
            have_best = true;
        }
        th.p_lim += th.p_step;
        if (events.count(Trigger::power_change) == 0) {
            // power threshold already above every change: relax the energy side
            th.e_lim *= 2.0;
            th.p_lim = th.p_step;
        }
    }
    result.cap_reached = true;
    return result;
}

void write_samples_csv_header(std::ostream& out) {
    out << "household_id,slot_index,timestamp,power_kw,trigger\n";
}

void write_samples_csv_rows(std::ostream& out, const PowerSeries& series, const SampleSet& samples) {
    for (const auto& s : samples.samples) {
        out << samples.household_id << ',' << s.slot_index << ',' << format_timestamp(series.time_at(s.slot_index))
            << ',' << csv::format_double(s.power) << ',' << to_string(s.trigger) << '\n';
    }
}

}  // namespace lorasim
