#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lorasim {

using Timestamp = std::chrono::sys_seconds;
using Duration = std::chrono::seconds;

inline constexpr Duration kDefaultSlot{std::chrono::minutes(10)};
inline constexpr Duration kDay{std::chrono::hours(24)};

/// `YYYY-MM-DDTHH:MM:SSZ`.
std::string format_timestamp(Timestamp t);
/// Accepts `YYYY-MM-DDTHH:MM:SSZ` (the trailing Z is optional).
std::optional<Timestamp> parse_timestamp(std::string_view text);

/// Average power per slot (kW) on a uniform UTC grid covering whole days.
struct PowerSeries {
    std::string household_id;
    Timestamp start{};
    Duration slot = kDefaultSlot;
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
    std::size_t slots_per_day() const noexcept { return static_cast<std::size_t>(kDay / slot); }
    std::size_t days() const noexcept { return size() / slots_per_day(); }
    double slot_hours() const noexcept { return std::chrono::duration<double, std::ratio<3600>>(slot).count(); }
    Timestamp time_at(std::size_t slot_index) const noexcept {
        return start + slot * static_cast<long long>(slot_index);
    }

    /// Throws DomainError unless values are finite and nonnegative, the slot
    /// divides 24 h and the series is a whole number of days.
    void validate() const;
};

}  // namespace lorasim
