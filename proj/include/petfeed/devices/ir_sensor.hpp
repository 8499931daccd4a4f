#pragma once

#include <cstdint>

namespace petfeed::devices
{
    enum class Level : std::uint8_t
    {
        Low = 0,
        High = 1,
    };

    /// Obstacle-avoidance IR module (LM393 comparator output).
    struct IRConfig
    {
        double range_min = 0.02;       // m
        double range_max = 0.10;       // m, set by the potentiometer
        double half_angle_deg = 35.0;  // stored only
        bool active_low = true;

        void validate() const;
    };

    /// Output pin level. The module asserts (LOW when active_low) iff an
    /// object is present inside [range_min, range_max].
    Level ir_read(const IRConfig &cfg, bool present, double distance);
}
