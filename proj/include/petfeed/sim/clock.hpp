#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace petfeed::sim
{
    /// Virtual time. Integer microseconds so that interval comparisons
    /// (rate limits, poll grids) are exact.
    using Duration = std::chrono::duration<std::int64_t, std::micro>;
    using SimTime = Duration;

    inline constexpr Duration kDefaultTick{10'000};

    constexpr double to_seconds(Duration d) noexcept
    {
        return static_cast<double>(d.count()) / 1e6;
    }

    inline Duration from_seconds(double s)
    {
        if (!std::isfinite(s))
        {
            throw std::invalid_argument("time value must be finite");
        }
        return Duration{std::llround(s * 1e6)};
    }

    /// Fixed-step virtual clock. now() == steps * tick, so repeated
    /// advances never accumulate rounding error.
    class SimClock
    {
    public:
        SimClock() = default;
        explicit SimClock(Duration tick) : tick_(tick)
        {
            if (tick.count() <= 0)
            {
                throw std::invalid_argument("clock tick must be positive");
            }
        }

        Duration tick() const noexcept { return tick_; }
        double tick_seconds() const noexcept { return to_seconds(tick_); }
        SimTime now() const noexcept { return tick_ * steps_; }
        double now_seconds() const noexcept { return to_seconds(now()); }
        std::int64_t steps() const noexcept { return steps_; }

        void advance() noexcept { ++steps_; }

    private:
        Duration tick_{kDefaultTick};
        std::int64_t steps_ = 0;
    };
}
