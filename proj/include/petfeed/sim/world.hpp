#pragma once

#include "petfeed/sim/clock.hpp"

#include <array>

namespace petfeed::sim
{
    inline constexpr std::size_t kFeedSlots = 2;

    /// Bowl geometry and hopper valve flow. None of these are hardware
    /// facts; they are scenario defaults.
    struct WorldConfig
    {
        double d_empty = 0.12;          // m, sensor face to bottom of empty bowl
        double d_full = 0.04;           // m, sensor face to surface of full bowl
        double bowl_capacity_g = 200.0;
        double flow_rate_g_per_s = 10.0; // per hopper at 180 degrees

        void validate() const;
    };

    struct WorldState
    {
        double bowl_fill = 0.0;                          // [0, 1]
        std::array<double, kFeedSlots> hopper_mass{};    // grams
        bool pet_present = false;
        double pet_distance = 0.0;                       // m from IR sensor

        double bowl_mass(const WorldConfig &cfg) const noexcept { return bowl_fill * cfg.bowl_capacity_g; }
        double total_mass(const WorldConfig &cfg) const noexcept;

        bool operator==(const WorldState &) const = default;
    };

    using ServoAngles = std::array<double, kFeedSlots>;

    /// Linear valve: 0 degrees closed, 180 degrees fully open.
    double open_fraction(double angle_deg) noexcept;

    /// Integrates one clock tick of dispensing and advances the clock.
    /// Each slot moves min(flow * open * dt, hopper, bowl headroom) grams
    /// from its hopper into the bowl, slot 1 first.
    WorldState advance(const WorldState &world, const WorldConfig &cfg, SimClock &clock, const ServoAngles &servo_angles);

    /// Distance from the ultrasonic face to the bowl contents.
    double surface_distance(const WorldState &world, const WorldConfig &cfg) noexcept;

    /// Inverse of surface_distance, clamped to [0, 1].
    double fill_from_distance(double distance, const WorldConfig &cfg) noexcept;

    WorldState script_pet(const WorldState &world, bool present, double distance);
}
