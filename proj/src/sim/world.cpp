#include "petfeed/sim/world.hpp"

#include <algorithm>
#include <stdexcept>

namespace petfeed::sim
{
    void WorldConfig::validate() const
    {
        if (!(d_full > 0.0 && d_full < d_empty))
        {
            throw std::invalid_argument("bowl geometry requires 0 < d_full < d_empty");
        }
        if (!(bowl_capacity_g > 0.0))
        {
            throw std::invalid_argument("bowl capacity must be positive");
        }
        if (!(flow_rate_g_per_s >= 0.0))
        {
            throw std::invalid_argument("flow rate must be non-negative");
        }
    }

    double WorldState::total_mass(const WorldConfig &cfg) const noexcept
    {
        double total = bowl_mass(cfg);
        for (double m : hopper_mass)
        {
            total += m;
        }
        return total;
    }

    double open_fraction(double angle_deg) noexcept
    {
        return std::clamp(angle_deg, 0.0, 180.0) / 180.0;
    }

    WorldState advance(const WorldState &world, const WorldConfig &cfg, SimClock &clock, const ServoAngles &servo_angles)
    {
        for (double a : servo_angles)
        {
            if (!(a >= 0.0 && a <= 180.0))
            {
                throw std::invalid_argument("servo angle outside [0, 180]");
            }
        }

        WorldState next = world;
        const double dt = clock.tick_seconds();
        for (std::size_t slot = 0; slot < kFeedSlots; ++slot)
        {
            const double open = open_fraction(servo_angles[slot]);
            if (open <= 0.0)
            {
                continue;
            }
            const double headroom = (1.0 - next.bowl_fill) * cfg.bowl_capacity_g;
            const double moved = std::max(0.0, std::min({cfg.flow_rate_g_per_s * open * dt, next.hopper_mass[slot], headroom}));
            next.hopper_mass[slot] -= moved;
            next.bowl_fill = std::min(1.0, next.bowl_fill + moved / cfg.bowl_capacity_g);
        }
        clock.advance();
        return next;
    }

    double surface_distance(const WorldState &world, const WorldConfig &cfg) noexcept
    {
        const double fill = std::clamp(world.bowl_fill, 0.0, 1.0);
        return cfg.d_empty - fill * (cfg.d_empty - cfg.d_full);
    }

    double fill_from_distance(double distance, const WorldConfig &cfg) noexcept
    {
        return std::clamp((cfg.d_empty - distance) / (cfg.d_empty - cfg.d_full), 0.0, 1.0);
    }

    WorldState script_pet(const WorldState &world, bool present, double distance)
    {
        if (!(distance >= 0.0))
        {
            throw std::invalid_argument("pet distance must be non-negative");
        }
        WorldState next = world;
        next.pet_present = present;
        next.pet_distance = distance;
        return next;
    }
}
