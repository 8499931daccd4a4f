#include "petfeed/devices/ultrasonic.hpp"

#include <stdexcept>

namespace petfeed::devices
{
    double uniform_symmetric(Rng &rng, double half_width) noexcept
    {
        // 53 high bits -> [0, 1)
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        return (2.0 * unit - 1.0) * half_width;
    }

    void UltrasonicConfig::validate() const
    {
        if (!(min_range < max_range))
        {
            throw std::invalid_argument("ultrasonic min_range must be below max_range");
        }
        if (!(accuracy > 0.0) || !(trigger_min > 0.0) || !(speed_of_sound > 0.0))
        {
            throw std::invalid_argument("ultrasonic accuracy, trigger_min and speed_of_sound must be positive");
        }
    }

    namespace
    {
        EchoResult measure(const UltrasonicConfig &cfg, double true_distance, double trigger_hold, Rng *rng)
        {
            if (!(trigger_hold >= 0.0))
            {
                throw std::invalid_argument("trigger hold time must be non-negative");
            }
            if (trigger_hold < cfg.trigger_min)
            {
                return EchoResult::timeout();
            }
            if (!(true_distance >= cfg.min_range && true_distance <= cfg.max_range))
            {
                return EchoResult::timeout();
            }
            double width = 2.0 * true_distance / cfg.speed_of_sound;
            if (cfg.noise_enabled)
            {
                width += uniform_symmetric(*rng, cfg.accuracy * 2.0 / cfg.speed_of_sound);
            }
            return EchoResult::pulse(width);
        }
    }

    EchoResult trigger_measure(const UltrasonicConfig &cfg, double true_distance, double trigger_hold)
    {
        if (cfg.noise_enabled)
        {
            throw std::logic_error("noisy ultrasonic measurement needs an rng");
        }
        return measure(cfg, true_distance, trigger_hold, nullptr);
    }

    EchoResult trigger_measure(const UltrasonicConfig &cfg, double true_distance, double trigger_hold, Rng &rng)
    {
        return measure(cfg, true_distance, trigger_hold, &rng);
    }

    double pulse_to_distance(const UltrasonicConfig &cfg, double pulse_width)
    {
        if (!(pulse_width >= 0.0))
        {
            throw std::invalid_argument("pulse width must be non-negative");
        }
        return cfg.speed_of_sound * pulse_width / 2.0;
    }
}
