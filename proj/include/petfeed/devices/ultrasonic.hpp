#pragma once

#include <cstdint>
#include <random>

namespace petfeed::devices
{
    using Rng = std::mt19937_64;

    /// Uniform draw in [-half_width, half_width]. Uses the raw 64-bit engine
    /// output rather than std::uniform_real_distribution so the sequence is
    /// identical across standard library implementations.
    double uniform_symmetric(Rng &rng, double half_width) noexcept;

    /// HC-SR04 behavioural parameters.
    struct UltrasonicConfig
    {
        double speed_of_sound = 343.0;  // m/s, dry air at 20 C
        double min_range = 0.02;        // m
        double max_range = 0.80;        // m, practical limit
        double accuracy = 0.003;        // m
        double trigger_min = 10e-6;     // s the TRIG line must be held high
        double beam_angle_deg = 15.0;   // stored only, the world is 1-D
        bool noise_enabled = false;

        void validate() const;
    };

    struct EchoResult
    {
        enum class Kind : std::uint8_t
        {
            Pulse,
            Timeout,
        };

        Kind kind = Kind::Timeout;
        double pulse_width = 0.0;  // s, > 0 iff kind == Pulse

        static EchoResult pulse(double width) { return {Kind::Pulse, width}; }
        static EchoResult timeout() { return {}; }

        bool is_pulse() const noexcept { return kind == Kind::Pulse; }

        bool operator==(const EchoResult &) const = default;
    };

    /// Noise-free measurement. Throws std::logic_error if cfg enables noise,
    /// since there is no entropy source to draw from.
    EchoResult trigger_measure(const UltrasonicConfig &cfg, double true_distance, double trigger_hold);

    /// Measurement with the +-accuracy uniform noise applied to the echo
    /// width when cfg.noise_enabled. The rng is not touched otherwise.
    EchoResult trigger_measure(const UltrasonicConfig &cfg, double true_distance, double trigger_hold, Rng &rng);

    /// distance = c * t / 2
    double pulse_to_distance(const UltrasonicConfig &cfg, double pulse_width);
}
