#pragma once

namespace petfeed::devices
{
    inline constexpr double kServoMinAngle = 0.0;
    inline constexpr double kServoMaxAngle = 180.0;
    inline constexpr double kSg90Slew = 600.0;  // deg/s, 60 deg per 0.1 s

    /// Position-commanded hobby servo with a hard slew limit.
    struct Servo
    {
        double angle = 0.0;
        double target = 0.0;
        double slew = kSg90Slew;

        bool operator==(const Servo &) const = default;
    };

    /// Moves angle toward target by at most slew * tick, landing exactly on
    /// target when within reach. Throws std::invalid_argument for tick <= 0
    /// or angles outside [0, 180].
    Servo servo_step(const Servo &servo, double tick);

    /// Returns servo with a new target. Throws for targets outside [0, 180].
    Servo servo_command(const Servo &servo, double target);
}
