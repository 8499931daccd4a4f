#include "petfeed/devices/servo.hpp"

#include <cmath>
#include <stdexcept>

namespace petfeed::devices
{
    namespace
    {
        bool in_range(double a) { return a >= kServoMinAngle && a <= kServoMaxAngle; }
    }

    Servo servo_step(const Servo &servo, double tick)
    {
        if (!(tick > 0.0))
        {
            throw std::invalid_argument("servo tick must be positive");
        }
        if (!in_range(servo.angle) || !in_range(servo.target))
        {
            throw std::invalid_argument("servo angle or target outside [0, 180]");
        }
        if (!(servo.slew > 0.0))
        {
            throw std::invalid_argument("servo slew must be positive");
        }

        Servo next = servo;
        const double max_step = servo.slew * tick;
        const double error = servo.target - servo.angle;
        if (std::abs(error) <= max_step)
        {
            next.angle = servo.target;
        }
        else
        {
            next.angle += std::copysign(max_step, error);
        }
        return next;
    }

    Servo servo_command(const Servo &servo, double target)
    {
        if (!in_range(target))
        {
            throw std::invalid_argument("servo target outside [0, 180]");
        }
        Servo next = servo;
        next.target = target;
        return next;
    }
}
