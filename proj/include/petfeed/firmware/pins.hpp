#pragma once

#include "petfeed/devices/ir_sensor.hpp"
#include "petfeed/devices/ultrasonic.hpp"

#include <cstdint>
#include <string_view>

namespace petfeed::firmware
{
    /// NodeMCU digital header.
    enum class Pin : std::uint8_t
    {
        D0,
        D1,
        D2,
        D3,
        D4,
        D5,
        D6,
        D7,
        D8,
    };

    std::string_view to_string(Pin pin) noexcept;

    /// Board wiring. Defaults are the feeder's circuit.
    struct PinMap
    {
        Pin echo = Pin::D1;
        Pin trig = Pin::D2;
        Pin servo1 = Pin::D3;
        Pin servo2 = Pin::D4;
        Pin ir_out = Pin::D7;

        /// Throws std::invalid_argument unless all five pins are distinct.
        void validate() const;

        /// Servo pin for feed 1 or 2.
        Pin servo(int feed) const;

        bool operator==(const PinMap &) const = default;
    };

    /// Pin-level view of the hardware, as seen from the controller.
    class PinBus
    {
    public:
        virtual ~PinBus() = default;

        virtual devices::Level digital_read(Pin pin) = 0;

        /// Drives `trig` high for `trigger_hold` seconds, then reports how long
        /// `echo` stayed high (or that it never rose).
        virtual devices::EchoResult pulse_in(Pin trig, Pin echo, double trigger_hold) = 0;

        /// Position command for the servo on `pin`.
        virtual void servo_write(Pin pin, double angle_deg) = 0;
    };
}
