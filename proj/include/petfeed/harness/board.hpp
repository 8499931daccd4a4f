#pragma once

#include "petfeed/devices/ir_sensor.hpp"
#include "petfeed/devices/servo.hpp"
#include "petfeed/devices/ultrasonic.hpp"
#include "petfeed/firmware/pins.hpp"
#include "petfeed/sim/world.hpp"

#include <array>

namespace petfeed::harness
{
    /// The feeder's hardware wired to a simulated world: HC-SR04 above the
    /// bowl, IR module at the feeding spot, one servo valve per hopper.
    /// Pins not in the PinMap read HIGH (pulled up) and ignore writes.
    class SimBoard final : public firmware::PinBus
    {
    public:
        SimBoard(sim::WorldConfig world_cfg, sim::WorldState initial, devices::UltrasonicConfig ultrasonic, devices::IRConfig ir,
                 firmware::PinMap pins, std::uint64_t seed);

        devices::Level digital_read(firmware::Pin pin) override;
        devices::EchoResult pulse_in(firmware::Pin trig, firmware::Pin echo, double trigger_hold) override;
        void servo_write(firmware::Pin pin, double angle_deg) override;

        /// Slews both servos one tick, then integrates the world (which
        /// advances the clock).
        void step(sim::SimClock &clock);

        void set_pet(bool present, double distance);

        const sim::WorldState &world() const noexcept { return world_; }
        const sim::WorldConfig &world_config() const noexcept { return world_cfg_; }
        const std::array<devices::Servo, sim::kFeedSlots> &servos() const noexcept { return servos_; }

    private:
        sim::WorldConfig world_cfg_;
        sim::WorldState world_;
        devices::UltrasonicConfig ultrasonic_;
        devices::IRConfig ir_;
        firmware::PinMap pins_;
        devices::Rng rng_;
        std::array<devices::Servo, sim::kFeedSlots> servos_{};
    };
}
