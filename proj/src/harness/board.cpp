#include "petfeed/harness/board.hpp"

namespace petfeed::harness
{
    SimBoard::SimBoard(sim::WorldConfig world_cfg, sim::WorldState initial, devices::UltrasonicConfig ultrasonic, devices::IRConfig ir,
                       firmware::PinMap pins, std::uint64_t seed)
        : world_cfg_(world_cfg), world_(initial), ultrasonic_(ultrasonic), ir_(ir), pins_(pins), rng_(seed)
    {
        world_cfg_.validate();
        ultrasonic_.validate();
        ir_.validate();
        pins_.validate();
    }

    devices::Level SimBoard::digital_read(firmware::Pin pin)
    {
        if (pin != pins_.ir_out)
        {
            return devices::Level::High;
        }
        return devices::ir_read(ir_, world_.pet_present, world_.pet_distance);
    }

    devices::EchoResult SimBoard::pulse_in(firmware::Pin trig, firmware::Pin echo, double trigger_hold)
    {
        if (trig != pins_.trig || echo != pins_.echo)
        {
            return devices::EchoResult::timeout();
        }
        return devices::trigger_measure(ultrasonic_, sim::surface_distance(world_, world_cfg_), trigger_hold, rng_);
    }

    void SimBoard::servo_write(firmware::Pin pin, double angle_deg)
    {
        if (pin == pins_.servo1)
        {
            servos_[0] = devices::servo_command(servos_[0], angle_deg);
        }
        else if (pin == pins_.servo2)
        {
            servos_[1] = devices::servo_command(servos_[1], angle_deg);
        }
    }

    void SimBoard::step(sim::SimClock &clock)
    {
        sim::ServoAngles angles{};
        for (std::size_t i = 0; i < servos_.size(); ++i)
        {
            servos_[i] = devices::servo_step(servos_[i], clock.tick_seconds());
            angles[i] = servos_[i].angle;
        }
        world_ = sim::advance(world_, world_cfg_, clock, angles);
    }

    void SimBoard::set_pet(bool present, double distance)
    {
        world_ = sim::script_pet(world_, present, distance);
    }
}
