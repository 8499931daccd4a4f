#pragma once

#include "petfeed/broker/types.hpp"
#include "petfeed/devices/ir_sensor.hpp"
#include "petfeed/devices/ultrasonic.hpp"
#include "petfeed/firmware/controller.hpp"
#include "petfeed/firmware/pins.hpp"
#include "petfeed/sim/world.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace petfeed::harness
{
    using sim::Duration;
    using sim::SimTime;

    /// Raised for unreadable or invalid scenario files. what() carries
    /// "source:line:column: field: message".
    class ConfigError : public std::runtime_error
    {
    public:
        ConfigError(const std::string &message, int line, std::string field)
            : std::runtime_error(message), line_(line), field_(std::move(field)) {}

        /// 1-based, 0 when unknown.
        int line() const noexcept { return line_; }
        const std::string &field() const noexcept { return field_; }

    private:
        int line_;
        std::string field_;
    };

    struct PetEvent
    {
        SimTime at{};
        bool present = false;
        double distance = 0.0;
    };

    /// Broker unreachable for the device and the owner during [start, end).
    struct OutageWindow
    {
        SimTime start{};
        SimTime end{};
    };

    /// Stand-in for the human: after the first IR entry that shows the pet,
    /// waits `delay` and writes `selection` to the AppChannel.
    struct OwnerRule
    {
        bool enabled = true;
        int selection = 1;
        Duration delay{20'000'000};
        Duration poll_period{1'000'000};
    };

    struct Scenario
    {
        std::string name = "scenario";
        Duration duration{120'000'000};
        Duration tick = sim::kDefaultTick;
        std::uint64_t seed = 1;

        sim::WorldConfig world;
        double initial_fill = 0.0;
        std::array<double, sim::kFeedSlots> hopper_mass{500.0, 500.0};

        devices::UltrasonicConfig ultrasonic;
        devices::IRConfig ir;
        firmware::ControllerConfig controller;
        firmware::PinMap pins;
        broker::RateLimitPolicy policy;

        OwnerRule owner;
        std::vector<PetEvent> pet_events;       // sorted by time
        std::vector<OutageWindow> outages;

        /// Throws ConfigError for any broken invariant.
        void validate() const;
    };

    Scenario parse_scenario(const std::string &text, const std::string &source = "<scenario>");
    Scenario load_scenario(const std::filesystem::path &path);
}
