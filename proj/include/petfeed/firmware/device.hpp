#pragma once

#include "petfeed/broker/client.hpp"
#include "petfeed/firmware/codec.hpp"
#include "petfeed/firmware/controller.hpp"
#include "petfeed/firmware/pins.hpp"

#include <optional>
#include <string>
#include <vector>

namespace petfeed::firmware
{
    struct ChannelBinding
    {
        broker::ChannelId id = 0;
        std::string write_key;
        std::string read_key;
    };

    /// The two channels the feeder talks to: telemetry out, owner commands in.
    struct DeviceLinks
    {
        ChannelBinding ir_channel;
        ChannelBinding app_channel;
    };

    struct ControllerState
    {
        Phase phase = Phase::idle();
        std::optional<sim::SimTime> last_publish_at;  // last accepted write
        std::optional<sim::SimTime> last_poll_at;     // last successful AppChannel read
    };

    struct PublishAttempt
    {
        broker::CallStatus status = broker::CallStatus::Failed;
        broker::EntryId entry_id = 0;
        IrReading reading;
        bool carried_notify = false;
        sim::Duration retry_after{};
    };

    struct PollAttempt
    {
        broker::CallStatus status = broker::CallStatus::Failed;
        std::optional<broker::EntryId> entry_id;
        int selection = 0;
    };

    /// Everything one control-loop pass observed and did.
    struct TickReport
    {
        sim::SimTime at{};
        bool ir_detected = false;
        std::optional<double> distance;
        bool bowl_full = false;
        /// Selection handed to decide(); 0 unless an unconsumed owner entry is pending.
        int selection = 0;
        std::optional<broker::EntryId> selection_entry;
        Phase before;
        Phase after;
        std::vector<Command> commands;
        std::optional<PollAttempt> poll;
        std::optional<PublishAttempt> publish;
    };

    /// Firmware control loop. One tick():
    ///   1. read the IR output pin and run an ultrasonic measurement
    ///   2. poll the AppChannel if the poll window is open
    ///   3. run decide() and drive the servo pins
    ///   4. publish the latest reading to the IR channel if the publish window is open
    ///
    /// Publishing and polling each happen at most once per poll_interval. A
    /// rate-limited publish is retried once the broker's retry-after has
    /// passed, with whatever reading is current then. Unreachable broker
    /// calls leave the phase alone and retry next window.
    ///
    /// Owner selections are edge triggered: an AppChannel entry can start at
    /// most one dispense.
    class Device
    {
    public:
        Device(ControllerConfig config, PinMap pins, devices::UltrasonicConfig ultrasonic, DeviceLinks links, broker::BrokerClient &client);

        TickReport tick(sim::SimTime now, PinBus &bus);

        const ControllerState &state() const noexcept { return state_; }
        const ControllerConfig &config() const noexcept { return config_; }
        const PinMap &pins() const noexcept { return pins_; }

    private:
        ControllerConfig config_;
        PinMap pins_;
        devices::UltrasonicConfig ultrasonic_;
        DeviceLinks links_;
        broker::BrokerClient &client_;

        ControllerState state_;
        std::optional<sim::SimTime> next_publish_at_;
        std::optional<sim::SimTime> next_poll_at_;
        std::optional<broker::EntryId> latest_selection_entry_;
        int latest_selection_ = 0;
        std::optional<broker::EntryId> consumed_selection_entry_;
        bool notify_pending_ = false;
    };
}
