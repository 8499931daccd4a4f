#pragma once

#include "petfeed/broker/broker.hpp"
#include "petfeed/firmware/device.hpp"
#include "petfeed/harness/scenario.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

namespace petfeed::harness
{
    /// Virtual time that runs `speed` times faster than the wall clock.
    class ScaledClock
    {
    public:
        using WallClock = std::chrono::steady_clock;

        explicit ScaledClock(double speed, WallClock::time_point origin = WallClock::now());

        SimTime now() const { return at(WallClock::now()); }
        SimTime at(WallClock::time_point wall) const;
        /// Wall instant at which virtual time `t` is reached.
        WallClock::time_point wall_for(SimTime t) const;

        double speed() const noexcept { return speed_; }

    private:
        double speed_;
        WallClock::time_point origin_;
    };

    struct LiveOptions
    {
        std::string host = "127.0.0.1";
        int port = 8080;  // 0 picks a free port
        double speed = 1.0;
        std::optional<std::filesystem::path> persist;
        std::string admin_token;
        std::uint64_t key_seed = 0;
        /// World, sensors, controller and pet events. Duration is ignored.
        Scenario scenario;
        /// Run the scripted owner too (otherwise a human drives the AppChannel).
        bool scripted_owner = false;
    };

    /// Broker HTTP server plus a simulated feeder whose firmware reaches the
    /// broker over HTTP only. The device loop paces its fixed ticks against
    /// the scaled wall clock, and the broker stamps every write with the
    /// device's current tick. Besides the broker routes it serves:
    ///
    ///   GET  /config.json   channel ids and keys, bowl geometry, intervals
    ///   GET  /sim/state     board snapshot (fill, servos, phase)
    ///   POST /sim/pet       {"present": bool, "distance": m}
    class LiveSystem
    {
    public:
        explicit LiveSystem(LiveOptions options);
        ~LiveSystem();

        LiveSystem(const LiveSystem &) = delete;
        LiveSystem &operator=(const LiveSystem &) = delete;

        /// Binds and starts the server and device threads. Throws
        /// std::runtime_error if the address cannot be bound.
        void start();
        /// Idempotent. Joins both threads.
        void stop();

        int port() const noexcept;
        std::string base_url() const;
        nlohmann::json config_json() const;
        broker::Broker &broker() noexcept;
        const firmware::DeviceLinks &links() const noexcept;
        const ScaledClock &clock() const noexcept;
        /// Virtual time of the device loop's current tick.
        SimTime now() const noexcept;

    private:
        struct Impl;
        std::unique_ptr<Impl> impl_;
    };

    /// Runs a LiveSystem until `stop_requested` becomes true. Returns the
    /// process exit code.
    int serve_live(LiveOptions options, const std::atomic<bool> &stop_requested);
}
