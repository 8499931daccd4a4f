#pragma once

#include "petfeed/broker/broker.hpp"
#include "petfeed/firmware/device.hpp"
#include "petfeed/harness/agents.hpp"
#include "petfeed/harness/board.hpp"
#include "petfeed/harness/report.hpp"
#include "petfeed/harness/scenario.hpp"

#include <filesystem>
#include <memory>
#include <optional>

namespace petfeed::harness
{
    inline constexpr double kMassTolerance_g = 1e-9;

    struct RunOptions
    {
        /// Journal the broker to this file (replayed first if it exists).
        std::optional<std::filesystem::path> journal_path;
        bool record_series = true;
    };

    /// Broker, simulated board, firmware and scripted owner on one virtual
    /// clock. Each step() runs, in order: scripted events, the device loop,
    /// the owner, sampling and invariant checks, then physics for one tick.
    class ScenarioRunner
    {
    public:
        explicit ScenarioRunner(Scenario scenario, RunOptions options = {});

        bool done() const noexcept { return clock_.now() >= scenario_.duration; }
        SimTime now() const noexcept { return clock_.now(); }

        void step();
        void run_until(SimTime t);

        /// Runs to the scenario's end and assembles the report.
        RunReport finish();

        broker::Broker &broker() noexcept { return *broker_; }
        const SimBoard &board() const noexcept { return board_; }
        const firmware::Device &device() const noexcept { return *device_; }
        const firmware::DeviceLinks &links() const noexcept { return links_; }
        const Scenario &scenario() const noexcept { return scenario_; }

    private:
        void log(std::string kind, std::string detail);
        void violation(std::string what);
        void record(const firmware::TickReport &tick);
        void check(const firmware::TickReport &tick);

        Scenario scenario_;
        RunOptions options_;
        sim::SimClock clock_;
        std::unique_ptr<broker::Broker> broker_;
        firmware::DeviceLinks links_;
        broker::LocalBrokerClient local_client_;
        OutageClient client_;
        SimBoard board_;
        std::unique_ptr<firmware::Device> device_;
        ScriptedOwner owner_;

        std::size_t next_pet_event_ = 0;
        bool outage_active_ = false;
        std::optional<SimTime> last_accepted_publish_;
        std::optional<std::string> last_field1_;
        std::optional<std::string> last_field2_;
        int last_polled_selection_ = 0;
        bool mass_violation_logged_ = false;

        RunReport report_;
    };

    RunReport run_scenario(const Scenario &scenario, const RunOptions &options = {});
}
