#pragma once

#include "petfeed/sim/clock.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace petfeed::harness
{
    struct EventRecord
    {
        double at = 0.0;   // virtual seconds
        std::string kind;  // pet, outage, phase, command, publish, poll, owner, violation
        std::string detail;

        bool operator==(const EventRecord &) const = default;
    };

    /// One sample per tick, taken after the controller has run.
    struct SeriesRow
    {
        double time = 0.0;
        double fill = 0.0;                     // ground truth
        std::optional<double> distance;        // as measured; empty on echo timeout
        std::string phase;
        std::optional<std::string> field1;     // last accepted IR channel values
        std::optional<std::string> field2;
        int selection = 0;                     // last polled AppChannel selection

        bool operator==(const SeriesRow &) const = default;
    };

    struct RunSummary
    {
        std::optional<double> first_detection_at;
        std::optional<double> notify_published_at;
        std::optional<double> owner_selection_at;
        std::optional<double> dispense_start_at;
        std::optional<double> first_full_reading_at;  // first bowl_full reading while Dispensing
        std::optional<double> dispense_stop_at;
        int dispense_feed = 0;
        double initial_fill = 0.0;
        double final_fill = 0.0;
        double initial_mass_g = 0.0;
        double final_mass_g = 0.0;
        double mass_balance_error_g = 0.0;
        std::size_t ir_writes_accepted = 0;
        std::size_t ir_writes_with_presence = 0;
        std::size_t servo_commands = 0;
        std::size_t app_entries = 0;

        std::optional<double> time_to_notify() const;
        std::optional<double> time_to_dispense() const;
    };

    struct RunReport
    {
        std::string scenario;
        std::uint64_t seed = 0;
        double tick = 0.0;
        std::vector<EventRecord> events;
        std::vector<SeriesRow> series;
        RunSummary summary;
        std::vector<std::string> violations;

        bool ok() const noexcept { return violations.empty(); }
    };

    nlohmann::json to_json(const RunSummary &summary);

    /// Canonical JSON. Equal reports serialize to identical bytes.
    std::string serialize(const RunReport &report);

    /// Short human-readable digest for the CLI.
    std::string describe(const RunReport &report);
}
