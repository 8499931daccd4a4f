#include "petfeed/harness/report.hpp"

#include <sstream>

namespace petfeed::harness
{
    using nlohmann::json;

    namespace
    {
        template <typename T>
        json opt(const std::optional<T> &v)
        {
            return v ? json(*v) : json(nullptr);
        }

        std::string seconds_or_dash(const std::optional<double> &v)
        {
            if (!v)
            {
                return "-";
            }
            std::ostringstream out;
            out << *v << " s";
            return out.str();
        }
    }

    std::optional<double> RunSummary::time_to_notify() const
    {
        if (!first_detection_at || !notify_published_at)
        {
            return std::nullopt;
        }
        return *notify_published_at - *first_detection_at;
    }

    std::optional<double> RunSummary::time_to_dispense() const
    {
        if (!owner_selection_at || !dispense_start_at)
        {
            return std::nullopt;
        }
        return *dispense_start_at - *owner_selection_at;
    }

    json to_json(const RunSummary &s)
    {
        return json{
            {"first_detection_at", opt(s.first_detection_at)},
            {"notify_published_at", opt(s.notify_published_at)},
            {"owner_selection_at", opt(s.owner_selection_at)},
            {"dispense_start_at", opt(s.dispense_start_at)},
            {"first_full_reading_at", opt(s.first_full_reading_at)},
            {"dispense_stop_at", opt(s.dispense_stop_at)},
            {"dispense_feed", s.dispense_feed},
            {"time_to_notify", opt(s.time_to_notify())},
            {"time_to_dispense", opt(s.time_to_dispense())},
            {"initial_fill", s.initial_fill},
            {"final_fill", s.final_fill},
            {"initial_mass_g", s.initial_mass_g},
            {"final_mass_g", s.final_mass_g},
            {"mass_balance_error_g", s.mass_balance_error_g},
            {"ir_writes_accepted", s.ir_writes_accepted},
            {"ir_writes_with_presence", s.ir_writes_with_presence},
            {"servo_commands", s.servo_commands},
            {"app_entries", s.app_entries},
        };
    }

    std::string serialize(const RunReport &r)
    {
        json events = json::array();
        for (const auto &e : r.events)
        {
            events.push_back(json::array({e.at, e.kind, e.detail}));
        }
        json series = json::array();
        for (const auto &row : r.series)
        {
            series.push_back(json::array({row.time, row.fill, opt(row.distance), row.phase, opt(row.field1), opt(row.field2), row.selection}));
        }
        const json doc{
            {"scenario", r.scenario},
            {"seed", r.seed},
            {"tick", r.tick},
            {"summary", to_json(r.summary)},
            {"violations", r.violations},
            {"events", std::move(events)},
            {"series_columns", {"time", "fill", "distance", "phase", "field1", "field2", "selection"}},
            {"series", std::move(series)},
        };
        return doc.dump() + '\n';
    }

    std::string describe(const RunReport &r)
    {
        const RunSummary &s = r.summary;
        std::ostringstream out;
        out << "scenario " << r.scenario << " (seed " << r.seed << ")\n"
            << "  pet first detected   " << seconds_or_dash(s.first_detection_at) << '\n'
            << "  notify published     " << seconds_or_dash(s.notify_published_at) << '\n'
            << "  owner selection      " << seconds_or_dash(s.owner_selection_at) << '\n'
            << "  dispense start       " << seconds_or_dash(s.dispense_start_at);
        if (s.dispense_feed)
        {
            out << " (feed " << s.dispense_feed << ')';
        }
        out << '\n'
            << "  dispense stop        " << seconds_or_dash(s.dispense_stop_at) << '\n'
            << "  fill                 " << s.initial_fill << " -> " << s.final_fill << '\n'
            << "  mass balance error   " << s.mass_balance_error_g << " g\n"
            << "  IR writes accepted   " << s.ir_writes_accepted << " (" << s.ir_writes_with_presence << " with pet present)\n"
            << "  servo commands       " << s.servo_commands << '\n';
        if (r.violations.empty())
        {
            out << "  invariants           ok\n";
        }
        for (const auto &v : r.violations)
        {
            out << "  VIOLATION            " << v << '\n';
        }
        return out.str();
    }
}
