#include "petfeed/harness/runner.hpp"

#include "petfeed/firmware/codec.hpp"

#include <cmath>

namespace petfeed::harness
{
    using broker::CallStatus;
    using firmware::CommandKind;
    using firmware::PhaseKind;
    using firmware::format_decimal;

    namespace
    {
        std::unique_ptr<broker::Broker> make_broker(const Scenario &s, const RunOptions &o)
        {
            broker::BrokerOptions bo;
            bo.key_seed = s.seed;
            bo.default_policy = s.policy;
            bo.journal_path = o.journal_path;
            return std::make_unique<broker::Broker>(bo);
        }

        firmware::ChannelBinding ensure_channel(broker::Broker &b, const std::string &name, std::vector<std::string> fields)
        {
            std::optional<broker::ChannelId> id = b.find_channel(name);
            if (!id)
            {
                id = b.create_channel({name, std::move(fields), std::nullopt, std::nullopt, {}, false}, SimTime{}).id;
            }
            const broker::Channel c = b.channel(*id);
            return {c.id, c.write_key, c.read_key};
        }

        firmware::DeviceLinks make_links(broker::Broker &b)
        {
            return {ensure_channel(b, "IRCh", {"presence", "distance"}), ensure_channel(b, "AppChannel", {"selection"})};
        }

        sim::WorldState initial_world(const Scenario &s)
        {
            sim::WorldState w;
            w.bowl_fill = s.initial_fill;
            w.hopper_mass = s.hopper_mass;
            return w;
        }

        std::string reading_text(bool detected, const std::optional<double> &distance)
        {
            return std::string("ir=") + (detected ? "1" : "0") + " distance=" + (distance ? format_decimal(*distance) : "timeout");
        }
    }

    ScenarioRunner::ScenarioRunner(Scenario scenario, RunOptions options)
        : scenario_((scenario.validate(), std::move(scenario))),
          options_(std::move(options)),
          clock_(scenario_.tick),
          broker_(make_broker(scenario_, options_)),
          links_(make_links(*broker_)),
          local_client_(*broker_),
          client_(local_client_, scenario_.outages),
          board_(scenario_.world, initial_world(scenario_), scenario_.ultrasonic, scenario_.ir, scenario_.pins, scenario_.seed),
          device_(std::make_unique<firmware::Device>(scenario_.controller, scenario_.pins, scenario_.ultrasonic, links_, client_)),
          owner_(scenario_.owner, links_, client_)
    {
        report_.scenario = scenario_.name;
        report_.seed = scenario_.seed;
        report_.tick = clock_.tick_seconds();
        report_.summary.initial_fill = board_.world().bowl_fill;
        report_.summary.initial_mass_g = board_.world().total_mass(board_.world_config());
    }

    void ScenarioRunner::log(std::string kind, std::string detail)
    {
        report_.events.push_back({clock_.now_seconds(), std::move(kind), std::move(detail)});
    }

    void ScenarioRunner::violation(std::string what)
    {
        log("violation", what);
        report_.violations.push_back(format_decimal(clock_.now_seconds()) + " s: " + std::move(what));
    }

    void ScenarioRunner::step()
    {
        const SimTime now = clock_.now();

        while (next_pet_event_ < scenario_.pet_events.size() && scenario_.pet_events[next_pet_event_].at <= now)
        {
            const PetEvent &ev = scenario_.pet_events[next_pet_event_++];
            board_.set_pet(ev.present, ev.distance);
            log("pet", ev.present ? "arrive distance=" + format_decimal(ev.distance) : "leave");
        }
        if (const bool down = client_.down(now); down != outage_active_)
        {
            outage_active_ = down;
            log("outage", down ? "begin" : "end");
        }

        const firmware::TickReport tick = device_->tick(now, board_);
        record(tick);

        if (const auto action = owner_.tick(now))
        {
            if (action->kind == OwnerAction::Kind::Noticed)
            {
                log("owner", "noticed pet in IR entry " + std::to_string(action->entry_id));
            }
            else
            {
                std::string detail = "write selection=" + std::to_string(action->selection) + " " + std::string(broker::to_string(action->status));
                if (action->status == CallStatus::Ok)
                {
                    detail += " entry=" + std::to_string(action->entry_id);
                    report_.summary.owner_selection_at = clock_.now_seconds();
                }
                log("owner", std::move(detail));
            }
        }

        check(tick);

        if (options_.record_series)
        {
            report_.series.push_back({clock_.now_seconds(), board_.world().bowl_fill, tick.distance, tick.after.name(), last_field1_,
                                      last_field2_, last_polled_selection_});
        }

        board_.step(clock_);
    }

    void ScenarioRunner::record(const firmware::TickReport &tick)
    {
        RunSummary &s = report_.summary;
        const double t = clock_.now_seconds();

        if (tick.ir_detected && !s.first_detection_at)
        {
            s.first_detection_at = t;
        }

        if (tick.poll)
        {
            const auto &p = *tick.poll;
            if (p.status == CallStatus::Ok)
            {
                if (p.entry_id)
                {
                    last_polled_selection_ = p.selection;
                }
            }
            else
            {
                log("poll", std::string(broker::to_string(p.status)));
            }
        }

        if (tick.before != tick.after)
        {
            log("phase", tick.before.name() + " -> " + tick.after.name());
        }
        for (const auto &c : tick.commands)
        {
            std::string detail = c.name() + " from " + tick.before.name() + " " + reading_text(tick.ir_detected, tick.distance) +
                                 " full=" + (tick.bowl_full ? "1" : "0") + " selection=" + std::to_string(tick.selection);
            if (tick.selection_entry)
            {
                detail += " app_entry=" + std::to_string(*tick.selection_entry);
            }
            log("command", std::move(detail));
            switch (c.kind)
            {
            case CommandKind::OpenServo:
                ++s.servo_commands;
                if (!s.dispense_start_at)
                {
                    s.dispense_start_at = t;
                    s.dispense_feed = c.feed;
                }
                break;
            case CommandKind::CloseServos:
                ++s.servo_commands;
                if (!s.dispense_stop_at)
                {
                    s.dispense_stop_at = t;
                }
                break;
            case CommandKind::NotifyOwner:
                break;
            }
        }
        if (tick.before.kind() == PhaseKind::Dispensing && tick.bowl_full && !s.first_full_reading_at)
        {
            s.first_full_reading_at = t;
        }

        if (tick.publish)
        {
            const auto &p = *tick.publish;
            std::string detail = std::string(broker::to_string(p.status)) + " " + reading_text(p.reading.detected, p.reading.distance);
            if (p.carried_notify)
            {
                detail += " notify";
            }
            if (p.status == CallStatus::Ok)
            {
                detail += " entry=" + std::to_string(p.entry_id);
                ++s.ir_writes_accepted;
                if (p.reading.detected)
                {
                    ++s.ir_writes_with_presence;
                }
                if (p.carried_notify && !s.notify_published_at)
                {
                    s.notify_published_at = t;
                }
                const auto fields = firmware::encode_ir_fields(p.reading.detected, p.reading.distance);
                last_field1_ = fields[0];
                last_field2_ = fields[1];
            }
            else if (p.status == CallStatus::RateLimited)
            {
                detail += " retry_after=" + format_decimal(sim::to_seconds(p.retry_after));
            }
            log("publish", std::move(detail));
        }
    }

    void ScenarioRunner::check(const firmware::TickReport &tick)
    {
        const auto &world = board_.world();
        const auto &cfg = board_.world_config();

        if (!(world.bowl_fill >= 0.0 && world.bowl_fill <= 1.0))
        {
            violation("bowl_fill out of [0, 1]: " + format_decimal(world.bowl_fill));
        }
        for (double m : world.hopper_mass)
        {
            if (m < 0.0)
            {
                violation("negative hopper mass " + format_decimal(m));
            }
        }
        const double err = std::abs(world.total_mass(cfg) - report_.summary.initial_mass_g);
        if (err > kMassTolerance_g && !mass_violation_logged_)
        {
            mass_violation_logged_ = true;
            violation("mass balance error " + format_decimal(err) + " g");
        }

        if (tick.publish && tick.publish->status == CallStatus::Ok)
        {
            if (last_accepted_publish_ && tick.at - *last_accepted_publish_ < scenario_.controller.poll_interval)
            {
                violation("IR publishes closer than poll_interval");
            }
            last_accepted_publish_ = tick.at;
        }

        for (const auto &c : tick.commands)
        {
            if (c.kind == CommandKind::OpenServo &&
                (tick.before.kind() != PhaseKind::AwaitingChoice || tick.selection != c.feed || !tick.selection_entry))
            {
                violation("open_servo not backed by an owner selection in AwaitingChoice");
            }
        }
        if (tick.before.kind() == PhaseKind::Dispensing && tick.bowl_full)
        {
            bool closed = false;
            for (const auto &c : tick.commands)
            {
                closed = closed || c.kind == CommandKind::CloseServos;
            }
            if (!closed)
            {
                violation("bowl read full while dispensing but servos were not closed");
            }
        }
    }

    void ScenarioRunner::run_until(SimTime t)
    {
        while (!done() && clock_.now() < t)
        {
            step();
        }
    }

    RunReport ScenarioRunner::finish()
    {
        run_until(scenario_.duration);
        RunSummary &s = report_.summary;
        const auto &world = board_.world();
        s.final_fill = world.bowl_fill;
        s.final_mass_g = world.total_mass(board_.world_config());
        s.mass_balance_error_g = std::abs(s.final_mass_g - s.initial_mass_g);
        s.app_entries = broker_->read_feed(links_.app_channel.id, links_.app_channel.read_key).size();
        return report_;
    }

    RunReport run_scenario(const Scenario &scenario, const RunOptions &options)
    {
        ScenarioRunner runner(scenario, options);
        return runner.finish();
    }
}
