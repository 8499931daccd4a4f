#include "petfeed/firmware/device.hpp"

namespace petfeed::firmware
{
    using broker::CallStatus;

    namespace
    {
        constexpr const char *kNotifyStatus = "pet detected";

        bool window_open(const std::optional<sim::SimTime> &next, sim::SimTime now)
        {
            return !next || now >= *next;
        }
    }

    Device::Device(ControllerConfig config, PinMap pins, devices::UltrasonicConfig ultrasonic, DeviceLinks links, broker::BrokerClient &client)
        : config_(config), pins_(pins), ultrasonic_(ultrasonic), links_(std::move(links)), client_(client)
    {
        pins_.validate();
        ultrasonic_.validate();
    }

    TickReport Device::tick(sim::SimTime now, PinBus &bus)
    {
        TickReport report;
        report.at = now;
        report.before = state_.phase;

        report.ir_detected = bus.digital_read(pins_.ir_out) == devices::Level::Low;
        const devices::EchoResult echo = bus.pulse_in(pins_.trig, pins_.echo, config_.trigger_hold);
        if (echo.is_pulse())
        {
            report.distance = devices::pulse_to_distance(ultrasonic_, echo.pulse_width);
            report.bowl_full = *report.distance <= config_.full_threshold;
        }

        if (window_open(next_poll_at_, now))
        {
            next_poll_at_ = now + config_.poll_interval;
            const broker::ReadOutcome r = client_.read_last(links_.app_channel.id, links_.app_channel.read_key, now);
            PollAttempt poll{r.status, std::nullopt, 0};
            if (r.status == CallStatus::Ok)
            {
                state_.last_poll_at = now;
                if (r.entry)
                {
                    poll.entry_id = r.entry->entry_id;
                    poll.selection = decode_selection(r.entry->fields);
                    latest_selection_entry_ = r.entry->entry_id;
                    latest_selection_ = poll.selection;
                }
            }
            report.poll = poll;
        }

        if (latest_selection_entry_ && latest_selection_entry_ != consumed_selection_entry_)
        {
            report.selection = latest_selection_;
            report.selection_entry = latest_selection_entry_;
        }

        Decision d = decide(state_.phase, report.ir_detected, report.bowl_full, report.selection);
        for (const Command &c : d.commands)
        {
            switch (c.kind)
            {
            case CommandKind::NotifyOwner:
                notify_pending_ = true;
                break;
            case CommandKind::OpenServo:
                consumed_selection_entry_ = report.selection_entry;
                bus.servo_write(pins_.servo(c.feed), config_.open_angle);
                break;
            case CommandKind::CloseServos:
                bus.servo_write(pins_.servo1, 0.0);
                bus.servo_write(pins_.servo2, 0.0);
                break;
            }
        }
        state_.phase = d.next;
        report.after = d.next;
        report.commands = std::move(d.commands);

        if (window_open(next_publish_at_, now))
        {
            broker::UpdateRequest update;
            update.fields = encode_ir_fields(report.ir_detected, report.distance);
            const bool notify = notify_pending_;
            if (notify)
            {
                update.status = kNotifyStatus;
            }
            const broker::UpdateOutcome r = client_.update(links_.ir_channel.write_key, update, now);
            PublishAttempt pub{r.status, r.entry_id, {report.ir_detected, report.distance}, notify, r.retry_after};
            switch (r.status)
            {
            case CallStatus::Ok:
                state_.last_publish_at = now;
                next_publish_at_ = now + config_.poll_interval;
                notify_pending_ = false;
                break;
            case CallStatus::RateLimited:
                next_publish_at_ = now + r.retry_after;
                break;
            default:
                next_publish_at_ = now + config_.poll_interval;
                break;
            }
            report.publish = pub;
        }

        return report;
    }
}
