#include "petfeed/firmware/controller.hpp"

#include <stdexcept>

namespace petfeed::firmware
{
    Phase Phase::dispensing(int feed)
    {
        if (feed != 1 && feed != 2)
        {
            throw std::invalid_argument("dispensing needs feed 1 or 2");
        }
        return Phase(PhaseKind::Dispensing, feed);
    }

    std::string Phase::name() const
    {
        switch (kind_)
        {
        case PhaseKind::Idle: return "Idle";
        case PhaseKind::Detected: return "Detected";
        case PhaseKind::AwaitingChoice: return "AwaitingChoice";
        case PhaseKind::Dispensing: return "Dispensing(" + std::to_string(feed_) + ")";
        case PhaseKind::BowlFull: return "BowlFull";
        }
        return "?";
    }

    std::optional<Phase> Phase::parse(std::string_view name)
    {
        if (name == "Idle") return idle();
        if (name == "Detected") return detected();
        if (name == "AwaitingChoice") return awaiting_choice();
        if (name == "BowlFull") return bowl_full();
        if (name == "Dispensing(1)") return dispensing(1);
        if (name == "Dispensing(2)") return dispensing(2);
        return std::nullopt;
    }

    std::string Command::name() const
    {
        switch (kind)
        {
        case CommandKind::NotifyOwner: return "notify_owner";
        case CommandKind::OpenServo: return "open_servo(" + std::to_string(feed) + ")";
        case CommandKind::CloseServos: return "close_servos";
        }
        return "?";
    }

    Decision decide(Phase phase, bool ir_detected, bool bowl_full, int selection)
    {
        if (selection < 0 || selection > 2)
        {
            throw std::invalid_argument("selection must be 0, 1 or 2");
        }

        switch (phase.kind())
        {
        case PhaseKind::Idle:
            if (ir_detected)
            {
                return {Phase::detected(), {Command::notify_owner()}};
            }
            break;
        case PhaseKind::Detected:
            return {bowl_full ? Phase::bowl_full() : Phase::awaiting_choice(), {}};
        case PhaseKind::AwaitingChoice:
            if (selection > 0)
            {
                return {Phase::dispensing(selection), {Command::open_servo(selection)}};
            }
            break;
        case PhaseKind::Dispensing:
            if (bowl_full)
            {
                return {Phase::bowl_full(), {Command::close_servos()}};
            }
            break;
        case PhaseKind::BowlFull:
            if (!ir_detected)
            {
                return {Phase::idle(), {}};
            }
            break;
        }
        return {phase, {}};
    }

    void ControllerConfig::validate(double d_full, double d_empty) const
    {
        if (poll_interval.count() <= 0)
        {
            throw std::invalid_argument("poll_interval must be positive");
        }
        if (!(d_full <= full_threshold && full_threshold < d_empty))
        {
            throw std::invalid_argument("full_threshold must satisfy d_full <= threshold < d_empty");
        }
        if (!(trigger_hold >= 0.0))
        {
            throw std::invalid_argument("trigger_hold must be non-negative");
        }
        if (!(open_angle > 0.0 && open_angle <= 180.0))
        {
            throw std::invalid_argument("open_angle must be in (0, 180]");
        }
    }
}
