#pragma once

#include "petfeed/sim/clock.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace petfeed::firmware
{
    enum class PhaseKind : std::uint8_t
    {
        Idle,
        Detected,
        AwaitingChoice,
        Dispensing,
        BowlFull,
    };

    /// Controller position in the feeding flow. `feed` is 1 or 2 while
    /// Dispensing and 0 otherwise.
    class Phase
    {
    public:
        constexpr Phase() = default;

        static constexpr Phase idle() { return Phase(PhaseKind::Idle, 0); }
        static constexpr Phase detected() { return Phase(PhaseKind::Detected, 0); }
        static constexpr Phase awaiting_choice() { return Phase(PhaseKind::AwaitingChoice, 0); }
        static constexpr Phase bowl_full() { return Phase(PhaseKind::BowlFull, 0); }
        /// Throws std::invalid_argument unless feed is 1 or 2.
        static Phase dispensing(int feed);

        constexpr PhaseKind kind() const noexcept { return kind_; }
        constexpr int feed() const noexcept { return feed_; }

        /// "Idle", "Detected", "AwaitingChoice", "Dispensing(1)", ...
        std::string name() const;
        static std::optional<Phase> parse(std::string_view name);

        constexpr bool operator==(const Phase &) const = default;

    private:
        constexpr Phase(PhaseKind kind, int feed) : kind_(kind), feed_(feed) {}

        PhaseKind kind_ = PhaseKind::Idle;
        int feed_ = 0;
    };

    enum class CommandKind : std::uint8_t
    {
        NotifyOwner,
        OpenServo,
        CloseServos,
    };

    struct Command
    {
        CommandKind kind = CommandKind::NotifyOwner;
        int feed = 0;  // OpenServo only

        static constexpr Command notify_owner() { return {CommandKind::NotifyOwner, 0}; }
        static constexpr Command open_servo(int feed) { return {CommandKind::OpenServo, feed}; }
        static constexpr Command close_servos() { return {CommandKind::CloseServos, 0}; }

        /// "notify_owner", "open_servo(1)", "close_servos"
        std::string name() const;

        constexpr bool operator==(const Command &) const = default;
    };

    struct Decision
    {
        Phase next;
        std::vector<Command> commands;

        bool operator==(const Decision &) const = default;
    };

    /// The feeding flow as a pure transition function.
    ///
    ///   Idle           + pet seen      -> Detected, notify the owner
    ///   Detected       + bowl full     -> BowlFull (nothing to dispense)
    ///   Detected       + bowl not full -> AwaitingChoice
    ///   AwaitingChoice + selection i   -> Dispensing(i), open servo i
    ///   Dispensing(i)  + bowl full     -> BowlFull, close servos
    ///   BowlFull       + pet gone      -> Idle
    ///
    /// Every other input holds the phase and emits nothing. selection must be
    /// 0 (none), 1 or 2; anything else throws std::invalid_argument.
    Decision decide(Phase phase, bool ir_detected, bool bowl_full, int selection);

    struct ControllerConfig
    {
        sim::Duration poll_interval{15'000'000};
        /// Surface distance (m) at or below which the bowl counts as full.
        double full_threshold = 0.045;
        /// Trigger pulse the firmware drives on TRIG, seconds.
        double trigger_hold = 10e-6;
        /// Servo angle used for an open valve.
        double open_angle = 180.0;

        /// Requires poll_interval > 0 and d_full <= full_threshold < d_empty.
        void validate(double d_full, double d_empty) const;
    };
}
