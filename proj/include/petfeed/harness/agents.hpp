#pragma once

#include "petfeed/broker/client.hpp"
#include "petfeed/firmware/device.hpp"
#include "petfeed/harness/scenario.hpp"

#include <optional>
#include <vector>

namespace petfeed::harness
{
    /// Passes calls through to `inner` except inside an outage window, where
    /// every call reports Unreachable.
    class OutageClient final : public broker::BrokerClient
    {
    public:
        OutageClient(broker::BrokerClient &inner, std::vector<OutageWindow> windows) : inner_(inner), windows_(std::move(windows)) {}

        bool down(SimTime now) const noexcept;

        broker::UpdateOutcome update(std::string_view write_key, const broker::UpdateRequest &update, SimTime now) override;
        broker::ReadOutcome read_last(broker::ChannelId channel, std::string_view read_key, SimTime now) override;

    private:
        broker::BrokerClient &inner_;
        std::vector<OutageWindow> windows_;
    };

    struct OwnerAction
    {
        enum class Kind : std::uint8_t
        {
            Noticed,   // saw the pet in the IR channel
            Wrote,     // AppChannel write attempted
        };

        Kind kind = Kind::Noticed;
        SimTime at{};
        broker::CallStatus status = broker::CallStatus::Ok;
        broker::EntryId entry_id = 0;
        int selection = 0;
    };

    /// Headless owner. Reads the IR channel every poll_period; once an entry
    /// shows the pet, writes the configured selection `delay` later and keeps
    /// retrying until one write is accepted. Responds to the first sighting only.
    class ScriptedOwner
    {
    public:
        ScriptedOwner(OwnerRule rule, firmware::DeviceLinks links, broker::BrokerClient &client)
            : rule_(rule), links_(std::move(links)), client_(client) {}

        std::optional<OwnerAction> tick(SimTime now);

        std::optional<SimTime> noticed_at() const noexcept { return noticed_at_; }
        std::optional<SimTime> wrote_at() const noexcept { return wrote_at_; }

    private:
        OwnerRule rule_;
        firmware::DeviceLinks links_;
        broker::BrokerClient &client_;

        std::optional<SimTime> next_read_at_;
        std::optional<SimTime> noticed_at_;
        std::optional<SimTime> next_write_at_;
        std::optional<SimTime> wrote_at_;
    };
}
