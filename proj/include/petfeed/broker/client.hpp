#pragma once

#include "petfeed/broker/types.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace petfeed::broker
{
    class Broker;

    enum class CallStatus : std::uint8_t
    {
        Ok,
        RateLimited,
        Unauthorized,
        NotFound,
        Unreachable,
        Failed,
    };

    std::string_view to_string(CallStatus status) noexcept;

    struct UpdateOutcome
    {
        CallStatus status = CallStatus::Failed;
        EntryId entry_id = 0;
        Duration retry_after{};
    };

    struct ReadOutcome
    {
        CallStatus status = CallStatus::Failed;
        std::optional<FeedEntry> entry;
    };

    /// What the device needs from the broker. Implementations never throw
    /// for transport or protocol failures; those come back as a status.
    class BrokerClient
    {
    public:
        virtual ~BrokerClient() = default;

        virtual UpdateOutcome update(std::string_view write_key, const UpdateRequest &update, SimTime now) = 0;
        virtual ReadOutcome read_last(ChannelId channel, std::string_view read_key, SimTime now) = 0;
    };

    /// Direct calls into an in-process broker; `now` is the broker's time.
    class LocalBrokerClient final : public BrokerClient
    {
    public:
        explicit LocalBrokerClient(Broker &broker) : broker_(broker) {}

        UpdateOutcome update(std::string_view write_key, const UpdateRequest &update, SimTime now) override;
        ReadOutcome read_last(ChannelId channel, std::string_view read_key, SimTime now) override;

    private:
        Broker &broker_;
    };
}
