#pragma once

#include "petfeed/broker/client.hpp"

#include <memory>
#include <string>
#include <vector>

namespace httplib
{
    class Client;
}

namespace petfeed::broker
{
    /// Speaks the broker's HTTP API. The server clock is authoritative, so
    /// the `now` arguments are ignored.
    class HttpBrokerClient final : public BrokerClient
    {
    public:
        /// base_url like "http://127.0.0.1:8080".
        explicit HttpBrokerClient(const std::string &base_url, std::chrono::milliseconds timeout = std::chrono::milliseconds{2000});
        ~HttpBrokerClient() override;

        UpdateOutcome update(std::string_view write_key, const UpdateRequest &update, SimTime now) override;
        ReadOutcome read_last(ChannelId channel, std::string_view read_key, SimTime now) override;

        struct FeedOutcome
        {
            CallStatus status = CallStatus::Failed;
            std::vector<FeedEntry> entries;
        };
        FeedOutcome read_feed(ChannelId channel, std::string_view read_key, std::optional<EntryId> since = std::nullopt);

        /// Admin routes. Throw BrokerError on any failure.
        Channel create_channel(const ChannelSpec &spec, const std::string &admin_token);
        std::vector<Channel> list_channels(const std::string &admin_token);

    private:
        std::unique_ptr<httplib::Client> client_;
    };
}
