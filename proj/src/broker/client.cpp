#include "petfeed/broker/client.hpp"

#include "petfeed/broker/broker.hpp"

namespace petfeed::broker
{
    std::string_view to_string(CallStatus status) noexcept
    {
        switch (status)
        {
        case CallStatus::Ok: return "ok";
        case CallStatus::RateLimited: return "rate_limited";
        case CallStatus::Unauthorized: return "unauthorized";
        case CallStatus::NotFound: return "not_found";
        case CallStatus::Unreachable: return "unreachable";
        case CallStatus::Failed: return "failed";
        }
        return "failed";
    }

    UpdateOutcome LocalBrokerClient::update(std::string_view write_key, const UpdateRequest &update, SimTime now)
    {
        try
        {
            const WriteResult r = broker_.write_update(write_key, update, now);
            switch (r.status)
            {
            case WriteResult::Status::Accepted: return {CallStatus::Ok, r.entry_id, {}};
            case WriteResult::Status::RateLimited: return {CallStatus::RateLimited, 0, r.retry_after};
            case WriteResult::Status::Unauthorized: return {CallStatus::Unauthorized, 0, {}};
            }
        }
        catch (const BrokerError &)
        {
        }
        return {CallStatus::Failed, 0, {}};
    }

    ReadOutcome LocalBrokerClient::read_last(ChannelId channel, std::string_view read_key, SimTime)
    {
        try
        {
            return {CallStatus::Ok, broker_.read_last(channel, read_key)};
        }
        catch (const BrokerError &e)
        {
            switch (e.code())
            {
            case ErrorCode::Unauthorized: return {CallStatus::Unauthorized, std::nullopt};
            case ErrorCode::NotFound: return {CallStatus::NotFound, std::nullopt};
            default: return {CallStatus::Failed, std::nullopt};
            }
        }
    }
}
