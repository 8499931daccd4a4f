#include "petfeed/harness/agents.hpp"

#include "petfeed/firmware/codec.hpp"

namespace petfeed::harness
{
    using broker::CallStatus;

    bool OutageClient::down(SimTime now) const noexcept
    {
        for (const auto &w : windows_)
        {
            if (now >= w.start && now < w.end)
            {
                return true;
            }
        }
        return false;
    }

    broker::UpdateOutcome OutageClient::update(std::string_view write_key, const broker::UpdateRequest &update, SimTime now)
    {
        if (down(now))
        {
            return {CallStatus::Unreachable, 0, {}};
        }
        return inner_.update(write_key, update, now);
    }

    broker::ReadOutcome OutageClient::read_last(broker::ChannelId channel, std::string_view read_key, SimTime now)
    {
        if (down(now))
        {
            return {CallStatus::Unreachable, std::nullopt};
        }
        return inner_.read_last(channel, read_key, now);
    }

    std::optional<OwnerAction> ScriptedOwner::tick(SimTime now)
    {
        if (!rule_.enabled || wrote_at_)
        {
            return std::nullopt;
        }

        if (!noticed_at_)
        {
            if (next_read_at_ && now < *next_read_at_)
            {
                return std::nullopt;
            }
            next_read_at_ = now + rule_.poll_period;
            const auto r = client_.read_last(links_.ir_channel.id, links_.ir_channel.read_key, now);
            if (r.status != CallStatus::Ok || !r.entry)
            {
                return std::nullopt;
            }
            const auto reading = firmware::decode_ir_fields(r.entry->fields);
            if (!reading || !reading->detected)
            {
                return std::nullopt;
            }
            noticed_at_ = now;
            next_write_at_ = now + rule_.delay;
            return OwnerAction{OwnerAction::Kind::Noticed, now, CallStatus::Ok, r.entry->entry_id, 0};
        }

        if (now < *next_write_at_)
        {
            return std::nullopt;
        }
        broker::UpdateRequest u;
        u.fields = firmware::encode_selection(rule_.selection);
        const auto r = client_.update(links_.app_channel.write_key, u, now);
        switch (r.status)
        {
        case CallStatus::Ok:
            wrote_at_ = now;
            break;
        case CallStatus::RateLimited:
            next_write_at_ = now + r.retry_after;
            break;
        default:
            next_write_at_ = now + rule_.poll_period;
            break;
        }
        return OwnerAction{OwnerAction::Kind::Wrote, now, r.status, r.entry_id, rule_.selection};
    }
}
