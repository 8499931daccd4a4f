#include "petfeed/broker/broker.hpp"

#include "petfeed/broker/json_codec.hpp"

#include <mutex>
#include <random>

namespace petfeed::broker
{
    using nlohmann::json;

    namespace
    {
        constexpr std::string_view kKeyAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
        constexpr std::size_t kKeyLength = 16;

        constexpr int kWriteKey = 1;
        constexpr int kReadKey = 2;
    }

    Broker::Broker(BrokerOptions options) : options_(std::move(options))
    {
        options_.default_policy.validate();
        if (options_.journal_path)
        {
            replay(*options_.journal_path);
            journal_ = std::make_unique<Journal>(*options_.journal_path);
        }
    }

    Broker::~Broker() = default;

    std::string Broker::issue_key(ChannelId id, int kind, std::string_view sibling)
    {
        for (std::uint32_t attempt = 0;; ++attempt)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(options_.key_seed), static_cast<std::uint32_t>(options_.key_seed >> 32),
                              static_cast<std::uint32_t>(id), static_cast<std::uint32_t>(id >> 32), static_cast<std::uint32_t>(kind), attempt};
            std::mt19937_64 rng(seq);
            std::string key(kKeyLength, ' ');
            for (char &ch : key)
            {
                ch = kKeyAlphabet[rng() % kKeyAlphabet.size()];
            }
            if (key != sibling && !write_keys_.contains(key) && !read_keys_.contains(key))
            {
                return key;
            }
        }
    }

    void Broker::insert_channel(Channel channel)
    {
        const ChannelId id = channel.id;
        write_keys_.emplace(channel.write_key, id);
        read_keys_.emplace(channel.read_key, id);
        auto rec = std::make_unique<ChannelRecord>();
        rec->channel = std::move(channel);
        channels_.emplace(id, std::move(rec));
        next_id_ = std::max(next_id_, id + 1);
    }

    Channel Broker::create_channel(const ChannelSpec &spec, SimTime now)
    {
        if (spec.name.empty())
        {
            throw BrokerError(ErrorCode::InvalidArgument, "channel name must not be empty");
        }
        if (spec.field_names.size() > kMaxFields)
        {
            throw BrokerError(ErrorCode::InvalidArgument,
                              "a channel has at most 8 fields, got " + std::to_string(spec.field_names.size()));
        }
        const RateLimitPolicy policy = spec.policy.value_or(options_.default_policy);
        try
        {
            policy.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw BrokerError(ErrorCode::InvalidArgument, e.what());
        }

        std::unique_lock lock(registry_mutex_);
        Channel c;
        c.id = next_id_;
        c.name = spec.name;
        c.field_names = spec.field_names;
        c.status_note = spec.status_note;
        c.location = spec.location;
        c.public_read = spec.public_read;
        c.created_at = now;
        c.policy = policy;
        c.write_key = issue_key(c.id, kWriteKey, {});
        c.read_key = issue_key(c.id, kReadKey, c.write_key);

        if (journal_)
        {
            journal_->append(json{{"op", "create"}, {"channel", codec::channel_to_store(c)}});
        }
        insert_channel(c);
        return c;
    }

    WriteResult Broker::write_update(std::string_view write_key, const UpdateRequest &update, SimTime now)
    {
        std::shared_lock registry(registry_mutex_);
        const auto it = write_keys_.find(std::string(write_key));
        if (it == write_keys_.end())
        {
            return WriteResult::unauthorized();
        }
        ChannelRecord &rec = *channels_.at(it->second);
        std::unique_lock lock(rec.mutex);

        Channel &c = rec.channel;
        if (c.last_write_at)
        {
            const Duration elapsed = now - *c.last_write_at;
            if (elapsed < c.policy.min_interval)
            {
                return WriteResult::rate_limited(c.policy.min_interval - elapsed);
            }
        }

        FeedEntry e;
        e.entry_id = rec.entries.empty() ? 1 : rec.entries.back().entry_id + 1;
        e.created_at = now;
        e.fields = update.fields;
        e.status = update.status;
        e.location = update.location;

        if (journal_)
        {
            journal_->append(json{{"op", "append"}, {"channel_id", c.id}, {"entry", codec::entry_to_store(e)}});
        }
        rec.entries.push_back(std::move(e));
        c.last_write_at = now;
        return WriteResult::accepted(rec.entries.back().entry_id);
    }

    const Broker::ChannelRecord &Broker::record(ChannelId id) const
    {
        const auto it = channels_.find(id);
        if (it == channels_.end())
        {
            throw BrokerError(ErrorCode::NotFound, "no channel with id " + std::to_string(id));
        }
        return *it->second;
    }

    void Broker::check_read(const ChannelRecord &rec, std::string_view read_key)
    {
        if (!rec.channel.public_read && read_key != rec.channel.read_key)
        {
            throw BrokerError(ErrorCode::Unauthorized, "read key rejected for channel " + std::to_string(rec.channel.id));
        }
    }

    std::optional<FeedEntry> Broker::read_last(ChannelId id, std::string_view read_key) const
    {
        std::shared_lock registry(registry_mutex_);
        const ChannelRecord &rec = record(id);
        std::shared_lock lock(rec.mutex);
        check_read(rec, read_key);
        if (rec.entries.empty())
        {
            return std::nullopt;
        }
        return rec.entries.back();
    }

    std::vector<FeedEntry> Broker::read_feed(ChannelId id, std::string_view read_key, std::optional<EntryId> since) const
    {
        std::shared_lock registry(registry_mutex_);
        const ChannelRecord &rec = record(id);
        std::shared_lock lock(rec.mutex);
        check_read(rec, read_key);
        // entry_id == index + 1
        const std::size_t skip = since ? static_cast<std::size_t>(std::min<EntryId>(*since, rec.entries.size())) : 0;
        return {rec.entries.begin() + static_cast<std::ptrdiff_t>(skip), rec.entries.end()};
    }

    Channel Broker::channel(ChannelId id) const
    {
        std::shared_lock registry(registry_mutex_);
        const ChannelRecord &rec = record(id);
        std::shared_lock lock(rec.mutex);
        return rec.channel;
    }

    std::vector<Channel> Broker::channels() const
    {
        std::shared_lock registry(registry_mutex_);
        std::vector<Channel> out;
        out.reserve(channels_.size());
        for (const auto &[id, rec] : channels_)
        {
            std::shared_lock lock(rec->mutex);
            out.push_back(rec->channel);
        }
        return out;
    }

    std::optional<ChannelId> Broker::find_channel(std::string_view name) const
    {
        std::shared_lock registry(registry_mutex_);
        for (const auto &[id, rec] : channels_)
        {
            std::shared_lock lock(rec->mutex);
            if (rec->channel.name == name)
            {
                return id;
            }
        }
        return std::nullopt;
    }

    std::string Broker::state_dump() const
    {
        std::shared_lock registry(registry_mutex_);
        json channels = json::array();
        for (const auto &[id, rec] : channels_)
        {
            std::shared_lock lock(rec->mutex);
            json entries = json::array();
            for (const auto &e : rec->entries)
            {
                entries.push_back(codec::entry_to_store(e));
            }
            channels.push_back(json{{"channel", codec::channel_to_store(rec->channel)}, {"entries", std::move(entries)}});
        }
        return json{{"channels", std::move(channels)}, {"next_id", next_id_}}.dump(2) + '\n';
    }

    void Broker::replay(const std::filesystem::path &path)
    {
        const auto records = Journal::read_all(path, /*repair=*/true);
        std::size_t line = 0;
        for (const auto &r : records)
        {
            ++line;
            const auto where = [&] { return path.string() + " record " + std::to_string(line) + ": "; };
            try
            {
                const std::string op = r.at("op").get<std::string>();
                if (op == "create")
                {
                    Channel c = codec::channel_from_store(r.at("channel"));
                    if (channels_.contains(c.id))
                    {
                        throw BrokerError(ErrorCode::Storage, where() + "duplicate channel id");
                    }
                    insert_channel(std::move(c));
                }
                else if (op == "append")
                {
                    const auto id = r.at("channel_id").get<ChannelId>();
                    const auto it = channels_.find(id);
                    if (it == channels_.end())
                    {
                        throw BrokerError(ErrorCode::Storage, where() + "append to unknown channel");
                    }
                    ChannelRecord &rec = *it->second;
                    FeedEntry e = codec::entry_from_store(r.at("entry"));
                    if (e.entry_id != rec.entries.size() + 1)
                    {
                        throw BrokerError(ErrorCode::Storage, where() + "entry ids are not dense");
                    }
                    rec.channel.last_write_at = e.created_at;
                    rec.entries.push_back(std::move(e));
                }
                else
                {
                    throw BrokerError(ErrorCode::Storage, where() + "unknown op '" + op + "'");
                }
            }
            catch (const json::exception &e)
            {
                throw BrokerError(ErrorCode::Storage, where() + e.what());
            }
        }
    }
}
