#pragma once

#include "petfeed/broker/journal.hpp"
#include "petfeed/broker/types.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace petfeed::broker
{
    struct BrokerOptions
    {
        /// Seeds API key generation; equal seeds issue equal keys.
        std::uint64_t key_seed = 0;
        RateLimitPolicy default_policy;
        /// When set, every mutation is journaled here, and an existing
        /// journal is replayed on construction.
        std::optional<std::filesystem::path> journal_path;
    };

    /// Channel telemetry service: up to 8 fields per channel, separate read
    /// and write keys, and a per-channel minimum write interval.
    ///
    /// Thread safe. Writes to one channel are serialized so the rate check
    /// and the append are atomic; reads take a shared lock and copy.
    class Broker
    {
    public:
        explicit Broker(BrokerOptions options = {});
        ~Broker();

        Broker(const Broker &) = delete;
        Broker &operator=(const Broker &) = delete;

        /// Throws BrokerError(InvalidArgument) for more than 8 field names
        /// or an empty name.
        Channel create_channel(const ChannelSpec &spec, SimTime now);

        /// Never throws for auth or rate failures; a rejection leaves state
        /// untouched.
        WriteResult write_update(std::string_view write_key, const UpdateRequest &update, SimTime now);

        /// Throws BrokerError(NotFound | Unauthorized).
        std::optional<FeedEntry> read_last(ChannelId id, std::string_view read_key) const;

        /// Entries with entry_id > since (all when since is empty), ascending.
        std::vector<FeedEntry> read_feed(ChannelId id, std::string_view read_key, std::optional<EntryId> since = std::nullopt) const;

        // Admin surface, no key checks.
        Channel channel(ChannelId id) const;
        std::vector<Channel> channels() const;
        std::optional<ChannelId> find_channel(std::string_view name) const;

        /// Canonical serialization of every channel and entry. Two brokers
        /// with equal state produce byte-identical dumps.
        std::string state_dump() const;

        const BrokerOptions &options() const noexcept { return options_; }

    private:
        struct ChannelRecord
        {
            mutable std::shared_mutex mutex;
            Channel channel;
            std::vector<FeedEntry> entries;
        };

        void replay(const std::filesystem::path &path);
        void insert_channel(Channel channel);
        std::string issue_key(ChannelId id, int kind, std::string_view sibling);
        const ChannelRecord &record(ChannelId id) const;
        static void check_read(const ChannelRecord &rec, std::string_view read_key);

        BrokerOptions options_;
        mutable std::shared_mutex registry_mutex_;
        std::map<ChannelId, std::unique_ptr<ChannelRecord>> channels_;
        std::unordered_map<std::string, ChannelId> write_keys_;
        std::unordered_map<std::string, ChannelId> read_keys_;
        ChannelId next_id_ = 1;
        std::unique_ptr<Journal> journal_;
    };
}
