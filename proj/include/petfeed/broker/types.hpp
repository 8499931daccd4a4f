#pragma once

#include "petfeed/sim/clock.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace petfeed::broker
{
    using sim::Duration;
    using sim::SimTime;

    using ChannelId = std::uint64_t;
    using EntryId = std::uint64_t;

    inline constexpr std::size_t kMaxFields = 8;
    inline constexpr Duration kDefaultMinInterval{15'000'000};

    struct Location
    {
        double latitude = 0.0;
        double longitude = 0.0;
        double elevation = 0.0;

        bool operator==(const Location &) const = default;
    };

    struct RateLimitPolicy
    {
        Duration min_interval = kDefaultMinInterval;

        void validate() const
        {
            if (min_interval.count() <= 0)
            {
                throw std::invalid_argument("rate limit min_interval must be positive");
            }
        }

        bool operator==(const RateLimitPolicy &) const = default;
    };

    using FieldValues = std::array<std::optional<std::string>, kMaxFields>;

    struct Channel
    {
        ChannelId id = 0;
        std::string name;
        std::string write_key;
        std::string read_key;
        std::vector<std::string> field_names;
        std::string status_note;
        std::optional<Location> location;
        bool public_read = false;
        SimTime created_at{};
        std::optional<SimTime> last_write_at;
        RateLimitPolicy policy;

        bool operator==(const Channel &) const = default;
    };

    /// One row of a channel's log.
    struct FeedEntry
    {
        EntryId entry_id = 0;
        SimTime created_at{};
        FieldValues fields;
        std::optional<std::string> status;
        std::optional<Location> location;

        /// fieldN, 1-based.
        const std::optional<std::string> &field(std::size_t n) const { return fields.at(n - 1); }

        bool operator==(const FeedEntry &) const = default;
    };

    /// Payload of a write. Field indices are 0-based here; field1 is fields[0].
    struct UpdateRequest
    {
        FieldValues fields;
        std::optional<std::string> status;
        std::optional<Location> location;

        UpdateRequest &set(std::size_t n, std::string value)
        {
            fields.at(n - 1) = std::move(value);
            return *this;
        }
    };

    struct ChannelSpec
    {
        std::string name;
        std::vector<std::string> field_names;
        std::optional<Location> location;
        std::optional<RateLimitPolicy> policy;
        std::string status_note;
        bool public_read = false;
    };

    enum class ErrorCode : std::uint8_t
    {
        Unauthorized,
        NotFound,
        InvalidArgument,
        Storage,
    };

    class BrokerError : public std::runtime_error
    {
    public:
        BrokerError(ErrorCode code, const std::string &what) : std::runtime_error(what), code_(code) {}

        ErrorCode code() const noexcept { return code_; }

    private:
        ErrorCode code_;
    };

    struct WriteResult
    {
        enum class Status : std::uint8_t
        {
            Accepted,
            RateLimited,
            Unauthorized,
        };

        Status status = Status::Unauthorized;
        EntryId entry_id = 0;       // set iff Accepted
        Duration retry_after{};     // set iff RateLimited

        static WriteResult accepted(EntryId id) { return {Status::Accepted, id, {}}; }
        static WriteResult rate_limited(Duration retry) { return {Status::RateLimited, 0, retry}; }
        static WriteResult unauthorized() { return {Status::Unauthorized, 0, {}}; }

        bool ok() const noexcept { return status == Status::Accepted; }

        bool operator==(const WriteResult &) const = default;
    };
}
