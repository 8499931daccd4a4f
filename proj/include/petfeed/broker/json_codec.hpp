#pragma once

#include "petfeed/broker/types.hpp"

#include <nlohmann/json.hpp>

namespace petfeed::broker::codec
{
    // Wire shape served over HTTP: times in seconds, fields as fieldN keys,
    // unset fields omitted.
    nlohmann::json entry_to_api(const FeedEntry &entry);
    FeedEntry entry_from_api(const nlohmann::json &j);

    /// Channel metadata. Keys are included only when with_keys is set.
    nlohmann::json channel_to_api(const Channel &channel, bool with_keys);
    Channel channel_from_api(const nlohmann::json &j);

    // Storage shape used by the journal and state dumps: integer microseconds,
    // every member present, so a dump is a pure function of state.
    nlohmann::json channel_to_store(const Channel &channel);
    Channel channel_from_store(const nlohmann::json &j);
    nlohmann::json entry_to_store(const FeedEntry &entry);
    FeedEntry entry_from_store(const nlohmann::json &j);

    /// Parses "field1".."field8" style names; returns 0 if name is not one.
    std::size_t field_index(std::string_view name) noexcept;
}
