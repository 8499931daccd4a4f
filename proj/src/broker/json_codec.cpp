#include "petfeed/broker/json_codec.hpp"

#include <string>

namespace petfeed::broker::codec
{
    using nlohmann::json;

    namespace
    {
        std::string field_key(std::size_t n) { return "field" + std::to_string(n); }

        std::optional<Location> location_from(const json &j, const char *lat, const char *lon, const char *elev)
        {
            if (!j.contains(lat) && !j.contains(lon) && !j.contains(elev))
            {
                return std::nullopt;
            }
            Location loc;
            loc.latitude = j.value(lat, 0.0);
            loc.longitude = j.value(lon, 0.0);
            loc.elevation = j.value(elev, 0.0);
            return loc;
        }

        void location_into(json &j, const std::optional<Location> &loc)
        {
            if (loc)
            {
                j["latitude"] = loc->latitude;
                j["longitude"] = loc->longitude;
                j["elevation"] = loc->elevation;
            }
        }

        json location_store(const std::optional<Location> &loc)
        {
            if (!loc)
            {
                return nullptr;
            }
            return json{{"latitude", loc->latitude}, {"longitude", loc->longitude}, {"elevation", loc->elevation}};
        }

        std::optional<Location> location_unstore(const json &j)
        {
            if (j.is_null())
            {
                return std::nullopt;
            }
            return Location{j.at("latitude").get<double>(), j.at("longitude").get<double>(), j.at("elevation").get<double>()};
        }
    }

    std::size_t field_index(std::string_view name) noexcept
    {
        constexpr std::string_view prefix = "field";
        if (name.size() != prefix.size() + 1 || name.substr(0, prefix.size()) != prefix)
        {
            return 0;
        }
        const char c = name.back();
        if (c < '1' || c > '8')
        {
            return 0;
        }
        return static_cast<std::size_t>(c - '0');
    }

    json entry_to_api(const FeedEntry &entry)
    {
        json j;
        j["entry_id"] = entry.entry_id;
        j["created_at"] = sim::to_seconds(entry.created_at);
        for (std::size_t n = 1; n <= kMaxFields; ++n)
        {
            if (const auto &v = entry.field(n))
            {
                j[field_key(n)] = *v;
            }
        }
        if (entry.status)
        {
            j["status"] = *entry.status;
        }
        location_into(j, entry.location);
        return j;
    }

    FeedEntry entry_from_api(const json &j)
    {
        FeedEntry e;
        e.entry_id = j.at("entry_id").get<EntryId>();
        e.created_at = sim::from_seconds(j.at("created_at").get<double>());
        for (std::size_t n = 1; n <= kMaxFields; ++n)
        {
            const auto key = field_key(n);
            if (j.contains(key) && !j[key].is_null())
            {
                e.fields[n - 1] = j[key].get<std::string>();
            }
        }
        if (j.contains("status") && !j["status"].is_null())
        {
            e.status = j["status"].get<std::string>();
        }
        e.location = location_from(j, "latitude", "longitude", "elevation");
        return e;
    }

    json channel_to_api(const Channel &c, bool with_keys)
    {
        json j;
        j["id"] = c.id;
        j["name"] = c.name;
        for (std::size_t n = 1; n <= c.field_names.size(); ++n)
        {
            j[field_key(n)] = c.field_names[n - 1];
        }
        j["status"] = c.status_note;
        j["public"] = c.public_read;
        j["created_at"] = sim::to_seconds(c.created_at);
        j["min_interval"] = sim::to_seconds(c.policy.min_interval);
        if (c.last_write_at)
        {
            j["last_write_at"] = sim::to_seconds(*c.last_write_at);
        }
        location_into(j, c.location);
        if (with_keys)
        {
            j["write_key"] = c.write_key;
            j["read_key"] = c.read_key;
        }
        return j;
    }

    Channel channel_from_api(const json &j)
    {
        Channel c;
        c.id = j.at("id").get<ChannelId>();
        c.name = j.at("name").get<std::string>();
        for (std::size_t n = 1; n <= kMaxFields; ++n)
        {
            const auto key = field_key(n);
            if (!j.contains(key))
            {
                break;
            }
            c.field_names.push_back(j[key].get<std::string>());
        }
        c.status_note = j.value("status", std::string{});
        c.public_read = j.value("public", false);
        c.created_at = sim::from_seconds(j.value("created_at", 0.0));
        c.policy.min_interval = sim::from_seconds(j.value("min_interval", sim::to_seconds(kDefaultMinInterval)));
        if (j.contains("last_write_at"))
        {
            c.last_write_at = sim::from_seconds(j["last_write_at"].get<double>());
        }
        c.location = location_from(j, "latitude", "longitude", "elevation");
        c.write_key = j.value("write_key", std::string{});
        c.read_key = j.value("read_key", std::string{});
        return c;
    }

    json channel_to_store(const Channel &c)
    {
        return json{
            {"id", c.id},
            {"name", c.name},
            {"write_key", c.write_key},
            {"read_key", c.read_key},
            {"field_names", c.field_names},
            {"status_note", c.status_note},
            {"location", location_store(c.location)},
            {"public", c.public_read},
            {"created_at_us", c.created_at.count()},
            {"last_write_at_us", c.last_write_at ? json(c.last_write_at->count()) : json(nullptr)},
            {"min_interval_us", c.policy.min_interval.count()},
        };
    }

    Channel channel_from_store(const json &j)
    {
        Channel c;
        c.id = j.at("id").get<ChannelId>();
        c.name = j.at("name").get<std::string>();
        c.write_key = j.at("write_key").get<std::string>();
        c.read_key = j.at("read_key").get<std::string>();
        c.field_names = j.at("field_names").get<std::vector<std::string>>();
        c.status_note = j.at("status_note").get<std::string>();
        c.location = location_unstore(j.at("location"));
        c.public_read = j.at("public").get<bool>();
        c.created_at = Duration{j.at("created_at_us").get<std::int64_t>()};
        if (const auto &lw = j.at("last_write_at_us"); !lw.is_null())
        {
            c.last_write_at = Duration{lw.get<std::int64_t>()};
        }
        c.policy.min_interval = Duration{j.at("min_interval_us").get<std::int64_t>()};
        return c;
    }

    json entry_to_store(const FeedEntry &e)
    {
        json fields = json::array();
        for (const auto &f : e.fields)
        {
            fields.push_back(f ? json(*f) : json(nullptr));
        }
        return json{
            {"entry_id", e.entry_id},
            {"created_at_us", e.created_at.count()},
            {"fields", std::move(fields)},
            {"status", e.status ? json(*e.status) : json(nullptr)},
            {"location", location_store(e.location)},
        };
    }

    FeedEntry entry_from_store(const json &j)
    {
        FeedEntry e;
        e.entry_id = j.at("entry_id").get<EntryId>();
        e.created_at = Duration{j.at("created_at_us").get<std::int64_t>()};
        const auto &fields = j.at("fields");
        if (!fields.is_array() || fields.size() != kMaxFields)
        {
            throw std::invalid_argument("stored entry must carry exactly 8 field slots");
        }
        for (std::size_t i = 0; i < kMaxFields; ++i)
        {
            if (!fields[i].is_null())
            {
                e.fields[i] = fields[i].get<std::string>();
            }
        }
        if (const auto &s = j.at("status"); !s.is_null())
        {
            e.status = s.get<std::string>();
        }
        e.location = location_unstore(j.at("location"));
        return e;
    }
}
