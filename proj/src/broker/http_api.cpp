#include "petfeed/broker/http_api.hpp"

#include "petfeed/broker/json_codec.hpp"

#include <httplib.h>

#include <charconv>

namespace petfeed::broker
{
    using nlohmann::json;

    namespace
    {
        constexpr const char *kJson = "application/json";

        void send_error(httplib::Response &res, int status, const std::string &message)
        {
            res.status = status;
            res.set_content(json{{"error", message}}.dump(), kJson);
        }

        std::string api_key(const httplib::Request &req)
        {
            if (req.has_param("api_key"))
            {
                return req.get_param_value("api_key");
            }
            return req.get_header_value("X-THINGSPEAKAPIKEY");
        }

        bool admin_ok(const httplib::Request &req, const std::string &token)
        {
            return !token.empty() && req.get_header_value("X-Admin-Token") == token;
        }

        template <typename T>
        std::optional<T> parse_number(const std::string &text)
        {
            T value{};
            const auto *end = text.data() + text.size();
            const auto [ptr, ec] = std::from_chars(text.data(), end, value);
            if (ec != std::errc{} || ptr != end)
            {
                return std::nullopt;
            }
            return value;
        }

        std::optional<ChannelId> path_channel(const httplib::Request &req)
        {
            return parse_number<ChannelId>(req.matches[1].str());
        }

        /// Runs a read handler, mapping broker errors to HTTP statuses.
        template <typename Fn>
        void guarded_read(httplib::Response &res, Fn &&fn)
        {
            try
            {
                fn();
            }
            catch (const BrokerError &e)
            {
                switch (e.code())
                {
                case ErrorCode::Unauthorized: send_error(res, 401, e.what()); break;
                case ErrorCode::NotFound: send_error(res, 404, e.what()); break;
                case ErrorCode::InvalidArgument: send_error(res, 400, e.what()); break;
                case ErrorCode::Storage: send_error(res, 500, e.what()); break;
                }
            }
        }

        ChannelSpec spec_from_body(const json &body)
        {
            ChannelSpec spec;
            spec.name = body.at("name").get<std::string>();
            if (body.contains("field_names"))
            {
                spec.field_names = body["field_names"].get<std::vector<std::string>>();
            }
            spec.status_note = body.value("status", std::string{});
            spec.public_read = body.value("public", false);
            if (body.contains("min_interval"))
            {
                spec.policy = RateLimitPolicy{sim::from_seconds(body["min_interval"].get<double>())};
            }
            if (body.contains("location"))
            {
                const auto &loc = body["location"];
                spec.location = Location{loc.value("latitude", 0.0), loc.value("longitude", 0.0), loc.value("elevation", 0.0)};
            }
            return spec;
        }
    }

    long retry_after_header_seconds(Duration retry_after) noexcept
    {
        constexpr std::int64_t us = 1'000'000;
        const std::int64_t secs = (retry_after.count() + us - 1) / us;
        return static_cast<long>(std::max<std::int64_t>(1, secs));
    }

    void install_broker_routes(httplib::Server &server, Broker &broker, HttpApiOptions options)
    {
        auto clock = options.clock;
        auto token = options.admin_token;

        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

        server.Options(R"(/.*)", [](const httplib::Request &, httplib::Response &res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type, X-Admin-Token, X-THINGSPEAKAPIKEY");
            res.status = 204;
        });

        server.Post("/channels", [&broker, clock, token](const httplib::Request &req, httplib::Response &res) {
            if (!admin_ok(req, token))
            {
                send_error(res, 403, "admin token required");
                return;
            }
            try
            {
                const Channel c = broker.create_channel(spec_from_body(json::parse(req.body)), clock());
                res.status = 201;
                res.set_content(codec::channel_to_api(c, true).dump(), kJson);
            }
            catch (const json::exception &e)
            {
                send_error(res, 400, std::string("bad channel request: ") + e.what());
            }
            catch (const BrokerError &e)
            {
                send_error(res, e.code() == ErrorCode::InvalidArgument ? 400 : 500, e.what());
            }
        });

        server.Get("/channels", [&broker, token](const httplib::Request &req, httplib::Response &res) {
            if (!admin_ok(req, token))
            {
                send_error(res, 403, "admin token required");
                return;
            }
            json list = json::array();
            for (const auto &c : broker.channels())
            {
                list.push_back(codec::channel_to_api(c, true));
            }
            res.set_content(list.dump(), kJson);
        });

        const auto update = [&broker, clock](const httplib::Request &req, httplib::Response &res) {
            UpdateRequest u;
            for (std::size_t n = 1; n <= kMaxFields; ++n)
            {
                const std::string key = "field" + std::to_string(n);
                if (req.has_param(key))
                {
                    u.set(n, req.get_param_value(key));
                }
            }
            if (req.has_param("status"))
            {
                u.status = req.get_param_value("status");
            }
            if (req.has_param("lat") || req.has_param("long") || req.has_param("elevation"))
            {
                Location loc;
                const auto coord = [&](const char *name, double &out) {
                    if (!req.has_param(name))
                    {
                        return true;
                    }
                    const auto v = parse_number<double>(req.get_param_value(name));
                    if (v)
                    {
                        out = *v;
                    }
                    return v.has_value();
                };
                if (!coord("lat", loc.latitude) || !coord("long", loc.longitude) || !coord("elevation", loc.elevation))
                {
                    res.status = 400;
                    res.set_content("0", "text/plain");
                    return;
                }
                u.location = loc;
            }

            const WriteResult r = broker.write_update(api_key(req), u, clock());
            switch (r.status)
            {
            case WriteResult::Status::Accepted:
                res.set_content(std::to_string(r.entry_id), "text/plain");
                break;
            case WriteResult::Status::RateLimited:
                res.set_header("Retry-After", std::to_string(retry_after_header_seconds(r.retry_after)));
                res.set_content("0", "text/plain");
                break;
            case WriteResult::Status::Unauthorized:
                res.status = 401;
                res.set_content("0", "text/plain");
                break;
            }
        };
        server.Get("/update", update);
        server.Post("/update", update);

        server.Get(R"(/channels/(\d+)/feeds/last\.json)", [&broker](const httplib::Request &req, httplib::Response &res) {
            const auto id = path_channel(req);
            if (!id)
            {
                send_error(res, 404, "bad channel id");
                return;
            }
            guarded_read(res, [&] {
                const auto entry = broker.read_last(*id, api_key(req));
                res.set_content(entry ? codec::entry_to_api(*entry).dump() : std::string("-1"), kJson);
            });
        });

        server.Get(R"(/channels/(\d+)/feeds\.json)", [&broker](const httplib::Request &req, httplib::Response &res) {
            const auto id = path_channel(req);
            if (!id)
            {
                send_error(res, 404, "bad channel id");
                return;
            }
            std::optional<EntryId> since;
            if (req.has_param("since"))
            {
                since = parse_number<EntryId>(req.get_param_value("since"));
                if (!since)
                {
                    send_error(res, 400, "since must be a non-negative integer");
                    return;
                }
            }
            guarded_read(res, [&] {
                const auto entries = broker.read_feed(*id, api_key(req), since);
                json feeds = json::array();
                for (const auto &e : entries)
                {
                    feeds.push_back(codec::entry_to_api(e));
                }
                json body{{"channel", codec::channel_to_api(broker.channel(*id), false)}, {"feeds", std::move(feeds)}};
                res.set_content(body.dump(), kJson);
            });
        });
    }
}
