#include "petfeed/broker/http_client.hpp"

#include "petfeed/broker/json_codec.hpp"

#include <httplib.h>

namespace petfeed::broker
{
    using nlohmann::json;

    namespace
    {
        CallStatus status_from_http(int code)
        {
            switch (code)
            {
            case 200:
            case 201: return CallStatus::Ok;
            case 401:
            case 403: return CallStatus::Unauthorized;
            case 404: return CallStatus::NotFound;
            default: return CallStatus::Failed;
            }
        }

        std::string with_key(std::string path, std::string_view key)
        {
            return path + "?api_key=" + httplib::detail::encode_query_param(std::string(key));
        }
    }

    HttpBrokerClient::HttpBrokerClient(const std::string &base_url, std::chrono::milliseconds timeout)
        : client_(std::make_unique<httplib::Client>(base_url))
    {
        client_->set_connection_timeout(timeout);
        client_->set_read_timeout(timeout);
        client_->set_write_timeout(timeout);
    }

    HttpBrokerClient::~HttpBrokerClient() = default;

    UpdateOutcome HttpBrokerClient::update(std::string_view write_key, const UpdateRequest &update, SimTime)
    {
        httplib::Params params{{"api_key", std::string(write_key)}};
        for (std::size_t n = 1; n <= kMaxFields; ++n)
        {
            if (const auto &v = update.fields[n - 1])
            {
                params.emplace("field" + std::to_string(n), *v);
            }
        }
        if (update.status)
        {
            params.emplace("status", *update.status);
        }
        if (update.location)
        {
            params.emplace("lat", std::to_string(update.location->latitude));
            params.emplace("long", std::to_string(update.location->longitude));
            params.emplace("elevation", std::to_string(update.location->elevation));
        }

        const auto res = client_->Post("/update", params);
        if (!res)
        {
            return {CallStatus::Unreachable, 0, {}};
        }
        if (res->status != 200)
        {
            return {status_from_http(res->status), 0, {}};
        }
        if (res->body == "0")
        {
            if (res->has_header("Retry-After"))
            {
                const long secs = std::stol(res->get_header_value("Retry-After"));
                return {CallStatus::RateLimited, 0, std::chrono::seconds{secs}};
            }
            return {CallStatus::Failed, 0, {}};
        }
        try
        {
            return {CallStatus::Ok, std::stoull(res->body), {}};
        }
        catch (const std::exception &)
        {
            return {CallStatus::Failed, 0, {}};
        }
    }

    ReadOutcome HttpBrokerClient::read_last(ChannelId channel, std::string_view read_key, SimTime)
    {
        const auto res = client_->Get(with_key("/channels/" + std::to_string(channel) + "/feeds/last.json", read_key));
        if (!res)
        {
            return {CallStatus::Unreachable, std::nullopt};
        }
        const CallStatus status = status_from_http(res->status);
        if (status != CallStatus::Ok)
        {
            return {status, std::nullopt};
        }
        try
        {
            const json body = json::parse(res->body);
            if (body.is_number() && body.get<int>() == -1)
            {
                return {CallStatus::Ok, std::nullopt};
            }
            return {CallStatus::Ok, codec::entry_from_api(body)};
        }
        catch (const std::exception &)
        {
            return {CallStatus::Failed, std::nullopt};
        }
    }

    HttpBrokerClient::FeedOutcome HttpBrokerClient::read_feed(ChannelId channel, std::string_view read_key, std::optional<EntryId> since)
    {
        std::string path = with_key("/channels/" + std::to_string(channel) + "/feeds.json", read_key);
        if (since)
        {
            path += "&since=" + std::to_string(*since);
        }
        const auto res = client_->Get(path);
        if (!res)
        {
            return {CallStatus::Unreachable, {}};
        }
        const CallStatus status = status_from_http(res->status);
        if (status != CallStatus::Ok)
        {
            return {status, {}};
        }
        try
        {
            FeedOutcome out{CallStatus::Ok, {}};
            const json body = json::parse(res->body);
            for (const auto &e : body.at("feeds"))
            {
                out.entries.push_back(codec::entry_from_api(e));
            }
            return out;
        }
        catch (const std::exception &)
        {
            return {CallStatus::Failed, {}};
        }
    }

    Channel HttpBrokerClient::create_channel(const ChannelSpec &spec, const std::string &admin_token)
    {
        json body{{"name", spec.name}, {"field_names", spec.field_names}, {"status", spec.status_note}, {"public", spec.public_read}};
        if (spec.policy)
        {
            body["min_interval"] = sim::to_seconds(spec.policy->min_interval);
        }
        if (spec.location)
        {
            body["location"] = {{"latitude", spec.location->latitude}, {"longitude", spec.location->longitude}, {"elevation", spec.location->elevation}};
        }
        const auto res = client_->Post("/channels", httplib::Headers{{"X-Admin-Token", admin_token}}, body.dump(), "application/json");
        if (!res)
        {
            throw BrokerError(ErrorCode::Storage, "broker unreachable: " + httplib::to_string(res.error()));
        }
        if (res->status != 201)
        {
            const auto code = res->status == 403 ? ErrorCode::Unauthorized : ErrorCode::InvalidArgument;
            throw BrokerError(code, "create_channel failed (" + std::to_string(res->status) + "): " + res->body);
        }
        return codec::channel_from_api(json::parse(res->body));
    }

    std::vector<Channel> HttpBrokerClient::list_channels(const std::string &admin_token)
    {
        const auto res = client_->Get("/channels", httplib::Headers{{"X-Admin-Token", admin_token}});
        if (!res)
        {
            throw BrokerError(ErrorCode::Storage, "broker unreachable: " + httplib::to_string(res.error()));
        }
        if (res->status != 200)
        {
            throw BrokerError(ErrorCode::Unauthorized, "list_channels failed (" + std::to_string(res->status) + "): " + res->body);
        }
        std::vector<Channel> out;
        for (const auto &c : json::parse(res->body))
        {
            out.push_back(codec::channel_from_api(c));
        }
        return out;
    }
}
