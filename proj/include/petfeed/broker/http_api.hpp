#pragma once

#include "petfeed/broker/broker.hpp"

#include <functional>
#include <string>

namespace httplib
{
    class Server;
}

namespace petfeed::broker
{
    /// Environment variable holding the token that guards POST /channels.
    inline constexpr const char *kAdminTokenEnv = "PETFEED_ADMIN_TOKEN";

    struct HttpApiOptions
    {
        /// Empty disables the admin routes.
        std::string admin_token;
        /// Source of `now` for writes. Virtual in tests, scaled wall time live.
        std::function<SimTime()> clock;
    };

    /// Registers the channel routes on `server`:
    ///
    ///   POST /channels                                  create (admin)
    ///   GET  /channels                                  list (admin)
    ///   GET|POST /update?api_key=K&field1=V&...         write; body is the new
    ///                                                   entry_id, or "0" with a
    ///                                                   Retry-After header
    ///   GET  /channels/{id}/feeds/last.json?api_key=K   latest entry, or -1
    ///   GET  /channels/{id}/feeds.json?api_key=K&since=N
    ///
    /// The broker and the clock must outlive the server.
    void install_broker_routes(httplib::Server &server, Broker &broker, HttpApiOptions options);

    /// Whole seconds for a Retry-After header, rounded up and at least 1.
    long retry_after_header_seconds(Duration retry_after) noexcept;
}
