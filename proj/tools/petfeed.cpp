// Command-line front end: headless scenario runs, the live broker + device
// server, and channel administration.

#include "petfeed/broker/broker.hpp"
#include "petfeed/broker/http_api.hpp"
#include "petfeed/broker/http_client.hpp"
#include "petfeed/broker/json_codec.hpp"
#include "petfeed/harness/live.hpp"
#include "petfeed/harness/runner.hpp"
#include "petfeed/harness/series_csv.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>

namespace
{
    using namespace petfeed;

    constexpr int kExitOk = 0;
    constexpr int kExitViolation = 1;
    constexpr int kExitConfig = 2;

    std::atomic<bool> g_stop{false};

    extern "C" void on_signal(int) { g_stop.store(true); }

    std::string admin_token_from_env()
    {
        const char *t = std::getenv(broker::kAdminTokenEnv);
        return t ? t : "";
    }

    /// "host", "host:port" or ":port".
    void split_bind(const std::string &bind, std::string &host, int &port)
    {
        const auto colon = bind.rfind(':');
        if (colon == std::string::npos)
        {
            host = bind;
            return;
        }
        if (colon > 0)
        {
            host = bind.substr(0, colon);
        }
        const std::string p = bind.substr(colon + 1);
        std::size_t used = 0;
        port = std::stoi(p, &used);
        if (used != p.size() || port < 0 || port > 65535)
        {
            throw std::invalid_argument("bad port in --bind '" + bind + "'");
        }
    }

    struct RunArgs
    {
        std::string scenario;
        std::optional<std::uint64_t> seed;
        std::string export_path;
        std::string report_path;
        bool quiet = false;
    };

    int cmd_run(const RunArgs &a)
    {
        harness::Scenario scenario;
        try
        {
            scenario = harness::load_scenario(a.scenario);
            if (a.seed)
            {
                scenario.seed = *a.seed;
            }
        }
        catch (const harness::ConfigError &e)
        {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }

        const harness::RunReport report = harness::run_scenario(scenario);
        try
        {
            if (!a.export_path.empty())
            {
                harness::export_series(report, a.export_path);
            }
            if (!a.report_path.empty())
            {
                std::ofstream out(a.report_path, std::ios::binary | std::ios::trunc);
                out << harness::serialize(report);
                if (!out)
                {
                    throw std::runtime_error("cannot write " + a.report_path);
                }
            }
        }
        catch (const std::exception &e)
        {
            std::cerr << "error: " << e.what() << '\n';
            return kExitConfig;
        }
        if (!a.quiet)
        {
            std::cout << harness::describe(report);
        }
        return report.ok() ? kExitOk : kExitViolation;
    }

    struct ServeArgs
    {
        std::string bind = "127.0.0.1:8080";
        double speed = 1.0;
        std::string persist;
        std::string scenario;
        bool auto_owner = false;
        std::uint64_t key_seed = 0;
    };

    int cmd_serve(const ServeArgs &a)
    {
        harness::LiveOptions opts;
        try
        {
            split_bind(a.bind, opts.host, opts.port);
            if (!a.scenario.empty())
            {
                opts.scenario = harness::load_scenario(a.scenario);
            }
        }
        catch (const std::exception &e)
        {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        opts.speed = a.speed;
        if (!a.persist.empty())
        {
            opts.persist = a.persist;
        }
        opts.admin_token = admin_token_from_env();
        opts.key_seed = a.key_seed;
        opts.scripted_owner = a.auto_owner;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        return harness::serve_live(std::move(opts), g_stop);
    }

    struct ChannelArgs
    {
        std::string persist;
        std::string server;
        std::string name;
        std::vector<std::string> fields;
        double min_interval = 15.0;
        std::uint64_t key_seed = 0;
    };

    std::unique_ptr<broker::Broker> offline_broker(const ChannelArgs &a)
    {
        broker::BrokerOptions bo;
        bo.key_seed = a.key_seed;
        bo.journal_path = a.persist;
        return std::make_unique<broker::Broker>(bo);
    }

    broker::ChannelSpec channel_spec(const ChannelArgs &a)
    {
        broker::ChannelSpec spec;
        spec.name = a.name;
        spec.field_names = a.fields;
        spec.policy = broker::RateLimitPolicy{sim::from_seconds(a.min_interval)};
        return spec;
    }

    int cmd_channels_create(const ChannelArgs &a)
    {
        broker::Channel c;
        if (!a.server.empty())
        {
            broker::HttpBrokerClient client(a.server);
            c = client.create_channel(channel_spec(a), admin_token_from_env());
        }
        else
        {
            c = offline_broker(a)->create_channel(channel_spec(a), sim::SimTime{});
        }
        std::cout << broker::codec::channel_to_api(c, true).dump(2) << '\n';
        return kExitOk;
    }

    int cmd_channels_list(const ChannelArgs &a)
    {
        std::vector<broker::Channel> list;
        if (!a.server.empty())
        {
            broker::HttpBrokerClient client(a.server);
            list = client.list_channels(admin_token_from_env());
        }
        else
        {
            list = offline_broker(a)->channels();
        }
        nlohmann::json out = nlohmann::json::array();
        for (const auto &c : list)
        {
            out.push_back(broker::codec::channel_to_api(c, true));
        }
        std::cout << out.dump(2) << '\n';
        return kExitOk;
    }

    int cmd_channels_dump(const ChannelArgs &a)
    {
        std::cout << offline_broker(a)->state_dump() << '\n';
        return kExitOk;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"Simulated IoT pet feeder: scenario runner, live server and broker admin"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto *run = app.add_subcommand("run", "Run a scenario file on the virtual clock");
    run->add_option("scenario", run_args.scenario, "Scenario YAML file")->required();
    run->add_option("--seed", run_args.seed, "Override the scenario seed");
    run->add_option("--export", run_args.export_path, "Write the time series as CSV");
    run->add_option("--report", run_args.report_path, "Write the full report as JSON");
    run->add_flag("-q,--quiet", run_args.quiet, "Print nothing on success");

    ServeArgs serve_args;
    auto *serve = app.add_subcommand("serve", "Serve the broker API with a live simulated feeder");
    serve->add_option("--bind", serve_args.bind, "host:port to listen on (port 0 picks one)")->capture_default_str();
    serve->add_option("--speed", serve_args.speed, "Virtual seconds per wall second")->capture_default_str()->check(CLI::PositiveNumber);
    serve->add_option("--persist", serve_args.persist, "Broker journal file, replayed at startup");
    serve->add_option("--scenario", serve_args.scenario, "Scenario YAML for geometry, sensors and scripted pet events");
    serve->add_flag("--auto-owner", serve_args.auto_owner, "Let the scripted owner answer notifications");
    serve->add_option("--key-seed", serve_args.key_seed, "Seed for issued API keys")->capture_default_str();

    ChannelArgs ch_args;
    auto *channels = app.add_subcommand("channels", "Channel administration (needs " + std::string(broker::kAdminTokenEnv) + " with --server)");
    channels->require_subcommand(1);
    const auto add_target = [&](CLI::App *sub) {
        auto *p = sub->add_option("--persist", ch_args.persist, "Journal file to operate on offline");
        auto *s = sub->add_option("--server", ch_args.server, "Base URL of a running server, e.g. http://127.0.0.1:8080");
        p->excludes(s);
        sub->add_option("--key-seed", ch_args.key_seed, "Key seed for offline mode")->capture_default_str();
    };
    auto *create = channels->add_subcommand("create", "Create a channel and print its keys");
    add_target(create);
    create->add_option("--name", ch_args.name, "Channel name")->required();
    create->add_option("--fields", ch_args.fields, "Field names (up to 8)")->delimiter(',');
    create->add_option("--min-interval", ch_args.min_interval, "Minimum seconds between accepted writes")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto *list = channels->add_subcommand("list", "List channels with keys");
    add_target(list);
    auto *dump = channels->add_subcommand("dump", "Print the canonical state dump of a journal");
    dump->add_option("--persist", ch_args.persist, "Journal file")->required();
    for (auto *sub : {create, list})
    {
        sub->callback([sub] {
            if (sub->get_option("--persist")->empty() && sub->get_option("--server")->empty())
            {
                throw CLI::ValidationError("one of --persist or --server is required");
            }
        });
    }

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitConfig;
    }

    try
    {
        if (*run)
        {
            return cmd_run(run_args);
        }
        if (*serve)
        {
            return cmd_serve(serve_args);
        }
        if (*create)
        {
            return cmd_channels_create(ch_args);
        }
        if (*list)
        {
            return cmd_channels_list(ch_args);
        }
        if (*dump)
        {
            return cmd_channels_dump(ch_args);
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}
