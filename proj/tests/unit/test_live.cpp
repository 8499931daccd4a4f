#include "petfeed/broker/http_client.hpp"
#include "petfeed/firmware/codec.hpp"
#include "petfeed/harness/live.hpp"

#include <doctest.h>
#include <httplib.h>

#include <csignal>
#include <filesystem>
#include <random>
#include <thread>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

using namespace petfeed;
using namespace petfeed::harness;
using nlohmann::json;
using namespace std::chrono_literals;
namespace fs = std::filesystem;

namespace
{
    fs::path temp_path(const std::string &stem)
    {
        return fs::temp_directory_path() / (stem + "-" + std::to_string(std::random_device{}()) + ".ndjson");
    }

    /// Polls `pred` every 10 ms until it holds or `limit` passes.
    template <typename Pred>
    bool eventually(Pred pred, std::chrono::milliseconds limit = 10s)
    {
        const auto end = std::chrono::steady_clock::now() + limit;
        while (std::chrono::steady_clock::now() < end)
        {
            if (pred())
            {
                return true;
            }
            std::this_thread::sleep_for(10ms);
        }
        return pred();
    }

    /// A port nothing listens on right now.
    int free_port()
    {
        const int fd = socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        socklen_t len = sizeof(addr);
        int port = -1;
        if (bind(fd, reinterpret_cast<sockaddr *>(&addr), sizeof(addr)) == 0 &&
            getsockname(fd, reinterpret_cast<sockaddr *>(&addr), &len) == 0)
        {
            port = ntohs(addr.sin_port);
        }
        close(fd);
        return port;
    }

    LiveOptions fast_options()
    {
        LiveOptions o;
        o.port = 0;
        o.speed = 60.0;
        o.key_seed = 11;
        return o;
    }
}

TEST_CASE("speed 60: a 15 s virtual window is 0.25 s of wall time")
{
    const auto origin = ScaledClock::WallClock::now();
    const ScaledClock clock(60.0, origin);
    CHECK(clock.wall_for(sim::from_seconds(15)) - origin == std::chrono::milliseconds{250});
    CHECK(clock.at(origin + std::chrono::milliseconds{250}) == sim::from_seconds(15));
    CHECK(clock.at(origin - 1s) == sim::SimTime{0});

    const ScaledClock real(1.0, origin);
    CHECK(real.wall_for(sim::from_seconds(15)) - origin == 15s);
    CHECK_THROWS(ScaledClock(0.0));
    CHECK_THROWS(ScaledClock(-2.0));
}

TEST_CASE("live system: config endpoint, UI selection reaches the servo")
{
    LiveOptions o = fast_options();
    o.scenario.pet_events.push_back({sim::SimTime{0}, true, 0.05});
    LiveSystem live(o);
    live.start();
    httplib::Client cli("127.0.0.1", live.port());

    auto r = cli.Get("/config.json");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(r->get_header_value("Access-Control-Allow-Origin") == "*");
    const json cfg = json::parse(r->body);
    const auto &links = live.links();
    CHECK(cfg["ir_channel"]["id"] == links.ir_channel.id);
    CHECK(cfg["ir_channel"]["read_key"] == links.ir_channel.read_key);
    CHECK_FALSE(cfg["ir_channel"].contains("write_key"));
    CHECK(cfg["app_channel"]["write_key"] == links.app_channel.write_key);
    CHECK(cfg["geometry"]["d_empty"] == 0.12);
    CHECK(cfg["geometry"]["d_full"] == 0.04);
    CHECK(cfg["min_interval"] == 15.0);
    CHECK(cfg["poll_interval"] == 15.0);
    CHECK(cfg["speed"] == 60.0);

    // the device announces the pet on the IR channel
    broker::HttpBrokerClient client(live.base_url());
    REQUIRE(eventually([&] {
        const auto last = client.read_last(links.ir_channel.id, links.ir_channel.read_key, {});
        return last.entry && last.entry->field(1) == "1" && last.entry->status == "pet detected";
    }));

    // the owner clicks Feed 2, twice in quick succession
    const auto click = [&] {
        return cli.Post("/update", httplib::Params{{"api_key", links.app_channel.write_key}, {"field1", "2"}});
    };
    auto first = click();
    auto second = click();
    REQUIRE(first);
    REQUIRE(second);
    CHECK(first->body != "0");
    CHECK(second->body == "0");
    CHECK(second->has_header("Retry-After"));

    const auto app = live.broker().read_feed(links.app_channel.id, links.app_channel.read_key);
    REQUIRE(app.size() == 1);
    CHECK(app[0].field(1) == "2");

    REQUIRE(eventually([&] {
        const auto s = cli.Get("/sim/state");
        if (!s)
        {
            return false;
        }
        const json state = json::parse(s->body);
        return state["phase"] == "BowlFull" && state["bowl_fill"].get<double>() > 0.9;
    }, 15s));
    const json state = json::parse(cli.Get("/sim/state")->body);
    CHECK(state["hopper_mass"][0] == 500.0);
    CHECK(state["hopper_mass"][1].get<double>() < 500.0);

    live.stop();
    live.stop();
}

TEST_CASE("live system: /sim/pet drives the IR sensor")
{
    LiveSystem live(fast_options());
    live.start();
    httplib::Client cli("127.0.0.1", live.port());
    auto r = cli.Post("/sim/pet", R"({"present": true, "distance": 0.06})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    const auto &ir = live.links().ir_channel;
    CHECK(eventually([&] {
        const auto last = live.broker().read_last(ir.id, ir.read_key);
        return last && last->field(1) == "1";
    }));
    r = cli.Post("/sim/pet", R"({"distance": 0.06})", "application/json");
    REQUIRE(r);
    CHECK(r->status == 400);
}

TEST_CASE("live system: port in use is reported at startup")
{
    LiveSystem first(fast_options());
    first.start();
    LiveOptions o = fast_options();
    o.port = first.port();
    LiveSystem second(o);
    CHECK_THROWS_AS(second.start(), std::runtime_error);

    std::atomic<bool> stop{true};
    CHECK(serve_live(o, stop) == 2);
}

TEST_CASE("live system: journal replays to the same state after stop")
{
    const fs::path log = temp_path("live");
    std::string dump;
    firmware::DeviceLinks links;
    {
        LiveOptions o = fast_options();
        o.persist = log;
        LiveSystem live(o);
        live.start();
        links = live.links();
        REQUIRE(eventually([&] { return live.broker().read_feed(links.ir_channel.id, links.ir_channel.read_key).size() >= 3; }));
        live.stop();
        dump = live.broker().state_dump();
    }
    broker::Broker replayed(broker::BrokerOptions{11, {}, log});
    CHECK(replayed.state_dump() == dump);

    // a restarted server finds its channels instead of creating new ones
    LiveOptions o = fast_options();
    o.persist = log;
    LiveSystem again(o);
    CHECK(again.links().ir_channel.write_key == links.ir_channel.write_key);
    CHECK(again.broker().channels().size() == 2);
    fs::remove(log);
}

TEST_CASE("CLI serve: SIGINT stops cleanly with a flushed journal")
{
    const fs::path log = temp_path("cli");
    const int port = free_port();
    REQUIRE(port > 0);
    const std::string bind = "127.0.0.1:" + std::to_string(port);

    const pid_t pid = fork();
    REQUIRE(pid >= 0);
    if (pid == 0)
    {
        execl(PETFEED_CLI, PETFEED_CLI, "serve", "--bind", bind.c_str(), "--speed", "60", "--persist", log.c_str(), nullptr);
        _exit(127);
    }
    // never leave the server running if an assertion bails out early
    struct Reaper
    {
        pid_t pid;
        bool done = false;
        ~Reaper()
        {
            if (!done)
            {
                kill(pid, SIGKILL);
                waitpid(pid, nullptr, 0);
            }
        }
    } reaper{pid};

    httplib::Client cli("127.0.0.1", port);
    std::optional<json> cfg;
    REQUIRE(eventually([&] {
        const auto r = cli.Get("/config.json");
        if (r && r->status == 200)
        {
            cfg = json::parse(r->body);
        }
        return cfg.has_value();
    }));
    const auto ir_id = (*cfg)["ir_channel"]["id"].get<broker::ChannelId>();
    const auto ir_key = (*cfg)["ir_channel"]["read_key"].get<std::string>();
    const auto path = "/channels/" + std::to_string(ir_id) + "/feeds.json?api_key=" + ir_key;
    json seen;
    REQUIRE(eventually([&] {
        const auto r = cli.Get(path);
        if (!r)
        {
            return false;
        }
        seen = json::parse(r->body)["feeds"];
        return seen.size() >= 2;
    }));

    REQUIRE(kill(pid, SIGINT) == 0);
    int status = 0;
    REQUIRE(waitpid(pid, &status, 0) == pid);
    reaper.done = true;
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);

    broker::Broker replayed(broker::BrokerOptions{0, {}, log});
    const auto feed = replayed.read_feed(ir_id, ir_key);
    REQUIRE(feed.size() >= seen.size());
    for (std::size_t i = 0; i < seen.size(); ++i)
    {
        CHECK(seen[i]["entry_id"] == feed[i].entry_id);
        CHECK(seen[i]["field1"] == *feed[i].field(1));
    }
    fs::remove(log);
}
