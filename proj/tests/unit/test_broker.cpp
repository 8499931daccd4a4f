#include "petfeed/broker/broker.hpp"
#include "petfeed/broker/client.hpp"
#include "petfeed/broker/journal.hpp"
#include "petfeed/broker/json_codec.hpp"

#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <thread>

using namespace petfeed::broker;
namespace fs = std::filesystem;

namespace
{
    SimTime secs(double s) { return petfeed::sim::from_seconds(s); }

    ChannelSpec spec(std::string name, std::vector<std::string> fields = {"a"})
    {
        ChannelSpec s;
        s.name = std::move(name);
        s.field_names = std::move(fields);
        return s;
    }

    UpdateRequest value(const std::string &v)
    {
        UpdateRequest u;
        u.set(1, v);
        return u;
    }

    bool limited(const WriteResult &r) { return r.status == WriteResult::Status::RateLimited; }
    bool refused(const WriteResult &r) { return r.status == WriteResult::Status::Unauthorized; }

    struct TempDir
    {
        fs::path path;
        TempDir()
        {
            path = fs::temp_directory_path() / ("petfeed-broker-" + std::to_string(std::random_device{}()));
            fs::create_directories(path);
        }
        ~TempDir() { fs::remove_all(path); }
    };
}

TEST_CASE("create channel issues distinct 16-char keys")
{
    Broker b;
    const Channel c = b.create_channel(spec("IRCh", {"presence", "distance"}), SimTime{});
    CHECK(c.id == 1);
    CHECK(c.write_key.size() == 16);
    CHECK(c.read_key.size() == 16);
    CHECK(c.write_key != c.read_key);
    for (char ch : c.write_key + c.read_key)
    {
        CHECK(((ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9')));
    }
    CHECK(c.policy.min_interval == kDefaultMinInterval);
    CHECK(b.find_channel("IRCh") == c.id);
    CHECK_FALSE(b.find_channel("nope"));
}

TEST_CASE("equal key seeds issue equal keys; different seeds differ")
{
    Broker a(BrokerOptions{7, {}, {}});
    Broker b(BrokerOptions{7, {}, {}});
    Broker c(BrokerOptions{8, {}, {}});
    const Channel ca = a.create_channel(spec("x"), SimTime{});
    const Channel cb = b.create_channel(spec("x"), SimTime{});
    const Channel cc = c.create_channel(spec("x"), SimTime{});
    CHECK(ca.write_key == cb.write_key);
    CHECK(ca.read_key == cb.read_key);
    CHECK(ca.write_key != cc.write_key);
}

TEST_CASE("keys stay unique over many channels")
{
    Broker b;
    std::set<std::string> keys;
    for (int i = 0; i < 300; ++i)
    {
        const Channel c = b.create_channel(spec("c" + std::to_string(i)), SimTime{});
        CHECK(keys.insert(c.write_key).second);
        CHECK(keys.insert(c.read_key).second);
    }
}

TEST_CASE("channel creation rejects bad specs")
{
    Broker b;
    try
    {
        b.create_channel(spec("nine", {"1", "2", "3", "4", "5", "6", "7", "8", "9"}), SimTime{});
        FAIL("expected BrokerError");
    }
    catch (const BrokerError &e)
    {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
    CHECK_THROWS_AS(b.create_channel(spec(""), SimTime{}), BrokerError);
    CHECK(b.channels().empty());
}

TEST_CASE("writes append and read_last returns the newest")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    CHECK_FALSE(b.read_last(c.id, c.read_key));
    CHECK(b.write_update(c.write_key, value("1"), secs(0)) == WriteResult::accepted(1));
    CHECK(b.write_update(c.write_key, value("2"), secs(15)) == WriteResult::accepted(2));
    const auto last = b.read_last(c.id, c.read_key);
    REQUIRE(last);
    CHECK(last->entry_id == 2);
    CHECK(last->created_at == secs(15));
    CHECK(last->field(1) == "2");
    CHECK_FALSE(last->field(2));
    CHECK(b.channel(c.id).last_write_at == secs(15));
}

TEST_CASE("rate limit: boundary accepted, early write rejected with retry_after")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    REQUIRE(b.write_update(c.write_key, value("1"), secs(10)).ok());
    CHECK(b.write_update(c.write_key, value("2"), secs(14)) == WriteResult::rate_limited(secs(11)));
    CHECK(b.write_update(c.write_key, value("2"), secs(10) + petfeed::sim::Duration{14'999'999}) ==
          WriteResult::rate_limited(petfeed::sim::Duration{1}));
    CHECK(b.write_update(c.write_key, value("2"), secs(25)) == WriteResult::accepted(2));
    CHECK(b.read_feed(c.id, c.read_key).size() == 2);
}

TEST_CASE("rate limits are per channel")
{
    Broker b;
    const Channel x = b.create_channel(spec("x"), SimTime{});
    const Channel y = b.create_channel(spec("y"), SimTime{});
    CHECK(b.write_update(x.write_key, value("1"), secs(0)).ok());
    CHECK(b.write_update(y.write_key, value("1"), secs(1)).ok());
    CHECK(limited(b.write_update(x.write_key, value("1"), secs(2))));
}

TEST_CASE("custom policy per channel")
{
    Broker b;
    ChannelSpec s = spec("fast");
    s.policy = RateLimitPolicy{secs(1)};
    const Channel c = b.create_channel(s, SimTime{});
    CHECK(b.write_update(c.write_key, value("1"), secs(0)).ok());
    CHECK(b.write_update(c.write_key, value("1"), secs(1)).ok());
    s.policy = RateLimitPolicy{SimTime{0}};
    CHECK_THROWS(b.create_channel(s, SimTime{}));
}

TEST_CASE("auth: wrong or swapped keys are refused without side effects")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    const std::string before = b.state_dump();
    CHECK(refused(b.write_update("WRONGKEY", value("1"), secs(0))));
    CHECK(refused(b.write_update(c.read_key, value("1"), secs(0))));
    CHECK(b.state_dump() == before);

    try
    {
        (void)b.read_last(c.id, c.write_key);
        FAIL("expected Unauthorized");
    }
    catch (const BrokerError &e)
    {
        CHECK(e.code() == ErrorCode::Unauthorized);
    }
    try
    {
        (void)b.read_last(99, c.read_key);
        FAIL("expected NotFound");
    }
    catch (const BrokerError &e)
    {
        CHECK(e.code() == ErrorCode::NotFound);
    }
}

TEST_CASE("a rejected write leaves state untouched")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    REQUIRE(b.write_update(c.write_key, value("1"), secs(0)).ok());
    const std::string before = b.state_dump();
    CHECK(limited(b.write_update(c.write_key, value("2"), secs(3))));
    CHECK(b.state_dump() == before);
}

TEST_CASE("public channels read without a key")
{
    Broker b;
    ChannelSpec s = spec("open");
    s.public_read = true;
    const Channel c = b.create_channel(s, SimTime{});
    REQUIRE(b.write_update(c.write_key, value("5"), secs(0)).ok());
    CHECK(b.read_last(c.id, "")->field(1) == "5");
}

TEST_CASE("read_feed since")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    for (int i = 0; i < 5; ++i)
    {
        REQUIRE(b.write_update(c.write_key, value(std::to_string(i)), secs(15.0 * i)).ok());
    }
    CHECK(b.read_feed(c.id, c.read_key).size() == 5);
    const auto tail = b.read_feed(c.id, c.read_key, 3);
    REQUIRE(tail.size() == 2);
    CHECK(tail[0].entry_id == 4);
    CHECK(b.read_feed(c.id, c.read_key, 5).empty());
}

TEST_CASE("status and location are stored")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    UpdateRequest u = value("1");
    u.status = "pet detected";
    u.location = Location{12.9, 77.6, 900.0};
    REQUIRE(b.write_update(c.write_key, u, secs(0)).ok());
    const auto last = b.read_last(c.id, c.read_key);
    CHECK(last->status == "pet detected");
    CHECK(last->location == Location{12.9, 77.6, 900.0});
}

TEST_CASE("concurrent writers on different channels never block each other's acceptance")
{
    Broker b;
    std::vector<Channel> chans;
    for (int i = 0; i < 4; ++i)
    {
        chans.push_back(b.create_channel(spec("c" + std::to_string(i)), SimTime{}));
    }
    std::atomic<int> accepted{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t)
    {
        threads.emplace_back([&, t] {
            for (int k = 0; k < 100; ++k)
            {
                if (b.write_update(chans[t].write_key, value(std::to_string(k)), secs(15.0 * k)).ok())
                {
                    ++accepted;
                }
                (void)b.read_last(chans[(t + 1) % 4].id, chans[(t + 1) % 4].read_key);
            }
        });
    }
    for (auto &th : threads)
    {
        th.join();
    }
    CHECK(accepted.load() == 400);
}

TEST_CASE("concurrent writers on one channel: one acceptance per window")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    std::atomic<int> accepted{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t)
    {
        threads.emplace_back([&] {
            for (int k = 0; k < 50; ++k)
            {
                if (b.write_update(c.write_key, value("v"), secs(15.0 * k)).ok())
                {
                    ++accepted;
                }
            }
        });
    }
    for (auto &th : threads)
    {
        th.join();
    }
    const auto feed = b.read_feed(c.id, c.read_key);
    CHECK(static_cast<int>(feed.size()) == accepted.load());
    for (std::size_t i = 1; i < feed.size(); ++i)
    {
        CHECK(feed[i].created_at - feed[i - 1].created_at >= kDefaultMinInterval);
        CHECK(feed[i].entry_id == feed[i - 1].entry_id + 1);
    }
}

TEST_CASE("local client maps broker results to call statuses")
{
    Broker b;
    const Channel c = b.create_channel(spec("x"), SimTime{});
    LocalBrokerClient client(b);
    CHECK(client.read_last(c.id, c.read_key, SimTime{}).status == CallStatus::Ok);
    CHECK(client.update(c.write_key, value("1"), secs(0)).status == CallStatus::Ok);
    const UpdateOutcome limited = client.update(c.write_key, value("1"), secs(5));
    CHECK(limited.status == CallStatus::RateLimited);
    CHECK(limited.retry_after == secs(10));
    CHECK(client.update("bad", value("1"), secs(30)).status == CallStatus::Unauthorized);
    CHECK(client.read_last(c.id, "bad", SimTime{}).status == CallStatus::Unauthorized);
    CHECK(client.read_last(42, c.read_key, SimTime{}).status == CallStatus::NotFound);
    CHECK(to_string(CallStatus::RateLimited) == "rate_limited");
}

TEST_CASE("api codec round trips")
{
    FeedEntry e;
    e.entry_id = 3;
    e.created_at = secs(15.5);
    e.fields[0] = "1";
    e.fields[1] = "0.08";
    e.status = "pet detected";
    const auto j = codec::entry_to_api(e);
    CHECK(j.at("field1") == "1");
    CHECK_FALSE(j.contains("field3"));
    CHECK(j.at("created_at") == 15.5);
    CHECK(codec::entry_from_api(j) == e);

    Channel c;
    c.id = 2;
    c.name = "AppChannel";
    c.write_key = "W";
    c.read_key = "R";
    c.field_names = {"selection"};
    CHECK_FALSE(codec::channel_to_api(c, false).contains("write_key"));
    CHECK(codec::channel_from_api(codec::channel_to_api(c, true)) == c);
    CHECK(codec::channel_from_store(codec::channel_to_store(c)) == c);
    CHECK(codec::entry_from_store(codec::entry_to_store(e)) == e);
    CHECK(codec::field_index("field8") == 8);
    CHECK(codec::field_index("field9") == 0);
    CHECK(codec::field_index("field") == 0);
}

TEST_CASE("journal replay rebuilds byte-identical state")
{
    TempDir dir;
    const fs::path log = dir.path / "broker.ndjson";
    std::string dump;
    {
        Broker b(BrokerOptions{3, {}, log});
        const Channel c = b.create_channel(spec("IRCh", {"presence", "distance"}), SimTime{});
        const Channel d = b.create_channel(spec("AppChannel", {"selection"}), SimTime{});
        for (int i = 0; i < 10; ++i)
        {
            (void)b.write_update(c.write_key, value(std::to_string(i)), secs(7.0 * i));
        }
        (void)b.write_update(d.write_key, value("2"), secs(20));
        dump = b.state_dump();
    }
    Broker again(BrokerOptions{3, {}, log});
    CHECK(again.state_dump() == dump);

    // replayed state keeps accepting writes with the right ids and limits
    const Channel c = again.channel(1);
    CHECK(limited(again.write_update(c.write_key, value("x"), secs(63))));
    // accepted at 0, 21, 42 and 63 s
    CHECK(again.write_update(c.write_key, value("x"), secs(100)) == WriteResult::accepted(5));
    CHECK(again.create_channel(spec("third"), secs(100)).id == 3);
}

TEST_CASE("torn final journal line is discarded")
{
    TempDir dir;
    const fs::path log = dir.path / "broker.ndjson";
    std::string dump;
    {
        Broker b(BrokerOptions{0, {}, log});
        const Channel c = b.create_channel(spec("x"), SimTime{});
        (void)b.write_update(c.write_key, value("1"), secs(0));
        dump = b.state_dump();
    }
    {
        std::ofstream out(log, std::ios::app | std::ios::binary);
        out << R"({"op":"write","channel":1,"ent)";
    }
    Broker replayed(BrokerOptions{0, {}, log});
    CHECK(replayed.state_dump() == dump);
    // the torn tail was cut, so new appends start on a clean line
    const Channel c = replayed.channel(1);
    REQUIRE(replayed.write_update(c.write_key, value("2"), secs(15)).ok());
    const std::string dump2 = replayed.state_dump();
    Broker third(BrokerOptions{0, {}, log});
    CHECK(third.state_dump() == dump2);
}

TEST_CASE("corrupt complete journal line is an error")
{
    TempDir dir;
    const fs::path log = dir.path / "broker.ndjson";
    {
        std::ofstream out(log, std::ios::binary);
        out << "not json\n";
    }
    CHECK_THROWS(Broker(BrokerOptions{0, {}, log}));
    CHECK_THROWS(Journal::read_all(log));
}

TEST_CASE("journal read_all on a missing file is empty")
{
    CHECK(Journal::read_all("/nonexistent/petfeed/journal.ndjson").empty());
}
