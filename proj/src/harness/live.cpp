#include "petfeed/harness/live.hpp"

#include "petfeed/broker/http_api.hpp"
#include "petfeed/broker/http_client.hpp"
#include "petfeed/harness/agents.hpp"
#include "petfeed/harness/board.hpp"

#include <httplib.h>

#include <iostream>
#include <mutex>
#include <thread>

namespace petfeed::harness
{
    using nlohmann::json;

    ScaledClock::ScaledClock(double speed, WallClock::time_point origin) : speed_(speed), origin_(origin)
    {
        if (!(speed > 0.0) || !std::isfinite(speed))
        {
            throw std::invalid_argument("speed factor must be positive");
        }
    }

    SimTime ScaledClock::at(WallClock::time_point wall) const
    {
        const auto elapsed = std::chrono::duration<double, std::micro>(wall - origin_).count();
        return SimTime{static_cast<std::int64_t>(std::floor(std::max(0.0, elapsed) * speed_))};
    }

    ScaledClock::WallClock::time_point ScaledClock::wall_for(SimTime t) const
    {
        const auto wall = std::chrono::duration<double, std::micro>(static_cast<double>(t.count()) / speed_);
        return origin_ + std::chrono::ceil<WallClock::duration>(wall);
    }

    namespace
    {
        firmware::ChannelBinding ensure_channel(broker::Broker &b, const std::string &name, std::vector<std::string> fields, SimTime now)
        {
            std::optional<broker::ChannelId> id = b.find_channel(name);
            if (!id)
            {
                id = b.create_channel({name, std::move(fields), std::nullopt, std::nullopt, {}, false}, now).id;
            }
            const broker::Channel c = b.channel(*id);
            return {c.id, c.write_key, c.read_key};
        }

        sim::WorldState initial_world(const Scenario &s)
        {
            sim::WorldState w;
            w.bowl_fill = s.initial_fill;
            w.hopper_mass = s.hopper_mass;
            return w;
        }
    }

    struct LiveSystem::Impl
    {
        explicit Impl(LiveOptions o)
            : options(std::move(o)),
              clock(options.speed),
              broker([&] {
                  broker::BrokerOptions bo;
                  bo.key_seed = options.key_seed;
                  bo.default_policy = options.scenario.policy;
                  bo.journal_path = options.persist;
                  return bo;
              }()),
              board(options.scenario.world, initial_world(options.scenario), options.scenario.ultrasonic, options.scenario.ir,
                    options.scenario.pins, options.scenario.seed)
        {
            options.scenario.validate();
            links.ir_channel = ensure_channel(broker, "IRCh", {"presence", "distance"}, SimTime{});
            links.app_channel = ensure_channel(broker, "AppChannel", {"selection"}, SimTime{});
        }

        void device_loop()
        {
            broker::HttpBrokerClient http(base_url());
            OutageClient client(http, options.scenario.outages);
            firmware::Device device(options.scenario.controller, options.scenario.pins, options.scenario.ultrasonic, links, client);
            ScriptedOwner owner(options.scenario.owner, links, client);
            sim::SimClock sim_clock(options.scenario.tick);
            std::size_t next_event = 0;
            const auto &events = options.scenario.pet_events;

            while (!stopping.load())
            {
                const SimTime now = sim_clock.now();
                std::this_thread::sleep_until(clock.wall_for(now));
                if (stopping.load())
                {
                    break;
                }
                virtual_now_us.store(now.count());
                std::lock_guard lock(board_mutex);
                while (next_event < events.size() && events[next_event].at <= now)
                {
                    board.set_pet(events[next_event].present, events[next_event].distance);
                    ++next_event;
                }
                const auto tick = device.tick(now, board);
                if (tick.before != tick.after)
                {
                    std::clog << "[" << sim::to_seconds(now) << " s] " << tick.before.name() << " -> " << tick.after.name() << '\n';
                }
                for (const auto &c : tick.commands)
                {
                    std::clog << "[" << sim::to_seconds(now) << " s] command " << c.name() << '\n';
                }
                if (tick.publish && tick.publish->status != broker::CallStatus::Ok)
                {
                    std::clog << "[" << sim::to_seconds(now) << " s] publish " << broker::to_string(tick.publish->status) << '\n';
                }
                phase = tick.after;
                if (options.scripted_owner)
                {
                    owner.tick(now);
                }
                board.step(sim_clock);
            }
        }

        std::string base_url() const { return "http://" + options.host + ":" + std::to_string(bound_port); }

        SimTime virtual_now() const { return SimTime{virtual_now_us.load()}; }

        json config() const
        {
            const auto &s = options.scenario;
            return json{
                {"ir_channel", {{"id", links.ir_channel.id}, {"read_key", links.ir_channel.read_key}, {"fields", {"presence", "distance"}}}},
                {"app_channel",
                 {{"id", links.app_channel.id}, {"read_key", links.app_channel.read_key}, {"write_key", links.app_channel.write_key},
                  {"fields", {"selection"}}}},
                {"geometry", {{"d_empty", s.world.d_empty}, {"d_full", s.world.d_full}}},
                {"full_threshold", s.controller.full_threshold},
                {"poll_interval", sim::to_seconds(s.controller.poll_interval)},
                {"min_interval", sim::to_seconds(s.policy.min_interval)},
                {"speed", options.speed},
                {"selection_encoding", {{"0", "none"}, {"1", "feed 1"}, {"2", "feed 2"}}},
            };
        }

        LiveOptions options;
        ScaledClock clock;
        broker::Broker broker;
        firmware::DeviceLinks links;
        SimBoard board;
        std::mutex board_mutex;
        firmware::Phase phase;
        httplib::Server server;
        int bound_port = 0;
        std::atomic<bool> stopping{false};
        // Tick the device loop is on. The broker stamps writes with it, so the
        // device and the broker agree on rate-limit windows exactly.
        std::atomic<std::int64_t> virtual_now_us{0};
        bool started = false;
        std::thread server_thread;
        std::thread device_thread;
    };

    LiveSystem::LiveSystem(LiveOptions options) : impl_(std::make_unique<Impl>(std::move(options))) {}

    LiveSystem::~LiveSystem() { stop(); }

    void LiveSystem::start()
    {
        Impl &m = *impl_;
        if (m.started)
        {
            return;
        }
        broker::install_broker_routes(m.server, m.broker, {m.options.admin_token, [&m] { return m.virtual_now(); }});
        // httplib defaults to SO_REUSEPORT, which would let a second server
        // share the port silently.
        m.server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char *>(&yes), sizeof(yes));
        });

        m.server.Get("/config.json", [&m](const httplib::Request &, httplib::Response &res) {
            res.set_content(m.config().dump(), "application/json");
        });
        m.server.Get("/sim/state", [&m](const httplib::Request &, httplib::Response &res) {
            std::lock_guard lock(m.board_mutex);
            const auto &w = m.board.world();
            const auto &servos = m.board.servos();
            const json body{
                {"time", sim::to_seconds(m.virtual_now())},
                {"bowl_fill", w.bowl_fill},
                {"hopper_mass", w.hopper_mass},
                {"pet_present", w.pet_present},
                {"pet_distance", w.pet_distance},
                {"servo_angles", {servos[0].angle, servos[1].angle}},
                {"phase", m.phase.name()},
            };
            res.set_content(body.dump(), "application/json");
        });
        m.server.Post("/sim/pet", [&m](const httplib::Request &req, httplib::Response &res) {
            try
            {
                const json body = json::parse(req.body);
                const bool present = body.at("present").get<bool>();
                const double distance = body.value("distance", 0.05);
                std::lock_guard lock(m.board_mutex);
                m.board.set_pet(present, distance);
                res.set_content(R"({"ok":true})", "application/json");
            }
            catch (const std::exception &e)
            {
                res.status = 400;
                res.set_content(json{{"error", e.what()}}.dump(), "application/json");
            }
        });

        if (m.options.port == 0)
        {
            m.bound_port = m.server.bind_to_any_port(m.options.host);
            if (m.bound_port < 0)
            {
                throw std::runtime_error("cannot bind " + m.options.host);
            }
        }
        else
        {
            if (!m.server.bind_to_port(m.options.host, m.options.port))
            {
                throw std::runtime_error("cannot bind " + m.options.host + ":" + std::to_string(m.options.port) + " (port in use?)");
            }
            m.bound_port = m.options.port;
        }
        m.server_thread = std::thread([&m] { m.server.listen_after_bind(); });
        m.server.wait_until_ready();
        m.clock = ScaledClock(m.options.speed);
        m.device_thread = std::thread([&m] { m.device_loop(); });
        m.started = true;
    }

    void LiveSystem::stop()
    {
        Impl &m = *impl_;
        if (!m.started)
        {
            return;
        }
        m.stopping.store(true);
        if (m.device_thread.joinable())
        {
            m.device_thread.join();
        }
        m.server.stop();
        if (m.server_thread.joinable())
        {
            m.server_thread.join();
        }
        m.started = false;
    }

    int LiveSystem::port() const noexcept { return impl_->bound_port; }
    std::string LiveSystem::base_url() const { return impl_->base_url(); }
    json LiveSystem::config_json() const { return impl_->config(); }
    broker::Broker &LiveSystem::broker() noexcept { return impl_->broker; }
    const firmware::DeviceLinks &LiveSystem::links() const noexcept { return impl_->links; }
    const ScaledClock &LiveSystem::clock() const noexcept { return impl_->clock; }
    SimTime LiveSystem::now() const noexcept { return impl_->virtual_now(); }

    int serve_live(LiveOptions options, const std::atomic<bool> &stop_requested)
    {
        try
        {
            LiveSystem system(std::move(options));
            system.start();
            std::clog << "broker listening on " << system.base_url() << '\n' << "config: " << system.config_json().dump() << '\n';
            while (!stop_requested.load())
            {
                std::this_thread::sleep_for(std::chrono::milliseconds(50));
            }
            system.stop();
            std::clog << "stopped; journal is flushed\n";
            return 0;
        }
        catch (const std::exception &e)
        {
            std::cerr << "serve: " << e.what() << '\n';
            return 2;
        }
    }
}
