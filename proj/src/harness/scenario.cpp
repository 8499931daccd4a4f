#include "petfeed/harness/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace petfeed::harness
{
    namespace
    {
        class Reader
        {
        public:
            explicit Reader(std::string source) : source_(std::move(source)) {}

            [[noreturn]] void fail(const YAML::Mark &mark, const std::string &field, const std::string &message) const
            {
                const int line = mark.line >= 0 ? mark.line + 1 : 0;
                std::ostringstream out;
                out << source_ << ':' << line;
                if (mark.column >= 0)
                {
                    out << ':' << mark.column + 1;
                }
                out << ": " << field << ": " << message;
                throw ConfigError(out.str(), line, field);
            }

            [[noreturn]] void fail(const YAML::Node &node, const std::string &field, const std::string &message) const
            {
                fail(node.Mark(), field, message);
            }

            void expect_map(const YAML::Node &node, const std::string &field, std::initializer_list<const char *> allowed) const
            {
                if (!node.IsMap())
                {
                    fail(node, field, "expected a mapping");
                }
                const std::set<std::string> keys(allowed.begin(), allowed.end());
                for (const auto &kv : node)
                {
                    const auto key = kv.first.as<std::string>();
                    if (!keys.contains(key))
                    {
                        fail(kv.first, join(field, key), "unknown key");
                    }
                }
            }

            template <typename T>
            T scalar(const YAML::Node &node, const std::string &field) const
            {
                if (!node.IsScalar())
                {
                    fail(node, field, "expected a scalar");
                }
                try
                {
                    return node.as<T>();
                }
                catch (const YAML::BadConversion &)
                {
                    fail(node, field, "cannot read '" + node.Scalar() + "' as " + type_name<T>());
                }
            }

            template <typename T>
            void optional(const YAML::Node &map, const char *key, const std::string &prefix, T &out) const
            {
                if (const YAML::Node n = map[key])
                {
                    out = scalar<T>(n, join(prefix, key));
                }
            }

            void seconds(const YAML::Node &map, const char *key, const std::string &prefix, Duration &out) const
            {
                if (const YAML::Node n = map[key])
                {
                    const std::string field = join(prefix, key);
                    const double s = scalar<double>(n, field);
                    if (!(s >= 0.0) || s > 1e9)
                    {
                        fail(n, field, "time must be a non-negative number of seconds");
                    }
                    out = sim::from_seconds(s);
                }
            }

            static std::string join(const std::string &prefix, const std::string &key)
            {
                return prefix.empty() ? key : prefix + "." + key;
            }

        private:
            template <typename T>
            static const char *type_name()
            {
                if constexpr (std::is_same_v<T, bool>) return "a boolean";
                else if constexpr (std::is_integral_v<T>) return "an integer";
                else if constexpr (std::is_floating_point_v<T>) return "a number";
                else return "a string";
            }

            std::string source_;
        };

        void read_world(const Reader &r, const YAML::Node &n, Scenario &s)
        {
            r.expect_map(n, "world", {"bowl_fill", "hoppers", "capacity_g", "flow_rate", "d_empty", "d_full"});
            r.optional(n, "bowl_fill", "world", s.initial_fill);
            r.optional(n, "capacity_g", "world", s.world.bowl_capacity_g);
            r.optional(n, "flow_rate", "world", s.world.flow_rate_g_per_s);
            r.optional(n, "d_empty", "world", s.world.d_empty);
            r.optional(n, "d_full", "world", s.world.d_full);
            if (const YAML::Node h = n["hoppers"])
            {
                if (!h.IsSequence() || h.size() != sim::kFeedSlots)
                {
                    r.fail(h, "world.hoppers", "expected a list of 2 masses in grams");
                }
                for (std::size_t i = 0; i < sim::kFeedSlots; ++i)
                {
                    s.hopper_mass[i] = r.scalar<double>(h[i], "world.hoppers[" + std::to_string(i) + "]");
                    if (!(s.hopper_mass[i] >= 0.0))
                    {
                        r.fail(h[i], "world.hoppers", "hopper mass must be non-negative");
                    }
                }
            }
            if (!(s.initial_fill >= 0.0 && s.initial_fill <= 1.0))
            {
                r.fail(n["bowl_fill"], "world.bowl_fill", "must be in [0, 1]");
            }
        }

        void read_sensors(const Reader &r, const YAML::Node &n, Scenario &s)
        {
            r.expect_map(n, "sensors", {"noise", "speed_of_sound", "ultrasonic_range", "accuracy", "ir_range"});
            r.optional(n, "noise", "sensors", s.ultrasonic.noise_enabled);
            r.optional(n, "speed_of_sound", "sensors", s.ultrasonic.speed_of_sound);
            r.optional(n, "accuracy", "sensors", s.ultrasonic.accuracy);
            const auto range = [&](const char *key, double &lo, double &hi) {
                if (const YAML::Node v = n[key])
                {
                    if (!v.IsSequence() || v.size() != 2)
                    {
                        r.fail(v, std::string("sensors.") + key, "expected [min, max] in metres");
                    }
                    lo = r.scalar<double>(v[0], std::string("sensors.") + key);
                    hi = r.scalar<double>(v[1], std::string("sensors.") + key);
                }
            };
            range("ultrasonic_range", s.ultrasonic.min_range, s.ultrasonic.max_range);
            range("ir_range", s.ir.range_min, s.ir.range_max);
        }

        void read_owner(const Reader &r, const YAML::Node &n, Scenario &s)
        {
            r.expect_map(n, "owner", {"enabled", "selection", "delay", "poll_period"});
            r.optional(n, "enabled", "owner", s.owner.enabled);
            r.optional(n, "selection", "owner", s.owner.selection);
            r.seconds(n, "delay", "owner", s.owner.delay);
            r.seconds(n, "poll_period", "owner", s.owner.poll_period);
            if (s.owner.selection != 1 && s.owner.selection != 2)
            {
                r.fail(n["selection"], "owner.selection", "must be 1 or 2");
            }
        }

        void read_events(const Reader &r, const YAML::Node &n, Scenario &s)
        {
            if (!n.IsSequence())
            {
                r.fail(n, "events", "expected a list");
            }
            Duration previous{};
            for (std::size_t i = 0; i < n.size(); ++i)
            {
                const YAML::Node ev = n[i];
                const std::string field = "events[" + std::to_string(i) + "]";
                r.expect_map(ev, field, {"at", "pet", "distance", "outage"});
                if (!ev["at"])
                {
                    r.fail(ev, field + ".at", "missing event time");
                }
                Duration at{};
                r.seconds(ev, "at", field, at);
                if (at < previous)
                {
                    r.fail(ev["at"], field + ".at", "events must be sorted by time");
                }
                previous = at;

                if (const YAML::Node pet = ev["pet"])
                {
                    const auto what = r.scalar<std::string>(pet, field + ".pet");
                    PetEvent pe{at, false, 0.0};
                    if (what == "arrive")
                    {
                        pe.present = true;
                        pe.distance = 0.05;
                    }
                    else if (what != "leave")
                    {
                        r.fail(pet, field + ".pet", "expected 'arrive' or 'leave'");
                    }
                    r.optional(ev, "distance", field, pe.distance);
                    if (!(pe.distance >= 0.0))
                    {
                        r.fail(ev["distance"], field + ".distance", "must be non-negative");
                    }
                    s.pet_events.push_back(pe);
                }
                else if (ev["outage"])
                {
                    Duration length{};
                    r.seconds(ev, "outage", field, length);
                    s.outages.push_back({at, at + length});
                }
                else
                {
                    r.fail(ev, field, "event needs 'pet' or 'outage'");
                }
            }
        }
    }

    void Scenario::validate() const
    {
        const auto bad = [](const std::string &field, const std::string &msg) { throw ConfigError(field + ": " + msg, 0, field); };
        if (duration.count() <= 0) bad("duration", "must be positive");
        if (tick.count() <= 0) bad("tick", "must be at least one microsecond");
        if (!(initial_fill >= 0.0 && initial_fill <= 1.0)) bad("world.bowl_fill", "must be in [0, 1]");
        for (double m : hopper_mass)
        {
            if (!(m >= 0.0)) bad("world.hoppers", "must be non-negative");
        }
        try
        {
            world.validate();
            ultrasonic.validate();
            ir.validate();
            pins.validate();
            policy.validate();
            controller.validate(world.d_full, world.d_empty);
        }
        catch (const std::invalid_argument &e)
        {
            bad("config", e.what());
        }
        if (!std::is_sorted(pet_events.begin(), pet_events.end(), [](const auto &a, const auto &b) { return a.at < b.at; }))
        {
            bad("events", "pet events must be sorted by time");
        }
        if (owner.enabled && owner.selection != 1 && owner.selection != 2) bad("owner.selection", "must be 1 or 2");
        if (owner.poll_period.count() <= 0) bad("owner.poll_period", "must be positive");
    }

    Scenario parse_scenario(const std::string &text, const std::string &source)
    {
        const Reader r(source);
        YAML::Node root;
        try
        {
            root = YAML::Load(text);
        }
        catch (const YAML::ParserException &e)
        {
            r.fail(e.mark, "<syntax>", e.msg);
        }

        Scenario s;
        if (!root || root.IsNull())
        {
            s.validate();
            return s;
        }
        r.expect_map(root, "", {"name", "duration", "tick", "seed", "world", "sensors", "controller", "broker", "owner", "events"});

        r.optional(root, "name", "", s.name);
        r.seconds(root, "duration", "", s.duration);
        r.seconds(root, "tick", "", s.tick);
        r.optional(root, "seed", "", s.seed);
        if (root["tick"] && s.tick.count() <= 0)
        {
            r.fail(root["tick"], "tick", "must be at least one microsecond");
        }
        if (root["duration"] && s.duration.count() <= 0)
        {
            r.fail(root["duration"], "duration", "must be positive");
        }

        if (const YAML::Node n = root["world"]) read_world(r, n, s);
        if (const YAML::Node n = root["sensors"]) read_sensors(r, n, s);
        if (const YAML::Node n = root["controller"])
        {
            r.expect_map(n, "controller", {"poll_interval", "full_threshold"});
            r.seconds(n, "poll_interval", "controller", s.controller.poll_interval);
            r.optional(n, "full_threshold", "controller", s.controller.full_threshold);
        }
        if (const YAML::Node n = root["broker"])
        {
            r.expect_map(n, "broker", {"min_interval"});
            r.seconds(n, "min_interval", "broker", s.policy.min_interval);
        }
        if (const YAML::Node n = root["owner"]) read_owner(r, n, s);
        if (const YAML::Node n = root["events"]) read_events(r, n, s);

        try
        {
            s.validate();
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(source + ": " + e.what(), e.line(), e.field());
        }
        return s;
    }

    Scenario load_scenario(const std::filesystem::path &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw ConfigError(path.string() + ": cannot open scenario file", 0, "");
        }
        std::stringstream buffer;
        buffer << in.rdbuf();
        return parse_scenario(buffer.str(), path.string());
    }
}
