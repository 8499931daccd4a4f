#include "petfeed/devices/ir_sensor.hpp"
#include "petfeed/devices/servo.hpp"
#include "petfeed/devices/ultrasonic.hpp"

#include <doctest.h>

#include <cmath>
#include <stdexcept>

using namespace petfeed::devices;

namespace
{
    constexpr double kHold = 10e-6;
}

TEST_CASE("echo width follows 2d/c")
{
    const UltrasonicConfig cfg;
    // 2 * 0.10 / 343 and 2 * 0.80 / 343, evaluated independently
    const EchoResult near = trigger_measure(cfg, 0.10, kHold);
    REQUIRE(near.is_pulse());
    CHECK(near.pulse_width == doctest::Approx(0.0005830903790087463).epsilon(1e-15));
    const EchoResult far = trigger_measure(cfg, 0.80, kHold);
    REQUIRE(far.is_pulse());
    CHECK(far.pulse_width == doctest::Approx(0.004664723032069971).epsilon(1e-15));
    CHECK(pulse_to_distance(cfg, 0.004664723032069971) == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("out of range distances and short triggers time out")
{
    const UltrasonicConfig cfg;
    CHECK_FALSE(trigger_measure(cfg, 0.0199, kHold).is_pulse());
    CHECK_FALSE(trigger_measure(cfg, 0.8001, kHold).is_pulse());
    CHECK(trigger_measure(cfg, 0.02, kHold).is_pulse());
    CHECK(trigger_measure(cfg, 0.80, kHold).is_pulse());
    CHECK_FALSE(trigger_measure(cfg, 0.30, 9e-6).is_pulse());
    CHECK(trigger_measure(cfg, 0.30, 10e-6) == trigger_measure(cfg, 0.30, 20e-6));
}

TEST_CASE("noise stays within the stated accuracy")
{
    UltrasonicConfig cfg;
    cfg.noise_enabled = true;
    Rng rng(42);
    double max_err = 0.0;
    double sum = 0.0;
    for (int i = 0; i < 20'000; ++i)
    {
        const double d = 0.02 + (0.78 * i) / 20'000.0;
        const EchoResult e = trigger_measure(cfg, d, kHold, rng);
        if (!e.is_pulse())
        {
            continue;
        }
        const double err = pulse_to_distance(cfg, e.pulse_width) - d;
        max_err = std::max(max_err, std::abs(err));
        sum += err;
    }
    CHECK(max_err <= 0.003 + 1e-15);
    CHECK(max_err > 0.002);             // the noise is actually there
    CHECK(std::abs(sum / 20'000.0) < 1e-4);
    CHECK_THROWS_AS(trigger_measure(cfg, 0.1, kHold), std::logic_error);
}

TEST_CASE("noise sequence is reproducible from the seed")
{
    UltrasonicConfig cfg;
    cfg.noise_enabled = true;
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i)
    {
        CHECK(trigger_measure(cfg, 0.3, kHold, a) == trigger_measure(cfg, 0.3, kHold, b));
    }
    Rng r(1);
    for (int i = 0; i < 1000; ++i)
    {
        const double u = uniform_symmetric(r, 2.0);
        REQUIRE(u >= -2.0);
        REQUIRE(u <= 2.0);
    }
}

TEST_CASE("noise-free path leaves the rng alone")
{
    const UltrasonicConfig cfg;
    Rng a(5), b(5);
    (void)trigger_measure(cfg, 0.3, kHold, a);
    CHECK(a() == b());
}

TEST_CASE("pulse_to_distance rejects negative widths")
{
    CHECK_THROWS(pulse_to_distance(UltrasonicConfig{}, -1e-6));
}

TEST_CASE("ultrasonic config validation")
{
    UltrasonicConfig cfg;
    cfg.min_range = 0.9;
    CHECK_THROWS(cfg.validate());
    cfg = UltrasonicConfig{};
    cfg.speed_of_sound = 0.0;
    CHECK_THROWS(cfg.validate());
}

TEST_CASE("IR output is LOW exactly for a present object inside range")
{
    const IRConfig cfg;
    CHECK(ir_read(cfg, true, 0.05) == Level::Low);
    CHECK(ir_read(cfg, true, 0.02) == Level::Low);
    CHECK(ir_read(cfg, true, 0.10) == Level::Low);
    CHECK(ir_read(cfg, true, 0.101) == Level::High);
    CHECK(ir_read(cfg, true, 0.019) == Level::High);
    CHECK(ir_read(cfg, false, 0.05) == Level::High);
    CHECK_THROWS(ir_read(cfg, true, -0.01));

    IRConfig high_active = cfg;
    high_active.active_low = false;
    CHECK(ir_read(high_active, true, 0.05) == Level::High);
    CHECK(ir_read(high_active, false, 0.05) == Level::Low);
}

TEST_CASE("servo sweeps 0 to 180 in 0.3 s at 600 deg/s")
{
    Servo s = servo_command(Servo{}, 180.0);
    int ticks = 0;
    while (s.angle != 180.0)
    {
        const double before = s.angle;
        s = servo_step(s, 0.01);
        CHECK(s.angle - before <= 6.0 + 1e-12);
        ++ticks;
        REQUIRE(ticks < 100);
    }
    CHECK(ticks == 30);
}

TEST_CASE("servo lands exactly on target and never overshoots")
{
    Servo s = servo_command(Servo{}, 7.5);
    s = servo_step(s, 0.01);
    CHECK(s.angle == 6.0);
    s = servo_step(s, 0.01);
    CHECK(s.angle == 7.5);
    s = servo_step(s, 0.01);
    CHECK(s.angle == 7.5);

    s = servo_command(s, 0.0);
    s = servo_step(s, 1.0);
    CHECK(s.angle == 0.0);
}

TEST_CASE("servo argument checks")
{
    CHECK_THROWS(servo_command(Servo{}, 181.0));
    CHECK_THROWS(servo_command(Servo{}, -0.5));
    CHECK_THROWS(servo_step(Servo{}, 0.0));
    Servo bad;
    bad.angle = 200.0;
    CHECK_THROWS(servo_step(bad, 0.01));
}
