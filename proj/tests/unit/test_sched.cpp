#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tacan/sched.hpp"

using namespace tacan::sched;

namespace {

constexpr double kTau = 2e-6;  // 500 kbit/s

BusSpec two_messages() {
    BusSpec bus;
    bus.tau_bit = kTau;
    bus.messages = {{0x10, 1, 8, 0.005, 0.0, 0.005}, {0x20, 2, 8, 0.010, 0.0, 0.010}};
    return bus;
}

BusSpec many_hp(std::size_t n) {
    BusSpec bus;
    bus.tau_bit = kTau;
    for (std::size_t i = 0; i < n; ++i) {
        bus.messages.push_back({static_cast<std::uint32_t>(0x100 + i), static_cast<int>(i), 8, 1.0, 0.0, 1.0});
    }
    bus.messages.push_back({0x7FF, static_cast<int>(n), 8, 0.010, 0.0, 1.0});
    return bus;
}

}  // namespace

TEST_SUITE("sched") {
    TEST_CASE("transmission time") {
        CHECK(transmission_time(8, kTau) == doctest::Approx(320e-6));
        CHECK(transmission_time(0, kTau) == doctest::Approx(160e-6));
        CHECK_THROWS(transmission_time(9, kTau));
    }

    TEST_CASE("no higher priority messages") {
        auto bus = two_messages();
        const auto r = worst_case_response(bus, 1);
        CHECK(r.iterations == 1);
        CHECK(r.b == doctest::Approx(320e-6));
        CHECK(r.r == doctest::Approx(r.j + r.b + r.c));
    }

    TEST_CASE("hand-iterated fixture") {
        const auto r = worst_case_response(two_messages(), 2);
        CHECK(r.b == 0.0);
        CHECK(r.w == doctest::Approx(320e-6));
        CHECK(r.r == doctest::Approx(640e-6));
        CHECK(r.schedulable);
    }

    TEST_CASE("deadline shorter than the frame") {
        auto bus = two_messages();
        bus.messages[0].deadline = 100e-6;
        CHECK_FALSE(worst_case_response(bus, 1).schedulable);
        CHECK_FALSE(bus_schedulable(bus, 0.0).schedulable);
    }

    TEST_CASE("adjustment numbers") {
        const auto bus = many_hp(45);
        const auto a = tacan_adjustment(bus, 45, 0.01);
        CHECK(a.jitter_increase == doctest::Approx(100e-6).epsilon(1e-12));
        CHECK(std::abs(a.blocking_increase - 45 * (0.01 / 0.99) * 320e-6) < 1e-12);
        CHECK(std::abs(a.blocking_increase * 1e6 - 145.0) <= 1.0);
        CHECK(std::abs(a.per_message_increase * 1e6 - 3.23) <= 0.1);

        const auto base = worst_case_response(bus, 45);
        const auto adj = tacan_adjusted_response(bus, 45, 0.01);
        CHECK(adj.j - base.j == doctest::Approx(100e-6));
        CHECK(adj.b - base.b == doctest::Approx(a.blocking_increase));
    }

    TEST_CASE("f = 0 reproduces the plain analysis") {
        const auto bus = many_hp(10);
        for (const auto& m : bus.messages) {
            const auto a = worst_case_response(bus, m.priority);
            const auto b = tacan_adjusted_response(bus, m.priority, 0.0);
            CHECK(a.r == b.r);
            CHECK(a.w == b.w);
            CHECK(a.iterations == b.iterations);
        }
        CHECK_THROWS(tacan_adjusted_response(bus, 0, 1.0));
        CHECK_THROWS(tacan_adjusted_response(bus, 0, -0.1));
    }

    TEST_CASE("response time grows with f") {
        const auto bus = many_hp(20);
        double prev = 0.0;
        for (int i = 0; i <= 30; ++i) {
            const auto r = tacan_adjusted_response(bus, 20, i / 100.0);
            CHECK(r.r >= prev);
            prev = r.r;
        }
    }

    TEST_CASE("schedulable at f = 0 but not at f = 0.2") {
        BusSpec bus;
        bus.tau_bit = kTau;
        // R = 1280 us at f = 0. At f = 0.2 the added jitter alone is 1000 us.
        bus.messages = {{1, 1, 8, 0.005, 0.0, 0.005},
                        {2, 2, 8, 0.005, 0.0, 0.005},
                        {3, 3, 8, 0.005, 0.0, 0.005},
                        {4, 4, 8, 0.005, 0.0, 0.0015}};
        CHECK(bus_schedulable(bus, 0.0).schedulable);
        const auto rep = bus_schedulable(bus, 0.2);
        CHECK_FALSE(rep.schedulable);
        CHECK_FALSE(rep.messages.back().schedulable);
    }

    TEST_CASE("bus file parsing") {
        std::istringstream in(
            "# test bus\n"
            "bitrate_bps=500000\n"
            "id,priority,bytes,period_ms,jitter_ms,deadline_ms\n"
            "0x10,1,8,5,0,5\n"
            "32,2,8,10,0,10\n");
        const auto bus = parse_bus(in);
        CHECK(bus.tau_bit == doctest::Approx(2e-6));
        REQUIRE(bus.messages.size() == 2);
        CHECK(bus.messages[0].id == 0x10);
        CHECK(bus.messages[1].id == 32);
        CHECK(bus.messages[0].period == doctest::Approx(0.005));

        std::ostringstream out;
        write_report_csv(out, bus, bus_schedulable(bus, 0.0));
        CHECK(out.str().rfind("id,priority,bytes,C_us,J_us,B_us,w_us,R_us,D_us,iterations,schedulable\n", 0) == 0);

        std::istringstream bad("bitrate_bps=500000\nid,priority,bytes,period_ms,jitter_ms,deadline_ms\n1,1,x,5,0,5\n");
        CHECK_THROWS_AS(parse_bus(bad), ParseError);
        std::istringstream dup(
            "bitrate_bps=500000\nid,priority,bytes,period_ms,jitter_ms,deadline_ms\n1,1,8,5,0,5\n2,1,8,5,0,5\n");
        CHECK_THROWS(parse_bus(dup));
    }
}
