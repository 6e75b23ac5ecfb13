#include <doctest.h>

#include <cmath>

#include "tacan/chan_iat.hpp"
#include "tacan/rng.hpp"
#include "tacan/timing.hpp"

using tacan::BitString;
using namespace tacan::chan_iat;

namespace {

// Composite Simpson rule for the upper normal tail: Q(x) = 1/2 - int_0^x phi.
double q_simpson(double x) {
    const int n = 20000;
    const double h = x / n;
    auto phi = [](double z) { return std::exp(-z * z / 2) / std::sqrt(2 * M_PI); };
    double s = phi(0) + phi(x);
    for (int i = 1; i < n; ++i) {
        s += (i % 2 ? 4 : 2) * phi(i * h);
    }
    return 0.5 - s * h / 3;
}

BitString random_bits(tacan::Rng& rng, std::size_t n) {
    BitString b;
    for (std::size_t i = 0; i < n; ++i) {
        b.push_back(rng.bit());
    }
    return b;
}

}  // namespace

TEST_SUITE("chan_iat") {
    TEST_CASE("modulation") {
        IatChannelConfig cfg{0.01, 0.0001, 2};
        const auto z = modulate_iat(BitString{0}, cfg);
        REQUIRE(z.size() == 2);
        CHECK(z[0] == doctest::Approx(0.0101));
        CHECK(z[1] == doctest::Approx(0.0101));
        const auto o = modulate_iat(BitString{1}, cfg);
        CHECK(o[0] == doctest::Approx(0.0099));
        CHECK(modulate_iat(BitString{}, cfg).empty());
        CHECK_THROWS(modulate_iat(BitString{1}, IatChannelConfig{0.01, 0.0, 1}));
        CHECK_THROWS(modulate_iat(BitString{1}, IatChannelConfig{0.01, 0.0001, 0}));
    }

    TEST_CASE("running average") {
        const std::vector<double> x{1, 3, 5};
        CHECK(running_average(x, 1) == x);
        const std::vector<double> y{1, 3};
        CHECK(running_average(y, 2) == std::vector<double>{2});
        CHECK_THROWS_AS(running_average(y, 3), std::invalid_argument);
    }

    TEST_CASE("running average variance matches the endpoint noise term") {
        const double sigma_eta = 1e-4;
        const std::size_t l = 5;
        tacan::timing::ClockModel clock{0.0, sigma_eta, 0.0, 17};
        const auto x = tacan::timing::iats(
            tacan::timing::simulate_arrivals(tacan::timing::make_periodic_itts(0.01, 50000), clock));
        const auto avg = running_average(x, l);
        double m = 0;
        for (double v : avg) m += v;
        m /= avg.size();
        double var = 0;
        for (double v : avg) var += (v - m) * (v - m);
        var /= avg.size() - 1;
        CHECK(var == doctest::Approx(2 * sigma_eta * sigma_eta / (l * l)).epsilon(0.1));
    }

    TEST_CASE("sampling offset search") {
        const std::vector<double> flat(10, 0.01);
        CHECK(find_sampling_offset(flat, 1, 0.01) == 0);
        CHECK(find_sampling_offset(flat, 3, 0.01) == 0);

        // Known phase p: p unmodulated ITTs of T in front of the signal.
        tacan::Rng rng(8);
        const IatChannelConfig cfg{0.01, 0.0001, 4};
        const auto bits = random_bits(rng, 64);
        for (std::size_t p = 0; p < 4; ++p) {
            std::vector<double> x(p, 0.01);
            const auto m = modulate_iat(bits, cfg);
            x.insert(x.end(), m.begin(), m.end());
            CHECK(find_sampling_offset(running_average(x, 4), 4, cfg.threshold()) == p);
        }
    }

    TEST_CASE("noiseless round trip for every window") {
        tacan::Rng rng(1);
        for (std::size_t l = 1; l <= 8; ++l) {
            const IatChannelConfig cfg{0.01, 0.0001, l};
            for (int trial = 0; trial < 20; ++trial) {
                const auto bits = random_bits(rng, 1 + rng.below(100));
                CHECK(demodulate_iat(modulate_iat(bits, cfg), cfg) == bits);
            }
        }
    }

    TEST_CASE("phase invariance on a balanced payload") {
        const IatChannelConfig cfg{0.01, 0.0001, 5};
        tacan::Rng rng(4);
        auto bits = random_bits(rng, 100);
        for (std::size_t p = 0; p < cfg.window; ++p) {
            std::vector<double> x(p, cfg.period);
            const auto m = modulate_iat(bits, cfg);
            x.insert(x.end(), m.begin(), m.end());
            const auto d = demodulate_iat_detailed(x, cfg);
            CHECK(d.offset == p);
            CHECK(d.bits == bits);
        }
    }

    TEST_CASE("decision at exactly the threshold is a zero") {
        const IatChannelConfig cfg{0.01, 0.0001, 1};
        const std::vector<double> x{0.01};
        CHECK(demodulate_iat(x, cfg) == BitString{0});
        const std::vector<double> none;
        CHECK_THROWS_AS(demodulate_iat(none, cfg), std::invalid_argument);
    }

    TEST_CASE("skew-aware threshold") {
        IatChannelConfig cfg{0.01, 0.0001, 3, 500e-6};
        tacan::Rng rng(12);
        const auto bits = random_bits(rng, 80);
        tacan::timing::ClockModel clock{500e-6, 0.0, 0.0, 1};
        const auto x = tacan::timing::iats(tacan::timing::simulate_arrivals(modulate_iat(bits, cfg), clock));
        CHECK(demodulate_iat(x, cfg) == bits);
    }

    TEST_CASE("Q function") {
        CHECK(q_function(0.0) == 0.5);
        for (double x : {0.3, 1.0, 2.326, 2.727, 3.0, 4.5}) {
            CHECK(std::abs(q_function(x) - q_simpson(x)) < 1e-12);
            CHECK(std::abs(q_function(-x) - (1 - q_function(x))) < 1e-12);
        }
        // Frozen values from the mpmath oracle.
        CHECK(std::abs(q_function(1.0) - 0.15865525393145705) < 1e-12);
        CHECK(std::abs(q_function(2.326) - 0.010009275340867665) < 1e-12);
        CHECK(std::abs(q_function(2.727) - 0.0031956519541896363) < 1e-12);
        CHECK(std::abs(q_function(3.0) - 0.0013498980316300945) < 1e-12);
        CHECK(std::abs(q_function(2.326) - 0.01) < 1e-4);
    }

    TEST_CASE("inverse Q") {
        CHECK(std::abs(q_inverse(0.01) - 2.3263478740408408) < 1e-9);
        CHECK(std::abs(q_inverse(0.001) - 3.090232306167813) < 1e-9);
        CHECK(std::abs(q_inverse(0.5)) < 1e-9);
        CHECK_THROWS(q_inverse(0.0));
        CHECK_THROWS(q_inverse(1.0));
    }

    TEST_CASE("analytic BER") {
        const IatChannelConfig cfg{0.01, 0.0001, 3};
        CHECK(std::abs(analytic_ber(cfg, 0.00011) - 0.0031930116413535272) < 1e-12);
        IatChannelConfig zero = cfg;
        zero.delta = 0.0;
        CHECK(analytic_ber(zero, 0.00011) == 0.5);
        CHECK_THROWS(analytic_ber(cfg, 0.0));

        double prev = 1.0;
        for (std::size_t l = 1; l <= 8; ++l) {
            IatChannelConfig c = cfg;
            c.window = l;
            const double p = analytic_ber(c, 0.00011);
            CHECK(p < prev);
            prev = p;
        }
        IatChannelConfig wider = cfg;
        wider.delta = 0.00012;
        CHECK(analytic_ber(wider, 0.00011) < analytic_ber(cfg, 0.00011));
        CHECK(analytic_ber(cfg, 0.00012) > analytic_ber(cfg, 0.00011));
    }

    TEST_CASE("minimum window") {
        CHECK(min_window(0.0001, 0.0, 0.00011, 0.01) == 3);
        CHECK(min_window(0.0001, 0.0, 0.00011, 0.5) == 1);
        CHECK_THROWS(min_window(0.0001, 0.0, 0.00011, 0.0));
        CHECK_THROWS(min_window(0.0001, 0.0, 0.00011, 0.6));
        for (double sigma : {0.00005, 0.00011, 0.00027}) {
            for (double eps : {0.1, 0.01, 0.001}) {
                const auto l = min_window(0.0001, 0.0, sigma, eps);
                CHECK(analytic_ber({0.01, 0.0001, l}, sigma) <= eps);
                if (l > 1) {
                    CHECK(analytic_ber({0.01, 0.0001, l - 1}, sigma) > eps);
                }
            }
        }
    }

    TEST_CASE("Monte-Carlo BER agrees with the analytic law") {
        const double t = 0.01;
        const IatChannelConfig cfg{t, 0.01 * t, 6};
        const double sigma = 0.011 * t;
        tacan::Rng rng(2024);
        const std::size_t n = 10000;
        const auto bits = random_bits(rng, n);
        tacan::timing::ClockModel clock{0.0, sigma / std::sqrt(2.0), 0.0, 0};
        const auto x = tacan::timing::iats(tacan::timing::simulate_arrivals(modulate_iat(bits, cfg), clock, rng));
        const auto out = demodulate_iat(x, cfg);
        REQUIRE(out.size() == n);
        std::size_t errors = 0;
        for (std::size_t i = 0; i < n; ++i) {
            errors += out[i] != bits[i] ? 1 : 0;
        }
        const double p = analytic_ber(cfg, sigma);
        CHECK(std::abs(static_cast<double>(errors) / n - p) <= 3 * std::sqrt(p * (1 - p) / n));
    }
}
