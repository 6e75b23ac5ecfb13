#include <doctest.h>

#include <cmath>

#include "tacan/chan_offset.hpp"
#include "tacan/rng.hpp"
#include "tacan/timing.hpp"

using namespace tacan::chan_offset;

namespace {

std::vector<Symbol> random_symbols(tacan::Rng& rng, std::size_t n) {
    std::vector<Symbol> s(n);
    for (auto& v : s) {
        v = static_cast<Symbol>(rng.below(3));
    }
    // Ensure one of each data symbol for a valid reference level.
    s[0] = Symbol::zero;
    s[n - 1] = Symbol::one;
    return s;
}

}  // namespace

TEST_SUITE("chan_offset") {
    TEST_CASE("modulation") {
        OffsetChannelConfig cfg{0.01, 0.0001, 4, 1};
        const std::vector<Symbol> zero{Symbol::zero};
        const auto z = modulate_offset(zero, cfg);
        REQUIRE(z.size() == 4);
        CHECK(z[0] == doctest::Approx(0.0099));
        CHECK(z[1] == doctest::Approx(0.0099));
        CHECK(z[2] == doctest::Approx(0.0101));
        CHECK(z[3] == doctest::Approx(0.0101));
        const std::vector<Symbol> sil{Symbol::silence};
        CHECK(modulate_offset(sil, cfg) == std::vector<double>(4, 0.01));
        cfg.window = 3;
        CHECK_THROWS_AS(modulate_offset(zero, cfg), std::invalid_argument);

        // Each symbol lasts exactly L T.
        OffsetChannelConfig c6{0.01, 0.0001, 6, 1};
        const std::vector<Symbol> one{Symbol::one};
        double total = 0;
        for (double v : modulate_offset(one, c6)) total += v;
        CHECK(total == doctest::Approx(0.06).epsilon(1e-14));
    }

    TEST_CASE("batch offsets") {
        const double t = 0.01;
        const double d = 0.0001;
        CHECK(batch_offsets(std::vector<double>(5, t), t) == std::vector<double>(5, 0.0));
        const std::vector<double> x{t - d, t - d, t + d, t + d};
        const auto o = batch_offsets(x, t);
        CHECK(o[0] == doctest::Approx(d));
        CHECK(o[1] == doctest::Approx(2 * d));
        CHECK(o[2] == doctest::Approx(d));
        CHECK(std::abs(o[3]) < 1e-15);

        // Lengthening L ITTs by delta lowers the offset by delta L.
        std::vector<double> y(8, t);
        for (std::size_t i = 2; i < 6; ++i) y[i] += d;
        CHECK(batch_offsets(y, t).back() == doctest::Approx(-4 * d));
    }

    TEST_CASE("noiseless [0, 1] decodes") {
        OffsetChannelConfig cfg{0.01, 0.0001, 4, 2};
        const std::vector<Symbol> s{Symbol::zero, Symbol::one};
        const auto b = demodulate_batch(modulate_offset(s, cfg), cfg);
        CHECK(b.symbols == s);
        CHECK(std::abs(b.kappa) < 1e-15);
        CHECK(b.offset == 2);
    }

    TEST_CASE("all-silence batch decodes as silence") {
        OffsetChannelConfig cfg{0.01, 0.0001, 4, 5};
        const std::vector<Symbol> s(5, Symbol::silence);
        CHECK(demodulate_offset(modulate_offset(s, cfg), cfg) == s);
        CHECK_THROWS_AS(demodulate_offset(std::vector<double>(19, 0.01), cfg), std::invalid_argument);
    }

    TEST_CASE("offset returns to reference after each symbol") {
        OffsetChannelConfig cfg{0.01, 0.0001, 6, 30};
        tacan::Rng rng(6);
        const auto s = random_symbols(rng, 30);
        const auto o = batch_offsets(modulate_offset(s, cfg), cfg.period);
        for (std::size_t j = 1; j <= 30; ++j) {
            CHECK(std::abs(o[j * 6 - 1]) < 1e-15);
        }
    }

    TEST_CASE("noiseless round trip and peak deviation") {
        tacan::Rng rng(10);
        for (std::size_t l : {2u, 4u, 6u, 8u}) {
            OffsetChannelConfig cfg{0.01, 0.0001, l, 40};
            for (int trial = 0; trial < 20; ++trial) {
                const auto s = random_symbols(rng, 80);
                const auto x = modulate_offset(s, cfg);
                CHECK(demodulate_offset(x, cfg) == s);
                const auto o = batch_offsets(x, cfg.period);
                for (std::size_t j = 0; j < s.size(); ++j) {
                    if (s[j] == Symbol::silence) continue;
                    const double peak = o[j * l + l / 2 - 1];
                    CHECK(std::abs(std::abs(peak) - cfg.delta * l / 2) <= 1e-12 * cfg.delta * l / 2);
                }
            }
        }
    }

    TEST_CASE("symbol error rate under moderate noise") {
        const std::size_t l = 4;
        OffsetChannelConfig cfg{0.01, 0.0001, l, 100};
        tacan::Rng rng(404);
        const auto s = random_symbols(rng, 10000);
        // sigma is the IAT deviation; arrival noise is sigma / sqrt(2).
        tacan::timing::ClockModel clock{0.0, cfg.delta * l / 20 / std::sqrt(2.0), 0.0, 0};
        const auto x = tacan::timing::iats(tacan::timing::simulate_arrivals(modulate_offset(s, cfg), clock, rng));
        const auto d = demodulate_offset(x, cfg);
        REQUIRE(d.size() == s.size());
        std::size_t errors = 0;
        for (std::size_t i = 0; i < s.size(); ++i) errors += d[i] != s[i] ? 1 : 0;
        CHECK(static_cast<double>(errors) / s.size() < 0.01);
    }

    TEST_CASE("split at silence") {
        const std::vector<Symbol> s{Symbol::silence, Symbol::zero, Symbol::one, Symbol::silence, Symbol::silence,
                                    Symbol::one, Symbol::silence};
        const auto runs = split_at_silence(s);
        REQUIRE(runs.size() == 2);
        CHECK(runs[0].to_string() == "01");
        CHECK(runs[1].to_string() == "1");
        CHECK(to_symbols(tacan::BitString::from_string("10")) == std::vector<Symbol>{Symbol::one, Symbol::zero});
    }
}
