// One PASS/FAIL line per acceptance criterion.
//
//   tacan_acceptance                 run all criteria
//   tacan_acceptance --criterion N   run criterion N only

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "cli.hpp"
#include "tacan/attacks.hpp"
#include "tacan/auth.hpp"
#include "tacan/bench.hpp"
#include "tacan/bitcodec.hpp"
#include "tacan/chan_hybrid.hpp"
#include "tacan/chan_iat.hpp"
#include "tacan/chan_offset.hpp"
#include "tacan/rng.hpp"
#include "tacan/sched.hpp"
#include "tacan/timing.hpp"

using namespace tacan;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

bool within_rel(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

// BER law: every Monte-Carlo cell within 3 binomial SE of Q(L delta / sigma).
Outcome ber_law() {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<double> sigmas{0.005, 0.011, 0.027};
    const auto cells = bench::ber_sweep(sigmas, 1, 8, 0.01, 100000, 20260101);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::size_t bad = 0;
    double worst = 0.0;
    for (const auto& c : cells) {
        const double dev = std::abs(c.empirical - c.analytic);
        const double z = c.se > 0 ? dev / c.se : (dev > 0 ? INFINITY : 0.0);
        worst = std::max(worst, z);
        if (z > 3.0) {
            ++bad;
            o.require(false, fmt::format("sigma={} L={} emp={:.5f} Q={:.5f}", c.sigma_frac, c.window, c.empirical,
                                         c.analytic));
        }
    }
    o.require(cells.size() == 24, "expected 24 cells");
    o.require(secs < 120.0, fmt::format("took {:.1f} s", secs));
    o.detail = fmt::format("{} cells, {} outside 3 SE, worst {:.2f} SE, {:.1f} s", cells.size(), bad, worst, secs) +
               (o.detail.empty() ? "" : " [" + o.detail + "]");
    return o;
}

// Tabulated BER trends at L = 3 (sigma 1.1%) and L = 5 (sigma <= 2.7%).
Outcome ber_trends() {
    Outcome o;
    const auto c3 = bench::ber_cell(0.011, 3, 0.01, 100000, 31);
    o.require(c3.empirical < 0.001, fmt::format("sigma=1.1% L=3 BER {:.4f} (Q={:.4f}) not < 0.001", c3.empirical,
                                                c3.analytic));
    std::string l5;
    for (double s : {0.005, 0.011, 0.027}) {
        const auto c5 = bench::ber_cell(s, 5, 0.01, 100000, 32);
        l5 += fmt::format(" {}:{:.4f}", s, c5.empirical);
        o.require(c5.empirical <= 0.003, fmt::format("sigma={} L=5 BER {:.4f} (Q={:.4f}) > 0.003", s, c5.empirical,
                                                     c5.analytic));
    }
    o.detail = fmt::format("L=3 BER {:.4f}; L=5 BER{}", c3.empirical, l5) + (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

Outcome throughput() {
    Outcome o;
    const auto sample = bench::make_frame_sample(1000, 1);
    const auto iat = bench::throughput_iat(0.01, 1, 32, 16, sample.mean_frame_bits());
    const auto lsb = bench::throughput_lsb(0.01, 2, 32, 16, sample.frame_bits);
    const auto h11 = bench::throughput_hybrid({1, 1, 32, 16}, 0.01, sample);
    const auto h22 = bench::throughput_hybrid({2, 2, 32, 16}, 0.01, sample);
    o.require(iat.r_c == 100.0, fmt::format("IAT Rc {}", iat.r_c));
    o.require(within_rel(iat.r_a, 61.8, 0.03), fmt::format("IAT Ra {:.2f}", iat.r_a));
    o.require(within_rel(lsb.r_c, 197.8, 0.03), fmt::format("LSB Rc {:.2f}", lsb.r_c));
    o.require(within_rel(lsb.r_a, 122.3, 0.03), fmt::format("LSB Ra {:.2f}", lsb.r_a));
    o.require(within_rel(h11.r_c, 198.6, 0.03), fmt::format("hybrid(1,1) Rc {:.2f}", h11.r_c));
    o.require(within_rel(h11.r_a, 92.5, 0.03), fmt::format("hybrid(1,1) Ra {:.2f}", h11.r_a));
    o.require(h22.r_c == lsb.r_c && h22.r_a == lsb.r_a, "hybrid(2,2) differs from LSB");
    o.detail = fmt::format("IAT {:.1f}/{:.2f} LSB {:.2f}/{:.2f} H(1,1) {:.2f}/{:.2f} H(2,2) {:.2f}/{:.2f}", iat.r_c,
                           iat.r_a, lsb.r_c, lsb.r_a, h11.r_c, h11.r_a, h22.r_c, h22.r_a) +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

Outcome splitting() {
    Outcome o;
    const double a1 = chan_hybrid::splitting_ratio({1, 1, 32, 16});
    const double a2 = chan_hybrid::splitting_ratio({2, 1, 32, 16});
    const double a3 = chan_hybrid::splitting_ratio({3, 1, 32, 16});
    o.require(std::abs(a1 * 100 - 50.0) < 1e-9, fmt::format("alpha(1,1) {}", a1));
    o.require(std::abs(a2 * 100 - 16.7) <= 0.1, fmt::format("alpha(2,1) {}", a2));
    o.require(a3 == 0.0, fmt::format("alpha(3,1) {}", a3));
    o.detail = fmt::format("{:.1f}% {:.2f}% {:.1f}%", a1 * 100, a2 * 100, a3 * 100);
    return o;
}

Outcome schedulability() {
    Outcome o;
    sched::BusSpec bus;
    bus.tau_bit = 2e-6;
    for (int i = 0; i < 45; ++i) {
        bus.messages.push_back({static_cast<std::uint32_t>(0x100 + i), i, 8, 1.0, 0.0, 1.0});
    }
    bus.messages.push_back({0x7FF, 45, 8, 0.010, 0.0, 1.0});
    const auto a = sched::tacan_adjustment(bus, 45, 0.01);
    const double j = a.jitter_increase * 1e6;
    const double b = a.blocking_increase * 1e6;
    const double c = a.per_message_increase * 1e6;
    o.require(std::abs(j - 100.0) < 1e-9, fmt::format("jitter +{}", j));
    o.require(std::abs(b - 145.45) < 0.01 && std::abs(b - 145.0) <= 1.0, fmt::format("blocking +{}", b));
    o.require(std::abs(c - 3.23) <= 0.1, fmt::format("per-message +{}", c));
    const auto base = sched::worst_case_response(bus, 45);
    const auto adj = sched::tacan_adjusted_response(bus, 45, 0.01);
    o.require(std::abs((adj.b - base.b) - a.blocking_increase) < 1e-12, "recurrence blocking disagrees");
    o.detail = fmt::format("jitter +{:.2f} us, blocking +{:.2f} us, C +{:.2f} us", j, b, c);
    return o;
}

Outcome forgery() {
    Outcome o;
    const auto key = auth::Bytes(32, 0x5A);
    const auth::DigestPolicy policy{auth::DigestMode::last_bits, 8};
    const std::size_t n = 100000;
    auth::AuthContext monitor(key, 0, 24, 0x100);
    std::size_t accepted = 0;
    for (const auto& msg : attacks::forge_auth_stream(n, 8, 606)) {
        accepted += auth::verify_auth_message(msg, monitor, policy) ? 1 : 0;
    }
    const double p = 1.0 / 256;
    const double rate = static_cast<double>(accepted) / n;
    const double se = std::sqrt(p * (1 - p) / n);
    o.require(std::abs(rate - p) <= 3 * se, fmt::format("acceptance {:.5f}", rate));

    auth::AuthContext ecu(key, 3, 24, 0x200);
    auth::AuthContext mon(key, 3, 24, 0x200);
    std::vector<BitString> sent;
    std::size_t genuine_ok = 0;
    for (int i = 0; i < 1000; ++i) {
        sent.push_back(auth::generate_auth_message(ecu, policy));
        genuine_ok += auth::verify_auth_message(sent.back(), mon, policy) ? 1 : 0;
    }
    o.require(genuine_ok == sent.size(), "genuine frames rejected");
    std::size_t replay_ok = 0;
    for (const auto& m : sent) {
        replay_ok += auth::verify_auth_message(m, mon, policy) ? 1 : 0;
    }
    o.require(replay_ok == 0, fmt::format("{} replays accepted", replay_ok));
    o.detail = fmt::format("forged acceptance {:.4f}% (expected {:.4f}% +/- {:.4f}), replays accepted {}/{}",
                           rate * 100, p * 100, 3 * se * 100, replay_ok, sent.size()) +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

std::uint8_t bitwise_crc8(const std::string& s) {
    std::uint8_t crc = 0xFF;
    for (unsigned char ch : s) {
        for (int i = 7; i >= 0; --i) {
            const bool in = (ch >> i) & 1;
            const bool top = crc & 0x80;
            crc = static_cast<std::uint8_t>(crc << 1);
            if (in != top) crc ^= 0x1D;
        }
    }
    return crc ^ 0xFF;
}

Outcome codec() {
    Outcome o;
    std::size_t checked = 0;
    for (unsigned n = 0; n <= 12; ++n) {
        for (unsigned v = 0; v < (1U << n); ++v) {
            const auto raw = BitString::from_uint(v, n);
            const auto st = bitcodec::stuff_bits(raw);
            if (bitcodec::destuff_bits(st) != raw) {
                o.require(false, "round trip failed for " + raw.to_string());
            }
            ++checked;
        }
    }
    const std::string check = "123456789";
    const std::vector<std::uint8_t> bytes(check.begin(), check.end());
    const auto crc = bitcodec::crc8(bytes);
    o.require(bitwise_crc8(check) == 0x4B, "bitwise oracle disagrees with 0x4B");
    o.require(crc == 0x4B, fmt::format("crc8 = 0x{:02X}", crc));
    const auto wc = bitcodec::worst_case_frame_len(48);
    o.require(wc == 58, fmt::format("worst case {}", wc));
    o.detail = fmt::format("{} strings round-tripped, crc 0x{:02X}, worst_case_frame_len(48) = {}", checked, crc, wc) +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

std::vector<chan_offset::Symbol> random_symbols(Rng& rng, std::size_t n) {
    std::vector<chan_offset::Symbol> s(n);
    for (auto& v : s) v = static_cast<chan_offset::Symbol>(rng.below(3));
    s.front() = chan_offset::Symbol::zero;
    s.back() = chan_offset::Symbol::one;
    return s;
}

Outcome offset_channel() {
    using chan_offset::Symbol;
    Outcome o;
    Rng rng(808);
    double worst_peak = 0.0;
    for (std::size_t l : {2u, 4u, 6u, 8u}) {
        const chan_offset::OffsetChannelConfig cfg{0.01, 0.0001, l, 50};
        const auto s = random_symbols(rng, 1000);
        const auto x = chan_offset::modulate_offset(s, cfg);
        o.require(chan_offset::demodulate_offset(x, cfg) == s, fmt::format("noiseless round trip failed at L={}", l));
        const auto off = chan_offset::batch_offsets(x, cfg.period);
        const double want = cfg.delta * static_cast<double>(l) / 2;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (s[j] == Symbol::silence) continue;
            worst_peak = std::max(worst_peak, std::abs(std::abs(off[j * l + l / 2 - 1]) - want) / want);
        }
    }
    o.require(worst_peak <= 1e-12, fmt::format("peak deviation off by {:.2e}", worst_peak));

    const std::size_t l = 4;
    const chan_offset::OffsetChannelConfig cfg{0.01, 0.0001, l, 100};
    const auto s = random_symbols(rng, 10000);
    const double sigma = cfg.delta * static_cast<double>(l) / 20;
    timing::ClockModel clock;
    clock.sigma_eta = sigma / std::sqrt(2.0);
    const auto x = timing::iats(timing::simulate_arrivals(chan_offset::modulate_offset(s, cfg), clock, rng));
    const auto d = chan_offset::demodulate_offset(x, cfg);
    std::size_t errors = d.size() == s.size() ? 0 : s.size();
    for (std::size_t i = 0; i < std::min(d.size(), s.size()); ++i) errors += d[i] != s[i] ? 1 : 0;
    const double ser = static_cast<double>(errors) / static_cast<double>(s.size());
    o.require(ser < 0.01, fmt::format("symbol error rate {:.4f}", ser));
    o.detail = fmt::format("round trips exact, peak rel err {:.1e}, SER {:.4f} over {} symbols", worst_peak, ser,
                           s.size()) +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

Outcome detector() {
    Outcome o;
    std::size_t strings = 0;
    for (unsigned n = 0; n <= 12; ++n) {
        for (unsigned mask = 0; mask < (1U << n); ++mask) {
            std::vector<attacks::AuthResult> r(n);
            unsigned run = 0;
            unsigned best = 0;
            for (unsigned i = 0; i < n; ++i) {
                if ((mask >> i) & 1U) {
                    r[i].kind = attacks::AuthKind::verification_failure;
                    best = std::max(best, ++run);
                } else {
                    run = 0;
                }
            }
            for (unsigned k = 1; k <= 13; ++k) {
                if (attacks::any_alarm(r, k) != (best >= k)) {
                    o.require(false, fmt::format("mask {:b} K={}", mask, k));
                }
            }
            ++strings;
        }
    }
    const auto configs = bench::vehicle_fa_configs();
    const std::vector<std::size_t> ks{1, 2, 3};
    const auto rows = bench::fa_table(configs, ks, 100, 10, 9090);
    std::string table;
    for (const auto& row : rows) {
        table += fmt::format(" {}/L{}/K{}={:.2f}%", row.name, row.window, row.k, row.p_fa * 100);
        o.require(row.frames >= 1000, row.name + " below 1000 frames");
        if (row.k == 2) {
            o.require(row.p_fa <= 0.0033, fmt::format("{} K=2 P_FA {:.4f}", row.name, row.p_fa));
        }
        if (row.k == 3) {
            o.require(row.p_fa == 0.0, fmt::format("{} K=3 P_FA {:.4f}", row.name, row.p_fa));
        }
    }
    o.detail = fmt::format("{} strings exhaustive;", strings) + table + (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

Outcome determinism() {
    Outcome o;
    const std::vector<std::vector<std::string>> cmds{
        {"simulate", "--frames", "6", "--sigma-frac", "0.011", "--seed", "5"},
        {"simulate", "--channel", "hybrid", "--frames", "6", "--attack", "masquerade", "--attack-start-s", "3"},
        {"simulate", "--channel", "offset", "--frames", "4", "--sigma-frac", "0.002", "--noise", "laplace"},
        {"ber-sweep", "--sigma-fracs", "0.011,0.027", "--l-max", "3", "--bits", "10000", "--seed", "11"},
        {"throughput", "--frames", "300", "--hybrid", "1:1,2:2", "--seed", "7"},
        {"detect", "--runs", "100", "--frames-per-run", "2", "-k", "1,2", "--seed", "3"},
        {"detect", "--runs", "100", "--frames-per-run", "4", "--attack", "suspension", "--attack-start-s", "1"},
        {"split", "--l1", "2", "--l2", "1", "--message", "10110011101"},
    };
    std::size_t same = 0;
    for (const auto& c : cmds) {
        auto args = c;
        args.insert(args.begin() + 1, {"--format", "csv"});
        std::ostringstream a, b, ea, eb;
        const int ca = cli::run(args, a, ea);
        const int cb = cli::run(args, b, eb);
        if (ca != 0 || cb != 0) {
            o.require(false, c[0] + " exited " + std::to_string(ca) + ": " + ea.str());
            continue;
        }
        if (a.str() != b.str() || a.str().empty()) {
            o.require(false, c[0] + " output differs");
            continue;
        }
        ++same;
    }
    o.detail = fmt::format("{}/{} invocations byte-identical", same, cmds.size()) +
               (o.pass ? "" : " [" + o.detail + "]");
    return o;
}

const std::vector<std::pair<const char*, std::function<Outcome()>>>& criteria() {
    static const std::vector<std::pair<const char*, std::function<Outcome()>>> list{
        {"IAT bit error rate follows Q(L delta / sigma)", ber_law},
        {"IAT bit error rate trends at L = 3 and L = 5", ber_trends},
        {"throughput table", throughput},
        {"hybrid splitting ratio", splitting},
        {"schedulability adjustment numbers", schedulability},
        {"forgery and replay rejection", forgery},
        {"frame codec properties", codec},
        {"offset channel", offset_channel},
        {"detector semantics and false alarms", detector},
        {"CLI determinism", determinism},
    };
    return list;
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t only = 0;
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--criterion" && i + 1 < argc) {
            only = static_cast<std::size_t>(std::strtoul(argv[++i], nullptr, 10));
        } else {
            std::cerr << "usage: tacan_acceptance [--criterion N]\n";
            return 2;
        }
    }
    const auto& list = criteria();
    if (only > list.size()) {
        std::cerr << "no criterion " << only << "\n";
        return 2;
    }
    bool all = true;
    for (std::size_t i = 0; i < list.size(); ++i) {
        if (only != 0 && only != i + 1) continue;
        Outcome o;
        try {
            o = list[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        all = all && o.pass;
        std::cout << fmt::format("criterion {:2} {}: {} - {}\n", i + 1, o.pass ? "PASS" : "FAIL", list[i].first,
                                 o.detail);
    }
    return all ? 0 : 1;
}
