#include "tacan/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "tacan/attacks.hpp"
#include "tacan/bitcodec.hpp"
#include "tacan/chan_iat.hpp"
#include "tacan/link.hpp"
#include "tacan/rng.hpp"
#include "tacan/timing.hpp"

namespace tacan::bench {

namespace {

std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

// Runs fn(i) for i in [0, n) on worker threads. Results must be written to
// per-index slots so that the output does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 16);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, n); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) {
                        error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

// Shared by the LSB and hybrid rows so that alpha = 0 reproduces the LSB
// row bit for bit.
void fill_rates(ThroughputRow& row, double sum_bits, double sum_periods, double frames) {
    const double seconds = sum_periods * row.period;
    row.r_c = sum_bits / seconds;
    row.r_a = static_cast<double>(row.n_m) * frames / seconds;
}

}  // namespace

double FrameSample::mean_frame_bits() const {
    if (frame_bits.empty()) {
        throw std::invalid_argument("FrameSample: empty sample");
    }
    const double total = std::accumulate(frame_bits.begin(), frame_bits.end(), 0.0,
                                         [](double a, std::size_t b) { return a + static_cast<double>(b); });
    return total / static_cast<double>(frame_bits.size());
}

FrameSample make_frame_sample(std::size_t n_frames, std::uint64_t seed, std::size_t counter_bits,
                              const auth::DigestPolicy& policy) {
    auth::AuthContext ctx(link::master_key_from_seed(seed), 0, counter_bits);
    FrameSample s;
    s.n_m = counter_bits + policy.bits;
    s.messages.reserve(n_frames);
    s.frame_bits.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        s.messages.push_back(auth::generate_auth_message(ctx, policy));
        s.frame_bits.push_back(bitcodec::encode_frame(s.messages.back()).size());
    }
    return s;
}

ThroughputRow throughput_iat(double t, std::size_t l, std::size_t n_m, std::size_t n_o, double avg_frame_bits) {
    if (!(t > 0.0) || l == 0 || !(avg_frame_bits > 0.0)) {
        throw std::invalid_argument("throughput_iat: invalid parameters");
    }
    ThroughputRow row{"iat", l, 0, t, n_m, n_o, 1.0, n_m, 0.0, 0.0};
    row.r_c = 1.0 / (static_cast<double>(l) * t);
    row.r_a = static_cast<double>(n_m) / (avg_frame_bits * static_cast<double>(l) * t);
    return row;
}

ThroughputRow throughput_lsb(double t, std::size_t l, std::size_t n_m, std::size_t n_o,
                             std::span<const std::size_t> frame_bits) {
    if (!(t > 0.0) || l == 0 || frame_bits.empty()) {
        throw std::invalid_argument("throughput_lsb: invalid parameters");
    }
    ThroughputRow row{"lsb", 0, l, t, n_m, n_o, 0.0, 0, 0.0, 0.0};
    double bits = 0.0;
    double periods = 0.0;
    for (std::size_t f : frame_bits) {
        bits += static_cast<double>(f);
        periods += static_cast<double>(ceil_div(f, l));
    }
    fill_rates(row, bits, periods, static_cast<double>(frame_bits.size()));
    return row;
}

ThroughputRow throughput_hybrid(const chan_hybrid::HybridConfig& cfg, double t, const FrameSample& sample) {
    if (!(t > 0.0) || sample.messages.empty()) {
        throw std::invalid_argument("throughput_hybrid: invalid parameters");
    }
    ThroughputRow row{"hybrid", cfg.l1, cfg.l2, t, cfg.n_m, cfg.n_o, chan_hybrid::splitting_ratio(cfg), 0, 0.0, 0.0};
    row.iat_bits = chan_hybrid::refine_split(cfg, sample.messages);
    double bits = 0.0;
    double periods = 0.0;
    for (const auto& m : sample.messages) {
        const auto parts = chan_hybrid::split_at(m, row.iat_bits);
        const std::size_t f1 = parts.iat.empty() ? 0 : bitcodec::encode_frame(parts.iat).size();
        const std::size_t f2 = parts.lsb.empty() ? 0 : bitcodec::encode_frame(parts.lsb).size();
        bits += static_cast<double>(f1 + f2);
        periods += static_cast<double>(std::max(f1 * cfg.l1, ceil_div(f2, cfg.l2)));
    }
    fill_rates(row, bits, periods, static_cast<double>(sample.messages.size()));
    return row;
}

std::vector<ThroughputRow> throughput_table(double t, std::size_t l1, std::size_t l2, const FrameSample& sample) {
    const std::size_t n_o = bitcodec::kOverheadBits;
    return {throughput_iat(t, l1, sample.n_m, n_o, sample.mean_frame_bits()),
            throughput_lsb(t, l2, sample.n_m, n_o, sample.frame_bits),
            throughput_hybrid({l1, l2, sample.n_m, n_o}, t, sample)};
}

void write_throughput_csv(std::ostream& out, std::span<const ThroughputRow> rows) {
    out << "channel,L1,L2,T_s,Nm,No,alpha,iat_bits,Rc_bps,Ra_bps\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{},{},{:.6f},{},{},{:.6f},{},{:.4f},{:.4f}\n", r.channel, r.l1, r.l2, r.period, r.n_m,
                           r.n_o, r.alpha, r.iat_bits, r.r_c, r.r_a);
    }
}

BerCell ber_cell(double sigma_frac, std::size_t window, double delta_frac, std::size_t bits, std::uint64_t seed,
                 double period) {
    if (!(sigma_frac > 0.0) || window == 0 || bits == 0 || !(delta_frac >= 0.0 && delta_frac < 1.0)) {
        throw std::invalid_argument("ber_cell: invalid parameters");
    }
    BerCell cell;
    cell.sigma_frac = sigma_frac;
    cell.window = window;
    cell.delta_frac = delta_frac;
    cell.bits = bits;

    Rng rng(seed);
    BitString sent;
    sent.reserve(bits);
    for (std::size_t i = 0; i < bits; ++i) {
        sent.push_back(rng.bit());
    }
    const double delta = delta_frac * period;
    // delta = 0 is a legitimate sweep column but not a valid channel
    // configuration, so modulate by hand.
    std::vector<double> itts;
    itts.reserve(bits * window);
    for (std::size_t i = 0; i < bits; ++i) {
        itts.insert(itts.end(), window, sent[i] ? period - delta : period + delta);
    }
    timing::ClockModel clock;
    clock.sigma_eta = sigma_frac * period / std::sqrt(2.0);
    const auto trace = timing::simulate_arrivals(itts, clock, rng);
    const auto x = timing::iats(trace);

    const auto avg = chan_iat::running_average(x, window);
    const double gamma = period;
    const std::size_t tau = chan_iat::find_sampling_offset(avg, window, gamma);
    std::size_t compared = 0;
    for (std::size_t j = 0; j < bits; ++j) {
        const std::size_t idx = j * window + tau;
        if (idx >= avg.size()) {
            break;
        }
        const bool decoded = !(avg[idx] >= gamma);
        cell.errors += decoded != sent[j] ? 1 : 0;
        ++compared;
    }
    // Bits lost to a nonzero sampling offset count as errors.
    cell.errors += bits - compared;

    cell.empirical = static_cast<double>(cell.errors) / static_cast<double>(bits);
    cell.analytic = chan_iat::q_function(static_cast<double>(window) * delta_frac / sigma_frac);
    cell.se = std::sqrt(cell.analytic * (1.0 - cell.analytic) / static_cast<double>(bits));
    return cell;
}

std::vector<BerCell> ber_sweep(std::span<const double> sigma_fracs, std::size_t l_min, std::size_t l_max,
                               double delta_frac, std::size_t bits_per_point, std::uint64_t seed, double period) {
    if (bits_per_point < 10000) {
        throw std::invalid_argument("ber_sweep: need at least 10^4 bits per point");
    }
    if (l_min == 0 || l_max < l_min || sigma_fracs.empty()) {
        throw std::invalid_argument("ber_sweep: empty grid");
    }
    const std::size_t nl = l_max - l_min + 1;
    std::vector<BerCell> cells(sigma_fracs.size() * nl);
    parallel_for(cells.size(), [&](std::size_t i) {
        cells[i] = ber_cell(sigma_fracs[i / nl], l_min + i % nl, delta_frac, bits_per_point,
                            Rng::derive_seed(seed, i), period);
    });
    return cells;
}

void write_ber_csv(std::ostream& out, std::span<const BerCell> cells) {
    out << "sigma_frac,L,delta_frac,bits,errors,analytic_Pe,empirical_Pe,se\n";
    for (const auto& c : cells) {
        out << fmt::format("{:.6f},{},{:.6f},{},{},{:.6e},{:.6e},{:.6e}\n", c.sigma_frac, c.window, c.delta_frac,
                           c.bits, c.errors, c.analytic, c.empirical, c.se);
    }
}

std::size_t window_for_frame_budget(double sigma_frac, double delta_frac, std::size_t slot_bits,
                                    double frame_failure) {
    if (slot_bits == 0 || !(frame_failure > 0.0 && frame_failure < 1.0)) {
        throw std::invalid_argument("window_for_frame_budget: invalid budget");
    }
    const double eps = -std::expm1(std::log1p(-frame_failure) / static_cast<double>(slot_bits));
    return chan_iat::min_window(delta_frac, 0.0, sigma_frac, eps);
}

std::vector<FaConfig> vehicle_fa_configs() {
    link::LinkConfig base;
    const std::size_t slot_bits = link::slot_layout(base).timing_slot_bits;
    const struct {
        const char* name;
        double sigma;
    } msgs[] = {{"0x0D1", 0.027}, {"0x185", 0.016}, {"0x22A", 0.012}, {"0x3FB", 0.014}, {"0x4D1", 0.014}};
    std::vector<FaConfig> out;
    for (const auto& m : msgs) {
        FaConfig c;
        c.name = m.name;
        c.sigma_frac = m.sigma;
        c.delta_frac = 0.02;
        c.window = window_for_frame_budget(m.sigma, c.delta_frac, slot_bits, 0.02);
        out.push_back(c);
    }
    return out;
}

std::vector<FaRow> fa_table(std::span<const FaConfig> configs, std::span<const std::size_t> ks, std::size_t runs,
                            std::size_t frames_per_run, std::uint64_t seed) {
    if (runs < 100) {
        throw std::invalid_argument("fa_table: need at least 100 runs");
    }
    if (ks.empty() || frames_per_run == 0) {
        throw std::invalid_argument("fa_table: empty K list or zero frames");
    }
    for (std::size_t k : ks) {
        if (k == 0) {
            throw std::invalid_argument("fa_table: K must be >= 1");
        }
    }
    // results[c * runs + r] holds the per-slot outcomes of one run.
    std::vector<std::vector<attacks::AuthResult>> results(configs.size() * runs);
    parallel_for(results.size(), [&](std::size_t i) {
        const auto& fc = configs[i / runs];
        link::LinkConfig cfg;
        cfg.channel = link::Channel::iat;
        cfg.period = fc.period;
        cfg.sigma_frac = fc.sigma_frac;
        cfg.delta_frac = fc.delta_frac;
        cfg.window = fc.window;
        results[i] = link::run_link(cfg, frames_per_run, {}, Rng::derive_seed(seed, i)).results;
    });

    std::vector<FaRow> rows;
    for (std::size_t c = 0; c < configs.size(); ++c) {
        std::size_t reception = 0;
        std::size_t verification = 0;
        std::size_t slots = 0;
        for (std::size_t r = 0; r < runs; ++r) {
            for (const auto& res : results[c * runs + r]) {
                ++slots;
                reception += res.kind == attacks::AuthKind::reception_failure ? 1 : 0;
                verification += res.kind == attacks::AuthKind::verification_failure ? 1 : 0;
            }
        }
        for (std::size_t k : ks) {
            std::size_t alarm_slots = 0;
            std::size_t alarm_runs = 0;
            for (std::size_t r = 0; r < runs; ++r) {
                attacks::DetectorState state(k);
                for (const auto& res : results[c * runs + r]) {
                    auto [next, alarm] = attacks::monitor_step(std::move(state), res);
                    state = std::move(next);
                    alarm_slots += alarm ? 1 : 0;
                }
                alarm_runs += state.alarms.empty() ? 0 : 1;
            }
            FaRow row;
            row.name = configs[c].name;
            row.sigma_frac = configs[c].sigma_frac;
            row.delta_frac = configs[c].delta_frac;
            row.window = configs[c].window;
            row.k = k;
            row.frames = slots;
            row.p_fa = static_cast<double>(alarm_slots) / static_cast<double>(slots);
            row.run_alarm_rate = static_cast<double>(alarm_runs) / static_cast<double>(runs);
            row.reception_failure_rate = static_cast<double>(reception) / static_cast<double>(slots);
            row.verification_failure_rate = static_cast<double>(verification) / static_cast<double>(slots);
            rows.push_back(row);
        }
    }
    return rows;
}

void write_fa_csv(std::ostream& out, std::span<const FaRow> rows) {
    out << "message,sigma_frac,delta_frac,L,K,frames,P_FA,run_alarm_rate,reception_failure_rate,"
           "verification_failure_rate\n";
    for (const auto& r : rows) {
        out << fmt::format("{},{:.4f},{:.4f},{},{},{},{:.6f},{:.6f},{:.6f},{:.6f}\n", r.name, r.sigma_frac,
                           r.delta_frac, r.window, r.k, r.frames, r.p_fa, r.run_alarm_rate, r.reception_failure_rate,
                           r.verification_failure_rate);
    }
}

}  // namespace tacan::bench
