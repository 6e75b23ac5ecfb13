#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "tacan/attacks.hpp"
#include "tacan/bench.hpp"
#include "tacan/bitcodec.hpp"
#include "tacan/chan_hybrid.hpp"
#include "tacan/chan_iat.hpp"
#include "tacan/link.hpp"
#include "tacan/sched.hpp"
#include "tacan/timing.hpp"

namespace tacan::cli {

namespace {

class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Meta = std::vector<std::pair<std::string, std::string>>;

struct Common {
    std::uint64_t seed = 1;
    std::string format = "human";
    std::string output;

    bool csv() const { return format == "csv"; }
};

std::string num(double v) { return fmt::format("{}", v); }

void emit_meta(std::ostream& o, std::string_view cmd, const Common& c, const Meta& meta) {
    if (c.csv()) {
        o << "# tacan " << cmd << "\n# seed=" << c.seed << "\n";
        for (const auto& [k, v] : meta) {
            o << "# " << k << "=" << v << "\n";
        }
        return;
    }
    o << "tacan " << cmd << " (seed " << c.seed << ")\n";
    for (const auto& [k, v] : meta) {
        o << "  " << k << " = " << v << "\n";
    }
    o << "\n";
}

// ---------------------------------------------------------------- simulate

struct SimulateOpts {
    std::string channel = "iat";
    double period_ms = 10.0;
    double delta_frac = 0.01;
    std::size_t window = 4;
    std::size_t lsb_bits = 1;
    std::size_t byte_index = 0;
    std::size_t frames = 50;
    double sigma_frac = 0.0;
    double skew_ppm = 0.0;
    std::string noise = "gaussian";
    std::size_t counter_bits = auth::kDefaultCounterBits;
    std::size_t digest_bits = auth::kDefaultDigestBits;
    std::string digest_mode = "last";
    std::size_t gap_bits = 8;
    std::string attack = "none";
    double attack_start_s = 0.0;
    double attack_duration_s = std::numeric_limits<double>::infinity();
    double inject_period_ms = 100.0;
    std::size_t k = 2;
};

void add_simulate(CLI::App& app, SimulateOpts& o) {
    app.add_option("--channel", o.channel, "iat, lsb, offset or hybrid")
        ->check(CLI::IsMember({"iat", "lsb", "offset", "hybrid"}))
        ->capture_default_str();
    app.add_option("--period-ms", o.period_ms, "message period T")->capture_default_str();
    app.add_option("--delta-frac", o.delta_frac, "ITT deviation as a fraction of T")->capture_default_str();
    app.add_option("--window", o.window, "L (IAT/offset) or L1 (hybrid)")->capture_default_str();
    app.add_option("--lsb-bits", o.lsb_bits, "L (LSB) or L2 (hybrid)")->capture_default_str();
    app.add_option("--byte-index", o.byte_index, "payload byte carrying LSB bits")->capture_default_str();
    app.add_option("--frames", o.frames, "authentication frames to send")->capture_default_str();
    app.add_option("--sigma-frac", o.sigma_frac, "IAT standard deviation as a fraction of T")->capture_default_str();
    app.add_option("--skew-ppm", o.skew_ppm, "sender clock skew")->capture_default_str();
    app.add_option("--noise", o.noise, "gaussian or laplace")
        ->check(CLI::IsMember({"gaussian", "laplace"}))
        ->capture_default_str();
    app.add_option("--counter-bits", o.counter_bits, "message counter width")->capture_default_str();
    app.add_option("--digest-bits", o.digest_bits, "truncated digest width M")->capture_default_str();
    app.add_option("--digest-mode", o.digest_mode, "last or xor")
        ->check(CLI::IsMember({"last", "xor"}))
        ->capture_default_str();
    app.add_option("--gap-bits", o.gap_bits, "idle bits added to the worst-case frame slot")->capture_default_str();
    app.add_option("--attack", o.attack, "none, suspension, injection, masquerade, forgery or replay")
        ->check(CLI::IsMember({"none", "suspension", "injection", "masquerade", "forgery", "replay"}))
        ->capture_default_str();
    app.add_option("--attack-start-s", o.attack_start_s, "attack start time")->capture_default_str();
    app.add_option("--attack-duration-s", o.attack_duration_s, "injection duration")->capture_default_str();
    app.add_option("--inject-period-ms", o.inject_period_ms, "period of the injected stream")->capture_default_str();
    app.add_option("-k,--k", o.k, "consecutive failures that raise an alarm")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
}

link::LinkConfig link_config(const SimulateOpts& o) {
    link::LinkConfig cfg;
    cfg.channel = link::parse_channel(o.channel);
    cfg.period = o.period_ms * 1e-3;
    cfg.delta_frac = o.delta_frac;
    cfg.window = o.window;
    cfg.lsb_bits = o.lsb_bits;
    cfg.byte_index = o.byte_index;
    cfg.counter_bits = o.counter_bits;
    cfg.digest.bits = o.digest_bits;
    cfg.digest.mode = o.digest_mode == "xor" ? auth::DigestMode::xor_bytes : auth::DigestMode::last_bits;
    cfg.gap_bits = o.gap_bits;
    cfg.sigma_frac = o.sigma_frac;
    cfg.skew = o.skew_ppm * 1e-6;
    cfg.noise = o.noise == "laplace" ? timing::NoiseKind::laplace : timing::NoiseKind::gaussian;
    cfg.validate();
    return cfg;
}

int cmd_simulate(const SimulateOpts& o, const Common& c, std::ostream& out) {
    const auto cfg = link_config(o);
    link::AttackPlan plan;
    plan.kind = link::parse_attack(o.attack);
    plan.start_s = o.attack_start_s;
    plan.duration_s = o.attack_duration_s;
    plan.inject_period_s = o.inject_period_ms * 1e-3;
    if (!(plan.inject_period_s > 0.0)) {
        throw std::invalid_argument("--inject-period-ms must be > 0");
    }
    const auto run = link::run_link(cfg, o.frames, plan, c.seed);

    Meta meta{{"channel", o.channel},
              {"period_ms", num(o.period_ms)},
              {"delta_frac", num(o.delta_frac)},
              {"window", std::to_string(o.window)},
              {"lsb_bits", std::to_string(o.lsb_bits)},
              {"byte_index", std::to_string(o.byte_index)},
              {"frames", std::to_string(o.frames)},
              {"sigma_frac", num(o.sigma_frac)},
              {"skew_ppm", num(o.skew_ppm)},
              {"noise", o.noise},
              {"counter_bits", std::to_string(o.counter_bits)},
              {"digest_bits", std::to_string(o.digest_bits)},
              {"digest_mode", o.digest_mode},
              {"gap_bits", std::to_string(o.gap_bits)},
              {"attack", o.attack},
              {"attack_start_s", num(o.attack_start_s)},
              {"attack_duration_s", num(o.attack_duration_s)},
              {"inject_period_ms", num(o.inject_period_ms)},
              {"k", std::to_string(o.k)},
              {"slot_messages", std::to_string(run.layout.messages_per_slot)},
              {"slot_seconds", fmt::format("{:.6f}", run.slot_seconds)}};
    emit_meta(out, "simulate", c, meta);

    attacks::DetectorState state(o.k);
    std::size_t ok = 0;
    std::size_t reception = 0;
    std::size_t verification = 0;
    long long first_alarm = -1;
    if (c.csv()) {
        out << "slot,result,detail,consecutive_failures,alarm\n";
    } else {
        out << fmt::format("{:>6}  {:<21} {:<20} {:>4}  {}\n", "slot", "result", "detail", "run", "alarm");
    }
    for (std::size_t s = 0; s < run.results.size(); ++s) {
        const auto& r = run.results[s];
        auto [next, alarm] = attacks::monitor_step(std::move(state), r);
        state = std::move(next);
        ok += r.kind == attacks::AuthKind::ok ? 1 : 0;
        reception += r.kind == attacks::AuthKind::reception_failure ? 1 : 0;
        verification += r.kind == attacks::AuthKind::verification_failure ? 1 : 0;
        if (alarm && first_alarm < 0) {
            first_alarm = static_cast<long long>(s);
        }
        if (c.csv()) {
            out << fmt::format("{},{},{},{},{}\n", s, attacks::to_string(r.kind), r.detail,
                               state.consecutive_failures, alarm ? 1 : 0);
        } else {
            out << fmt::format("{:>6}  {:<21} {:<20} {:>4}  {}\n", s, attacks::to_string(r.kind),
                               r.detail.empty() ? "-" : r.detail, state.consecutive_failures, alarm ? "ALARM" : "");
        }
    }
    const double n = static_cast<double>(std::max<std::size_t>(run.results.size(), 1));
    const double fail_rate = static_cast<double>(reception + verification) / n;
    if (c.csv()) {
        out << fmt::format(
            "# summary frames={} ok={} reception_failures={} verification_failures={} failure_rate={:.6f} "
            "alarms={} first_alarm_slot={}\n",
            run.results.size(), ok, reception, verification, fail_rate, state.alarms.size(), first_alarm);
    } else {
        out << fmt::format("\n{}/{} verified, {} reception failures, {} verification failures (failure rate {:.4f})\n",
                           ok, run.results.size(), reception, verification, fail_rate);
        if (first_alarm >= 0) {
            out << fmt::format("alarm raised at slot {} (K = {}), {} alarm slots in total\n", first_alarm, o.k,
                               state.alarms.size());
        } else {
            out << fmt::format("no alarm (K = {})\n", o.k);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- ber-sweep

struct BerOpts {
    std::vector<double> sigma_fracs{0.005, 0.011, 0.027};
    std::size_t l_min = 1;
    std::size_t l_max = 8;
    double delta_frac = 0.01;
    std::size_t bits = 100000;
    double period_ms = 10.0;
};

int cmd_ber(const BerOpts& o, const Common& c, std::ostream& out) {
    const auto cells =
        bench::ber_sweep(o.sigma_fracs, o.l_min, o.l_max, o.delta_frac, o.bits, c.seed, o.period_ms * 1e-3);
    std::string sig;
    for (std::size_t i = 0; i < o.sigma_fracs.size(); ++i) {
        sig += (i ? "," : "") + num(o.sigma_fracs[i]);
    }
    emit_meta(out, "ber-sweep", c,
              {{"sigma_fracs", sig},
               {"l_min", std::to_string(o.l_min)},
               {"l_max", std::to_string(o.l_max)},
               {"delta_frac", num(o.delta_frac)},
               {"bits", std::to_string(o.bits)},
               {"period_ms", num(o.period_ms)}});
    if (c.csv()) {
        bench::write_ber_csv(out, cells);
        return kExitOk;
    }
    out << fmt::format("{:>8} {:>3} {:>12} {:>12} {:>10} {:>7}\n", "sigma/T", "L", "analytic", "empirical", "SE",
                       "|z|");
    for (const auto& cell : cells) {
        const double z = cell.se > 0.0 ? std::abs(cell.empirical - cell.analytic) / cell.se : 0.0;
        out << fmt::format("{:>8.4f} {:>3} {:>12.4e} {:>12.4e} {:>10.2e} {:>7.2f}\n", cell.sigma_frac, cell.window,
                           cell.analytic, cell.empirical, cell.se, z);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- throughput

struct ThroughputOpts {
    double period_ms = 10.0;
    std::size_t iat_window = 1;
    std::size_t lsb_bits = 2;
    std::vector<std::string> hybrid{"1:1", "2:2"};
    std::size_t frames = 1000;
    std::size_t counter_bits = auth::kDefaultCounterBits;
    std::size_t digest_bits = auth::kDefaultDigestBits;
};

std::pair<std::size_t, std::size_t> parse_pair(const std::string& s) {
    const auto colon = s.find(':');
    try {
        if (colon == std::string::npos) {
            throw std::invalid_argument(s);
        }
        const auto a = std::stoul(s.substr(0, colon));
        const auto b = std::stoul(s.substr(colon + 1));
        return {a, b};
    } catch (const std::exception&) {
        throw std::invalid_argument("--hybrid expects L1:L2, got '" + s + "'");
    }
}

int cmd_throughput(const ThroughputOpts& o, const Common& c, std::ostream& out) {
    if (o.frames == 0) {
        throw std::invalid_argument("--frames must be >= 1");
    }
    auth::DigestPolicy policy;
    policy.bits = o.digest_bits;
    policy.validate();
    const auto sample = bench::make_frame_sample(o.frames, c.seed, o.counter_bits, policy);
    const double t = o.period_ms * 1e-3;
    const std::size_t n_o = bitcodec::kOverheadBits;
    std::vector<bench::ThroughputRow> rows;
    rows.push_back(bench::throughput_iat(t, o.iat_window, sample.n_m, n_o, sample.mean_frame_bits()));
    rows.push_back(bench::throughput_lsb(t, o.lsb_bits, sample.n_m, n_o, sample.frame_bits));
    std::string hy;
    for (const auto& h : o.hybrid) {
        const auto [l1, l2] = parse_pair(h);
        rows.push_back(bench::throughput_hybrid({l1, l2, sample.n_m, n_o}, t, sample));
        hy += (hy.empty() ? "" : ",") + h;
    }
    emit_meta(out, "throughput", c,
              {{"period_ms", num(o.period_ms)},
               {"iat_window", std::to_string(o.iat_window)},
               {"lsb_bits", std::to_string(o.lsb_bits)},
               {"hybrid", hy},
               {"frames", std::to_string(o.frames)},
               {"counter_bits", std::to_string(o.counter_bits)},
               {"digest_bits", std::to_string(o.digest_bits)},
               {"mean_frame_bits", fmt::format("{:.4f}", sample.mean_frame_bits())}});
    if (c.csv()) {
        bench::write_throughput_csv(out, rows);
        return kExitOk;
    }
    out << fmt::format("{:<8} {:>3} {:>3} {:>8} {:>9} {:>10} {:>10}\n", "channel", "L1", "L2", "alpha", "iat bits",
                       "Rc (bps)", "Ra (bps)");
    for (const auto& r : rows) {
        out << fmt::format("{:<8} {:>3} {:>3} {:>8.3f} {:>9} {:>10.2f} {:>10.2f}\n", r.channel, r.l1, r.l2, r.alpha,
                           r.iat_bits, r.r_c, r.r_a);
    }
    return kExitOk;
}

// ---------------------------------------------------------------- sched

struct SchedOpts {
    std::string input;
    double deviation = 0.01;
};

int cmd_sched(const SchedOpts& o, const Common& c, std::ostream& out) {
    std::ifstream in(o.input);
    if (!in) {
        throw InputError("cannot open " + o.input);
    }
    sched::BusSpec bus;
    try {
        bus = sched::parse_bus(in);
    } catch (const sched::ParseError& e) {
        throw InputError(o.input + ": " + e.what());
    }
    const auto report = sched::bus_schedulable(bus, o.deviation);
    emit_meta(out, "sched", c,
              {{"input", o.input},
               {"deviation_frac", num(o.deviation)},
               {"bitrate_bps", fmt::format("{:.0f}", 1.0 / bus.tau_bit)},
               {"messages", std::to_string(bus.messages.size())},
               {"schedulable", report.schedulable ? "1" : "0"}});
    if (c.csv()) {
        sched::write_report_csv(out, bus, report);
        return kExitOk;
    }
    out << fmt::format("{:>6} {:>5} {:>9} {:>9} {:>9} {:>9} {:>9}  {}\n", "id", "prio", "C (us)", "J (us)", "B (us)",
                       "R (us)", "D (us)", "ok");
    for (const auto& r : report.messages) {
        out << fmt::format("0x{:03X}  {:>5} {:>9.2f} {:>9.2f} {:>9.2f} {:>9.2f} {:>9.2f}  {}\n", r.id, r.priority,
                           r.c * 1e6, r.j * 1e6, r.b * 1e6, r.r * 1e6, r.deadline * 1e6, r.schedulable ? "yes" : "NO");
    }
    out << "\nbus " << (report.schedulable ? "schedulable" : "NOT schedulable") << " at f = " << num(o.deviation)
        << "\n";
    return kExitOk;
}

// ---------------------------------------------------------------- detect

struct DetectOpts {
    std::vector<std::size_t> ks{1, 2, 3};
    std::size_t runs = 100;
    std::size_t frames_per_run = 10;
    double sigma_frac = 0.0;  // 0 selects the built-in vehicle message set
    double delta_frac = 0.02;
    std::size_t window = 0;   // 0 sizes the window for a 2% frame failure budget
    double period_ms = 10.0;
    std::string attack = "none";
    double attack_start_s = 5.0;
};

int cmd_detect(const DetectOpts& o, const Common& c, std::ostream& out) {
    std::vector<bench::FaConfig> configs;
    if (o.sigma_frac > 0.0) {
        bench::FaConfig fc;
        fc.name = "custom";
        fc.period = o.period_ms * 1e-3;
        fc.sigma_frac = o.sigma_frac;
        fc.delta_frac = o.delta_frac;
        link::LinkConfig base;
        fc.window = o.window > 0 ? o.window
                                 : bench::window_for_frame_budget(o.sigma_frac, o.delta_frac,
                                                                  link::slot_layout(base).timing_slot_bits, 0.02);
        configs.push_back(fc);
    } else {
        configs = bench::vehicle_fa_configs();
    }
    std::string ks;
    for (auto k : o.ks) {
        ks += (ks.empty() ? "" : ",") + std::to_string(k);
    }
    Meta meta{{"configs", o.sigma_frac > 0.0 ? "custom" : "vehicle"},
              {"k", ks},
              {"runs", std::to_string(o.runs)},
              {"frames_per_run", std::to_string(o.frames_per_run)},
              {"attack", o.attack}};
    if (o.sigma_frac > 0.0) {
        meta.emplace_back("sigma_frac", num(o.sigma_frac));
        meta.emplace_back("delta_frac", num(o.delta_frac));
        meta.emplace_back("window", std::to_string(configs.front().window));
        meta.emplace_back("period_ms", num(o.period_ms));
    }

    const auto kind = link::parse_attack(o.attack);
    if (kind == link::Attack::none) {
        const auto rows = bench::fa_table(configs, o.ks, o.runs, o.frames_per_run, c.seed);
        emit_meta(out, "detect", c, meta);
        if (c.csv()) {
            bench::write_fa_csv(out, rows);
            return kExitOk;
        }
        out << fmt::format("{:<8} {:>7} {:>3} {:>3} {:>7} {:>9} {:>10} {:>10}\n", "message", "sigma/T", "L", "K",
                           "frames", "P_FA", "rx fail", "verif fail");
        for (const auto& r : rows) {
            out << fmt::format("{:<8} {:>7.4f} {:>3} {:>3} {:>7} {:>9.5f} {:>10.5f} {:>10.5f}\n", r.name, r.sigma_frac,
                               r.window, r.k, r.frames, r.p_fa, r.reception_failure_rate, r.verification_failure_rate);
        }
        return kExitOk;
    }

    if (o.runs == 0 || o.frames_per_run == 0) {
        throw std::invalid_argument("--runs and --frames-per-run must be >= 1");
    }
    meta.emplace_back("attack_start_s", num(o.attack_start_s));
    emit_meta(out, "detect", c, meta);
    link::AttackPlan plan;
    plan.kind = kind;
    plan.start_s = o.attack_start_s;
    if (c.csv()) {
        out << "message,L,K,runs,P_FA,P_D\n";
    } else {
        out << fmt::format("{:<8} {:>3} {:>3} {:>6} {:>8} {:>8}\n", "message", "L", "K", "runs", "P_FA", "P_D");
    }
    for (std::size_t ci = 0; ci < configs.size(); ++ci) {
        const auto& fc = configs[ci];
        link::LinkConfig cfg;
        cfg.period = fc.period;
        cfg.sigma_frac = fc.sigma_frac;
        cfg.delta_frac = fc.delta_frac;
        cfg.window = fc.window;
        std::vector<attacks::LabeledRun> runs;
        for (std::size_t r = 0; r < o.runs; ++r) {
            const std::uint64_t base = Rng::derive_seed(c.seed, ci * o.runs + r);
            runs.push_back({false, link::run_link(cfg, o.frames_per_run, {}, base).results});
            runs.push_back({true, link::run_link(cfg, o.frames_per_run, plan, Rng::derive_seed(base, 1)).results});
        }
        for (auto k : o.ks) {
            const auto rates = attacks::evaluate_rates(runs, k);
            if (c.csv()) {
                out << fmt::format("{},{},{},{},{:.6f},{:.6f}\n", fc.name, fc.window, k, o.runs, rates.p_fa,
                                   rates.p_d);
            } else {
                out << fmt::format("{:<8} {:>3} {:>3} {:>6} {:>8.4f} {:>8.4f}\n", fc.name, fc.window, k, o.runs,
                                   rates.p_fa, rates.p_d);
            }
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeOpts {
    std::string input;
    double period_ms = 0.0;  // 0 estimates T per ID from the median IAT
    double delta_frac = 0.01;
    double epsilon = 0.01;
};

int cmd_analyze(const AnalyzeOpts& o, const Common& c, std::ostream& out, std::ostream& err) {
    std::ifstream in(o.input);
    if (!in) {
        throw InputError("cannot open " + o.input);
    }
    const auto log = timing::parse_candump(in);
    if (!log.errors.empty()) {
        for (const auto& e : log.errors) {
            err << fmt::format("{}:{}: {} ({})\n", o.input, e.line, e.reason, e.text);
        }
        throw InputError(fmt::format("{}: {} malformed line(s)", o.input, log.errors.size()));
    }
    emit_meta(out, "analyze", c,
              {{"input", o.input},
               {"period_ms", o.period_ms > 0.0 ? num(o.period_ms) : std::string("auto")},
               {"delta_frac", num(o.delta_frac)},
               {"epsilon", num(o.epsilon)},
               {"ids", std::to_string(log.traces.size())}});
    if (c.csv()) {
        out << "id,frames,T_s,mu_s,sigma_s,sigma_frac,used,L_min\n";
    } else {
        out << fmt::format("{:>10} {:>7} {:>10} {:>10} {:>10} {:>8} {:>6}\n", "id", "frames", "T (ms)", "mu (ms)",
                           "sigma(us)", "sigma/T", "L_min");
    }
    for (const auto& [id, trace] : log.traces) {
        double t = o.period_ms * 1e-3;
        timing::IatStats st;
        bool have = trace.size() >= 2;
        std::size_t l_min = 0;
        if (have) {
            auto x = timing::iats(trace);
            if (t <= 0.0) {
                auto sorted = x;
                std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2),
                                 sorted.end());
                t = sorted[sorted.size() / 2];
            }
            try {
                st = timing::robust_sigma(x, t);
            } catch (const std::domain_error&) {
                have = false;
            }
            if (have && st.sigma > 0.0) {
                l_min = chan_iat::min_window(o.delta_frac * t, 0.0, st.sigma, o.epsilon);
            }
        }
        const double frac = have && t > 0.0 ? st.sigma / t : std::nan("");
        if (c.csv()) {
            out << fmt::format("0x{:03X},{},{:.9f},{:.9f},{:.9f},{:.6f},{},{}\n", id, trace.size(), t, st.mu,
                               have ? st.sigma : std::nan(""), frac, st.n_used, l_min);
        } else {
            out << fmt::format("{:>10} {:>7} {:>10.3f} {:>10.3f} {:>10.2f} {:>8.4f} {:>6}\n", fmt::format("0x{:03X}", id),
                               trace.size(), t * 1e3, st.mu * 1e3, have ? st.sigma * 1e6 : std::nan(""), frac, l_min);
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------- split

struct SplitOpts {
    std::size_t l1 = 1;
    std::size_t l2 = 1;
    std::size_t n_m = 32;
    std::size_t n_o = 16;
    double period_ms = 10.0;
    std::string message;
};

int cmd_split(const SplitOpts& o, const Common& c, std::ostream& out) {
    const chan_hybrid::HybridConfig cfg{o.l1, o.l2, o.n_m, o.n_o};
    const double alpha = chan_hybrid::splitting_ratio(cfg);
    const std::size_t k = chan_hybrid::iat_share(alpha, o.n_m);
    const double d = chan_hybrid::hybrid_duration(cfg, o.period_ms * 1e-3);
    std::optional<chan_hybrid::SplitMessage> parts;
    if (!o.message.empty()) {
        const auto bits = BitString::from_string(o.message);
        parts = chan_hybrid::split_message(bits, alpha);
    }
    emit_meta(out, "split", c,
              {{"l1", std::to_string(o.l1)},
               {"l2", std::to_string(o.l2)},
               {"n_m", std::to_string(o.n_m)},
               {"n_o", std::to_string(o.n_o)},
               {"period_ms", num(o.period_ms)}});
    if (c.csv()) {
        out << "L1,L2,Nm,No,alpha,iat_bits,lsb_bits,duration_s" << (parts ? ",iat_part,lsb_part" : "") << "\n";
        out << fmt::format("{},{},{},{},{:.6f},{},{},{:.6f}", o.l1, o.l2, o.n_m, o.n_o, alpha, k, o.n_m - k, d);
        if (parts) {
            out << "," << parts->iat.to_string() << "," << parts->lsb.to_string();
        }
        out << "\n";
        return kExitOk;
    }
    out << fmt::format("alpha     = {:.4f} ({:.1f}%)\n", alpha, alpha * 100.0);
    out << fmt::format("IAT part  = {} bits\nLSB part  = {} bits\n", k, o.n_m - k);
    out << fmt::format("duration  = {:.4f} s (before stuffing)\n", d);
    if (parts) {
        out << "iat bits  = " << parts->iat.to_string() << "\nlsb bits  = " << parts->lsb.to_string() << "\n";
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Covert-channel transmitter authentication toolkit", "tacan"};
    app.set_config("--config", "", "key=value configuration file with [subcommand] sections");
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", common.seed, "random seed")->capture_default_str();
        sub->add_option("--format", common.format, "csv or human")
            ->check(CLI::IsMember({"csv", "human"}))
            ->capture_default_str();
        sub->add_option("-o,--output", common.output, "write output to this file");
    };

    SimulateOpts sim_o;
    auto* sim = app.add_subcommand("simulate", "encode, send, attack, decode and verify authentication frames");
    add_simulate(*sim, sim_o);
    add_common(sim);

    BerOpts ber_o;
    auto* ber = app.add_subcommand("ber-sweep", "Monte-Carlo bit error rates of the IAT channel");
    ber->add_option("--sigma-fracs", ber_o.sigma_fracs, "IAT sigma / T values")->delimiter(',')->capture_default_str();
    ber->add_option("--l-min", ber_o.l_min)->capture_default_str();
    ber->add_option("--l-max", ber_o.l_max)->capture_default_str();
    ber->add_option("--delta-frac", ber_o.delta_frac)->capture_default_str();
    ber->add_option("--bits", ber_o.bits, "bits per cell")->capture_default_str();
    ber->add_option("--period-ms", ber_o.period_ms)->capture_default_str();
    add_common(ber);

    ThroughputOpts thr_o;
    auto* thr = app.add_subcommand("throughput", "covert and authentication throughput per channel");
    thr->add_option("--period-ms", thr_o.period_ms)->capture_default_str();
    thr->add_option("--iat-window", thr_o.iat_window)->check(CLI::PositiveNumber)->capture_default_str();
    thr->add_option("--lsb-bits", thr_o.lsb_bits)->check(CLI::Range(1, 8))->capture_default_str();
    thr->add_option("--hybrid", thr_o.hybrid, "L1:L2 pairs")->delimiter(',')->capture_default_str();
    thr->add_option("--frames", thr_o.frames, "frame sample size")->capture_default_str();
    thr->add_option("--counter-bits", thr_o.counter_bits)->capture_default_str();
    thr->add_option("--digest-bits", thr_o.digest_bits)->capture_default_str();
    add_common(thr);

    SchedOpts sch_o;
    auto* sch = app.add_subcommand("sched", "response-time analysis of a bus description");
    sch->add_option("-i,--input", sch_o.input, "bus description file")->required();
    sch->add_option("--deviation-frac", sch_o.deviation, "ITT deviation fraction f = delta / T")
        ->capture_default_str();
    add_common(sch);

    DetectOpts det_o;
    auto* det = app.add_subcommand("detect", "false-alarm and detection rates of the monitor");
    det->add_option("-k,--k", det_o.ks, "thresholds K")->delimiter(',')->capture_default_str();
    det->add_option("--runs", det_o.runs)->capture_default_str();
    det->add_option("--frames-per-run", det_o.frames_per_run)->capture_default_str();
    det->add_option("--sigma-frac", det_o.sigma_frac, "custom channel; 0 uses the vehicle set")
        ->capture_default_str();
    det->add_option("--delta-frac", det_o.delta_frac)->capture_default_str();
    det->add_option("--window", det_o.window, "0 sizes L for a 2% frame failure budget")->capture_default_str();
    det->add_option("--period-ms", det_o.period_ms)->capture_default_str();
    det->add_option("--attack", det_o.attack)
        ->check(CLI::IsMember({"none", "suspension", "injection", "masquerade", "forgery", "replay"}))
        ->capture_default_str();
    det->add_option("--attack-start-s", det_o.attack_start_s)->capture_default_str();
    add_common(det);

    AnalyzeOpts ana_o;
    auto* ana = app.add_subcommand("analyze", "IAT statistics and minimum window per ID of a candump log");
    ana->add_option("-i,--input", ana_o.input, "candump log")->required();
    ana->add_option("--period-ms", ana_o.period_ms, "nominal period; 0 estimates it")->capture_default_str();
    ana->add_option("--delta-frac", ana_o.delta_frac)->capture_default_str();
    ana->add_option("--epsilon", ana_o.epsilon, "target bit error probability")->capture_default_str();
    add_common(ana);

    SplitOpts spl_o;
    auto* spl = app.add_subcommand("split", "hybrid splitting ratio and duration");
    spl->add_option("--l1", spl_o.l1)->capture_default_str();
    spl->add_option("--l2", spl_o.l2)->capture_default_str();
    spl->add_option("--nm", spl_o.n_m, "authentication message bits")->capture_default_str();
    spl->add_option("--no", spl_o.n_o, "overhead bits per frame")->capture_default_str();
    spl->add_option("--period-ms", spl_o.period_ms)->capture_default_str();
    spl->add_option("--message", spl_o.message, "bit string to split");
    add_common(spl);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::ofstream file;
    std::ostream* sink = &out;
    if (!common.output.empty()) {
        file.open(common.output, std::ios::binary | std::ios::trunc);
        if (!file) {
            err << "error: cannot write " << common.output << "\n";
            return kExitUsage;
        }
        sink = &file;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(sim_o, common, *sink);
        }
        if (ber->parsed()) {
            return cmd_ber(ber_o, common, *sink);
        }
        if (thr->parsed()) {
            return cmd_throughput(thr_o, common, *sink);
        }
        if (sch->parsed()) {
            return cmd_sched(sch_o, common, *sink);
        }
        if (det->parsed()) {
            return cmd_detect(det_o, common, *sink);
        }
        if (ana->parsed()) {
            return cmd_analyze(ana_o, common, *sink, err);
        }
        if (spl->parsed()) {
            return cmd_split(spl_o, common, *sink);
        }
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace tacan::cli
