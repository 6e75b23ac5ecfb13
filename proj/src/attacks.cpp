#include "tacan/attacks.hpp"

#include <algorithm>
#include <stdexcept>

#include "tacan/rng.hpp"

namespace tacan::attacks {

TimingTrace apply_suspension(const TimingTrace& trace, double t_start) {
    if (!(t_start >= 0.0)) {
        throw std::invalid_argument("apply_suspension: t_start must be >= 0");
    }
    TimingTrace out = trace;
    out.arrivals.clear();
    out.payloads.clear();
    for (std::size_t i = 0; i < trace.arrivals.size(); ++i) {
        if (trace.arrivals[i] >= t_start) {
            continue;
        }
        out.arrivals.push_back(trace.arrivals[i]);
        if (trace.has_payloads()) {
            out.payloads.push_back(trace.payloads[i]);
        }
    }
    return out;
}

TimingTrace apply_injection(const TimingTrace& trace, const TimingTrace& injected) {
    if (injected.arrivals.empty()) {
        return trace;
    }
    if (trace.msg_id != injected.msg_id) {
        throw std::invalid_argument("apply_injection: message IDs differ");
    }
    const bool with_payloads = trace.has_payloads() || (trace.arrivals.empty() && injected.has_payloads());
    if (with_payloads && !injected.has_payloads()) {
        throw std::invalid_argument("apply_injection: injected trace lacks payloads");
    }
    TimingTrace out;
    out.msg_id = trace.msg_id;
    out.nominal_period = trace.nominal_period;
    out.arrivals.reserve(trace.size() + injected.size());
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < trace.size() || j < injected.size()) {
        const bool take_own = j >= injected.size() ||
                              (i < trace.size() && trace.arrivals[i] <= injected.arrivals[j]);
        if (take_own) {
            out.arrivals.push_back(trace.arrivals[i]);
            if (with_payloads) {
                out.payloads.push_back(trace.payloads[i]);
            }
            ++i;
        } else {
            out.arrivals.push_back(injected.arrivals[j]);
            if (with_payloads) {
                out.payloads.push_back(injected.payloads[j]);
            }
            ++j;
        }
    }
    return out;
}

TimingTrace apply_masquerade(const TimingTrace& target, double t_start, const TimingTrace& forged) {
    return apply_injection(apply_suspension(target, t_start), forged);
}

TimingTrace periodic_trace(std::uint32_t msg_id, double t0, double period, std::size_t count) {
    TimingTrace out;
    out.msg_id = msg_id;
    out.nominal_period = period;
    out.arrivals.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        out.arrivals.push_back(t0 + static_cast<double>(i) * period);
    }
    return out;
}

std::vector<BitString> forge_auth_stream(std::size_t n_frames, std::size_t m, std::uint64_t seed,
                                         std::size_t counter_bits, std::uint64_t first_counter) {
    if (m == 0 || m > 64) {
        throw std::invalid_argument("forge_auth_stream: digest width must be in [1, 64]");
    }
    if (counter_bits == 0 || counter_bits > 63) {
        throw std::invalid_argument("forge_auth_stream: counter width must be in [1, 63]");
    }
    Rng rng(seed);
    std::vector<BitString> out;
    out.reserve(n_frames);
    const std::uint64_t mask = m == 64 ? ~0ULL : ((1ULL << m) - 1);
    for (std::size_t i = 0; i < n_frames; ++i) {
        BitString msg = BitString::from_uint(first_counter + i, counter_bits);
        msg.append(BitString::from_uint(rng.next_u64() & mask, m));
        out.push_back(std::move(msg));
    }
    return out;
}

std::string_view to_string(AuthKind kind) noexcept {
    switch (kind) {
        case AuthKind::ok: return "ok";
        case AuthKind::reception_failure: return "reception_failure";
        case AuthKind::verification_failure: return "verification_failure";
    }
    return "unknown";
}

DetectorState::DetectorState(std::size_t k) : k_threshold(k) {
    if (k == 0) {
        throw std::invalid_argument("DetectorState: K must be >= 1");
    }
}

std::pair<DetectorState, bool> monitor_step(DetectorState state, const AuthResult& result) {
    const std::size_t index = state.steps++;
    if (!result.failed()) {
        state.consecutive_failures = 0;
        return {std::move(state), false};
    }
    ++state.consecutive_failures;
    const bool alarm = state.consecutive_failures >= state.k_threshold;
    if (alarm) {
        state.alarms.push_back({index, result.kind});
    }
    return {std::move(state), alarm};
}

bool any_alarm(std::span<const AuthResult> results, std::size_t k) {
    DetectorState state(k);
    bool fired = false;
    for (const auto& r : results) {
        auto [next, alarm] = monitor_step(std::move(state), r);
        state = std::move(next);
        fired = fired || alarm;
    }
    return fired;
}

Rates evaluate_rates(std::span<const LabeledRun> runs, std::size_t k) {
    if (runs.empty()) {
        throw std::invalid_argument("evaluate_rates: no runs");
    }
    if (k == 0) {
        throw std::invalid_argument("evaluate_rates: K must be >= 1");
    }
    Rates r;
    std::size_t fa = 0;
    std::size_t det = 0;
    for (const auto& run : runs) {
        const bool alarm = any_alarm(run.results, k);
        if (run.attack) {
            ++r.attack_runs;
            det += alarm ? 1 : 0;
        } else {
            ++r.clean_runs;
            fa += alarm ? 1 : 0;
        }
    }
    if (r.clean_runs > 0) {
        r.p_fa = static_cast<double>(fa) / static_cast<double>(r.clean_runs);
    }
    if (r.attack_runs > 0) {
        r.p_d = static_cast<double>(det) / static_cast<double>(r.attack_runs);
    }
    return r;
}

}  // namespace tacan::attacks
