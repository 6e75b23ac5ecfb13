#pragma once

// Trace-level attacks (suspension, injection, masquerade), forged and
// replayed authentication streams, and the monitor-node detector that
// raises an alarm after K consecutive authentication failures.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tacan/auth.hpp"
#include "tacan/bitstring.hpp"
#include "tacan/timing.hpp"

namespace tacan::attacks {

using timing::TimingTrace;

/// Drops every arrival at or after t_start. Throws std::invalid_argument
/// for t_start < 0.
TimingTrace apply_suspension(const TimingTrace& trace, double t_start);

/// Merges two traces of the same ID by arrival time (stable: on equal times
/// the original arrival comes first). When the target carries payloads the
/// injected trace must too; otherwise injected payloads are dropped.
/// Throws std::invalid_argument on an ID or payload mismatch.
TimingTrace apply_injection(const TimingTrace& trace, const TimingTrace& injected);

/// apply_injection(apply_suspension(target, t_start), forged).
TimingTrace apply_masquerade(const TimingTrace& target, double t_start, const TimingTrace& forged);

/// Periodic arrivals t0, t0 + period, ... (count of them).
TimingTrace periodic_trace(std::uint32_t msg_id, double t0, double period, std::size_t count);

/// Authentication messages with the counters first_counter,
/// first_counter + 1, ... in counter_bits bits and uniformly random m-bit
/// digests. Throws std::invalid_argument for m == 0 or m > 64.
std::vector<BitString> forge_auth_stream(std::size_t n_frames, std::size_t m, std::uint64_t seed,
                                         std::size_t counter_bits = auth::kDefaultCounterBits,
                                         std::uint64_t first_counter = 1);

enum class AuthKind { ok, reception_failure, verification_failure };

std::string_view to_string(AuthKind kind) noexcept;

struct AuthResult {
    AuthKind kind = AuthKind::ok;
    std::string detail;  ///< failure cause, empty on success

    bool failed() const noexcept { return kind != AuthKind::ok; }
};

struct Alarm {
    std::size_t index = 0;  ///< position of the triggering result
    AuthKind kind = AuthKind::reception_failure;
};

struct DetectorState {
    std::size_t k_threshold = 1;
    std::size_t consecutive_failures = 0;
    std::size_t steps = 0;
    std::vector<Alarm> alarms;

    explicit DetectorState(std::size_t k = 1);
};

/// Success resets the failure count; a failure increments it. The alarm is
/// raised whenever the count is at least K.
std::pair<DetectorState, bool> monitor_step(DetectorState state, const AuthResult& result);

/// Runs a fresh detector over `results`; true when any alarm fired.
bool any_alarm(std::span<const AuthResult> results, std::size_t k);

struct LabeledRun {
    bool attack = false;
    std::vector<AuthResult> results;
};

struct Rates {
    double p_fa = 0.0;  ///< attack-free runs with an alarm / attack-free runs
    double p_d = 0.0;   ///< attack runs with an alarm / attack runs
    std::size_t clean_runs = 0;
    std::size_t attack_runs = 0;
};

/// Throws std::invalid_argument on empty input or k == 0. A rate whose run
/// class is empty is reported as 0.
Rates evaluate_rates(std::span<const LabeledRun> runs, std::size_t k);

}  // namespace tacan::attacks
